#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "ugbound/error.hpp"
#include "ugbound/exact.hpp"
#include "ugbound/instance.hpp"
#include "ugbound/relaxation.hpp"

namespace ugbound {

inline constexpr double kTwoOverPi = 2.0 / std::numbers::pi;
inline constexpr double kClampTolerance = 1e-12;
inline constexpr double kReportTolerance = 1e-4;

namespace detail {

// Inner products drift past +-1 by rounding; anything further is a bug.
inline double clamp_unit(double c) {
  if (!(std::abs(c) <= 1.0 + kClampTolerance)) {
    throw Error(ErrorKind::RangeViolation, "inner product " + std::to_string(c) + " outside [-1, 1]");
  }
  return std::clamp(c, -1.0, 1.0);
}

}  // namespace detail

/// (2/pi) asin(c): the y value whose angle representation is c.
inline double arcsin_y(double c) { return kTwoOverPi * std::asin(detail::clamp_unit(c)); }

/// Probability that exactly one of two independent events with
/// probabilities p and q occurs.
inline double unmatched_prob(double p, double q) {
  if (!(p >= 0.0 && p <= 1.0) || !(q >= 0.0 && q <= 1.0)) {
    throw Error(ErrorKind::RangeViolation, "probabilities must lie in [0, 1]");
  }
  return p * (1.0 - q) + (1.0 - p) * q;
}

/// Arcsine objective over any Gram accessor gram(a, b) indexed like
/// SdpProblem::slot:
///   (2/pi)(1/4) sum_e w sum_r [asin(x_i0,i0) + asin(x_i0,ir) + asin(x_j0,js) + asin(x_ir,js)]
template <class Gram>
double p4_objective_from(const UgInstance& inst, const Gram& gram) {
  const std::size_t stride = inst.k() + 1;
  double total = 0.0;
  for (const Edge& e : inst.edges()) {
    const std::size_t bi = e.i * stride;
    const std::size_t bj = e.j * stride;
    double sum = 0.0;
    for (Label r = 0; r < inst.k(); ++r) {
      const Label s = e.sigma(r);
      sum += std::asin(detail::clamp_unit(gram(bi, bi)));
      sum += std::asin(detail::clamp_unit(gram(bi, bi + r + 1)));
      sum += std::asin(detail::clamp_unit(gram(bj, bj + s + 1)));
      sum += std::asin(detail::clamp_unit(gram(bi + r + 1, bj + s + 1)));
    }
    total += e.w * sum;
  }
  return kTwoOverPi * 0.25 * total;
}

namespace detail {

inline void check_unit_rows(const UgInstance& inst, const GramSolution& sol) {
  if (sol.dim != (inst.k() + 1) * inst.n() || sol.factors.size() != sol.dim * sol.rank) {
    throw Error(ErrorKind::DimensionMismatch, "vectors do not match instance layout");
  }
  for (std::size_t u = 0; u < sol.dim; ++u) {
    const double norm = std::sqrt(sol.inner(u, u));
    if (std::abs(norm - 1.0) > kUnitNormTolerance) {
      throw Error(ErrorKind::InvariantViolation, "vector " + std::to_string(u) + " has norm " +
                                                     std::to_string(norm));
    }
  }
}

}  // namespace detail

inline double p4_objective(const UgInstance& inst, const GramSolution& sol) {
  detail::check_unit_rows(inst, sol);
  return p4_objective_from(inst, [&sol](std::size_t a, std::size_t b) { return sol.inner(a, b); });
}

/// (2/pi) sum_r asin(x_i0,ir) - (2 - k) per vertex; positive means the
/// arcsine constraint is violated. Reported, not enforced.
inline std::vector<double> p4_constraint_residual(const UgInstance& inst, const GramSolution& sol) {
  detail::check_unit_rows(inst, sol);
  const std::size_t stride = inst.k() + 1;
  std::vector<double> residual(inst.n());
  for (Vertex i = 0; i < inst.n(); ++i) {
    double sum = 0.0;
    for (Label r = 0; r < inst.k(); ++r) sum += arcsin_y(sol.inner(i * stride, i * stride + r + 1));
    residual[i] = sum - (2.0 - static_cast<double>(inst.k()));
  }
  return residual;
}

/// Claimed lower bound (2/pi) z1 on the optimum.
inline double bound_from_sdp(double z1) {
  if (!(z1 >= 0.0)) throw Error(ErrorKind::RangeViolation, "relaxation value must be nonnegative");
  return kTwoOverPi * z1;
}

struct BoundReport {
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t m = 0;
  double total_weight = 0.0;
  std::optional<double> z_exact;
  double z1 = 0.0;
  double lb = 0.0;
  std::optional<bool> sound;           // z1 + tol >= z_exact
  std::optional<bool> theorem2_holds;  // lb <= z_exact + tol, observed only
  std::optional<double> ratio;         // z_exact / z1
  double tol = kReportTolerance;
  bool converged = true;
  std::size_t iterations = 0;
  Residuals residuals;
};

/// Solves the relaxation, runs the exact oracle when k^n <= enum_limit, and
/// records how the two compare. A failed lower bound is data, not an error.
inline BoundReport verify_bounds(const UgInstance& inst, std::uint64_t enum_limit,
                                 const SolveOptions& opts = {}) {
  BoundReport report;
  report.n = inst.n();
  report.k = inst.k();
  report.m = inst.m();
  report.total_weight = inst.total_weight();

  std::optional<ExactResult> exact;
  const auto count = labeling_count(inst.n(), inst.k());
  if (count && *count <= enum_limit) exact = solve_exact(inst, enum_limit);

  // No warm start from the exact labeling: soundness is checked against the
  // solver alone.
  const GramSolution sol = solve_sdp(build_sdp(inst), opts);

  report.z1 = sol.objective;
  report.lb = bound_from_sdp(std::max(sol.objective, 0.0));
  report.converged = sol.converged;
  report.iterations = sol.iterations;
  report.residuals = sol.residuals;
  if (exact) {
    report.z_exact = exact->value;
    report.sound = report.z1 + report.tol >= exact->value;
    report.theorem2_holds = report.lb <= exact->value + report.tol;
    if (report.z1 > 0.0) report.ratio = exact->value / report.z1;
  }
  return report;
}

}  // namespace ugbound
