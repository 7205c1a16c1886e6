#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ugbound/error.hpp"
#include "ugbound/exact.hpp"
#include "ugbound/instance.hpp"
#include "ugbound/randomized.hpp"
#include "ugbound/rng.hpp"

namespace ugbound {

inline constexpr double kUnitNormTolerance = 1e-7;
inline constexpr double kConstraintTolerance = 1e-6;

/// C[a][b] = C[b][a] = value, a < b.
struct PairCoefficient {
  std::size_t a = 0;
  std::size_t b = 0;
  double value = 0.0;
};

/// sum over labels r of <v(anchor), v(slots[r])> <= bound.
struct VertexConstraint {
  Vertex vertex = 0;
  std::size_t anchor = 0;
  std::vector<std::size_t> slots;
  double bound = 0.0;
};

/// The relaxation over the Gram matrix X of (k+1)n unit vectors:
///   maximize <C, X> + constant
///   subject to X[i0][i0] = X[ir][ir] = 1, sum_r X[i0][ir] <= 2 - k.
/// Vector (i, r) has index i(k+1) + r; slot 0 is the vertex's anchor vector.
struct SdpProblem {
  UgInstance instance;
  std::size_t dim = 0;
  std::vector<PairCoefficient> objective;
  double constant = 0.0;
  std::vector<VertexConstraint> vertex_constraints;

  std::size_t slot(Vertex i, std::size_t r) const { return i * (instance.k() + 1) + r; }

  double coefficient(std::size_t a, std::size_t b) const {
    if (a > b) std::swap(a, b);
    for (const auto& c : objective)
      if (c.a == a && c.b == b) return c.value;
    return 0.0;
  }
};

inline SdpProblem build_sdp(const UgInstance& inst) {
  const std::size_t k = inst.k();
  SdpProblem prob{inst, (k + 1) * inst.n(), {}, 0.0, {}};

  // Each edge contributes (w/4)(1 + x(i0,ir) + x(j0,js) + x(ir,js)) per
  // label, s = sigma(r). A linear weight c on x(a,b) is c/2 in each of
  // C[a][b] and C[b][a].
  std::map<std::pair<std::size_t, std::size_t>, double> entries;
  auto add = [&](std::size_t a, std::size_t b, double c) {
    entries[{std::min(a, b), std::max(a, b)}] += 0.5 * c;
  };
  for (const Edge& e : inst.edges()) {
    const double quarter = 0.25 * e.w;
    prob.constant += quarter * static_cast<double>(k);
    for (Label r = 0; r < k; ++r) {
      const Label s = e.sigma(r);
      add(prob.slot(e.i, 0), prob.slot(e.i, r + 1), quarter);
      add(prob.slot(e.j, 0), prob.slot(e.j, s + 1), quarter);
      add(prob.slot(e.i, r + 1), prob.slot(e.j, s + 1), quarter);
    }
  }
  prob.objective.reserve(entries.size());
  for (const auto& [ab, c] : entries) prob.objective.push_back({ab.first, ab.second, c});

  for (Vertex i = 0; i < inst.n(); ++i) {
    VertexConstraint con{i, prob.slot(i, 0), {}, 2.0 - static_cast<double>(k)};
    for (Label r = 0; r < k; ++r) con.slots.push_back(prob.slot(i, r + 1));
    prob.vertex_constraints.push_back(std::move(con));
  }
  return prob;
}

struct Residuals {
  double max_norm_deviation = 0.0;  // max | ||v_u|| - 1 |
  double max_violation = 0.0;       // max (sum_r X[i0][ir] - bound)_+
  double max_slack = 0.0;           // max | sum_r X[i0][ir] - bound |, tightness
  bool psd_by_construction = true;  // X = V V^T with finite V
  bool pass = true;
};

/// Factor V (dim x rank, row-major) of a Gram matrix X = V V^T.
struct GramSolution {
  std::size_t dim = 0;
  std::size_t rank = 0;
  std::vector<double> factors;
  double objective = 0.0;
  Residuals residuals;
  bool converged = true;
  std::size_t iterations = 0;

  std::span<const double> row(std::size_t u) const { return {factors.data() + u * rank, rank}; }

  double inner(std::size_t a, std::size_t b) const {
    double dot = 0.0;
    for (std::size_t c = 0; c < rank; ++c) dot += factors[a * rank + c] * factors[b * rank + c];
    return dot;
  }
};

namespace detail {

inline double dot(std::span<const double> x, std::span<const double> y) {
  double sum = 0.0;
  for (std::size_t c = 0; c < x.size(); ++c) sum += x[c] * y[c];
  return sum;
}

inline double objective_at(const SdpProblem& prob, const std::vector<double>& v, std::size_t rank) {
  const std::span<const double> all(v);
  double total = prob.constant;
  for (const auto& c : prob.objective)
    total += 2.0 * c.value * dot(all.subspan(c.a * rank, rank), all.subspan(c.b * rank, rank));
  return total;
}

// g_i = sum_r <v_anchor, v_slot> - bound, per vertex.
inline std::vector<double> constraint_values(const SdpProblem& prob, const std::vector<double>& v,
                                             std::size_t rank) {
  const std::span<const double> all(v);
  std::vector<double> g;
  g.reserve(prob.vertex_constraints.size());
  for (const auto& con : prob.vertex_constraints) {
    double sum = 0.0;
    for (const std::size_t s : con.slots)
      sum += dot(all.subspan(con.anchor * rank, rank), all.subspan(s * rank, rank));
    g.push_back(sum - con.bound);
  }
  return g;
}

inline void normalize_rows(std::vector<double>& v, std::size_t rank) {
  for (std::size_t off = 0; off < v.size(); off += rank) {
    double norm = 0.0;
    for (std::size_t c = 0; c < rank; ++c) norm += v[off + c] * v[off + c];
    norm = std::sqrt(norm);
    if (norm == 0.0) {
      v[off] = 1.0;
      continue;
    }
    for (std::size_t c = 0; c < rank; ++c) v[off + c] /= norm;
  }
}

}  // namespace detail

inline void check_dimensions(const GramSolution& sol, const SdpProblem& prob) {
  if (sol.dim != prob.dim || sol.factors.size() != sol.dim * sol.rank || sol.rank == 0) {
    throw Error(ErrorKind::DimensionMismatch, "solution of dimension " + std::to_string(sol.dim) +
                                                  " for problem of dimension " +
                                                  std::to_string(prob.dim));
  }
}

inline Residuals check_feasibility(const GramSolution& sol, const SdpProblem& prob) {
  check_dimensions(sol, prob);
  Residuals res;
  for (const double x : sol.factors)
    if (!std::isfinite(x)) res.psd_by_construction = false;
  for (std::size_t u = 0; u < sol.dim; ++u) {
    const double norm = std::sqrt(detail::dot(sol.row(u), sol.row(u)));
    res.max_norm_deviation = std::max(res.max_norm_deviation, std::abs(norm - 1.0));
  }
  for (const double g : detail::constraint_values(prob, sol.factors, sol.rank)) {
    res.max_violation = std::max(res.max_violation, std::max(g, 0.0));
    res.max_slack = std::max(res.max_slack, std::abs(g));
  }
  res.pass = res.psd_by_construction && res.max_norm_deviation <= kConstraintTolerance &&
             res.max_violation <= kConstraintTolerance;
  return res;
}

/// Objective of an arbitrary factor, for hand-built solutions.
inline double objective_value(const SdpProblem& prob, const GramSolution& sol) {
  check_dimensions(sol, prob);
  return detail::objective_at(prob, sol.factors, sol.rank);
}

/// Rank-1 embedding of a labeling: v_i0 = +1, v_ir = +1 at the assigned
/// label and -1 elsewhere.
inline GramSolution embed_labeling(const SdpProblem& prob, const Labeling& labeling) {
  check_labeling(prob.instance, labeling);
  GramSolution sol;
  sol.dim = prob.dim;
  sol.rank = 1;
  sol.factors.assign(prob.dim, -1.0);
  for (Vertex i = 0; i < prob.instance.n(); ++i) {
    sol.factors[prob.slot(i, 0)] = 1.0;
    sol.factors[prob.slot(i, labeling.labels[i] + 1)] = 1.0;
  }
  sol.objective = detail::objective_at(prob, sol.factors, 1);
  sol.residuals = check_feasibility(sol, prob);
  return sol;
}

inline GramSolution embed_labeling(const UgInstance& inst, const Labeling& labeling) {
  return embed_labeling(build_sdp(inst), labeling);
}

/// Each vertex takes the label whose vector is most aligned with its anchor.
inline Labeling round_gram(const UgInstance& inst, const GramSolution& sol) {
  const std::size_t k = inst.k();
  if (sol.dim != (k + 1) * inst.n()) throw Error(ErrorKind::DimensionMismatch, "round_gram");
  Labeling out{std::vector<Label>(inst.n(), 0)};
  for (Vertex i = 0; i < inst.n(); ++i) {
    const std::size_t anchor = i * (k + 1);
    double best = -std::numeric_limits<double>::infinity();
    for (Label r = 0; r < k; ++r) {
      const double x = sol.inner(anchor, anchor + r + 1);
      if (x > best) {
        best = x;
        out.labels[i] = r;
      }
    }
  }
  return out;
}

/// p_ir = (1 + <v_i0, v_ir>) / 2, clipped to [0, 1] and renormalized per row.
/// Rows are stochastic exactly when the vertex constraint is tight.
inline ProbAssignment induced_probabilities(const SdpProblem& prob, const GramSolution& sol) {
  check_dimensions(sol, prob);
  const std::size_t n = prob.instance.n();
  const std::size_t k = prob.instance.k();
  std::vector<double> p(n * k);
  for (Vertex i = 0; i < n; ++i) {
    double sum = 0.0;
    for (Label r = 0; r < k; ++r) {
      const double x = sol.inner(prob.slot(i, 0), prob.slot(i, r + 1));
      p[i * k + r] = std::clamp(0.5 * (1.0 + x), 0.0, 1.0);
      sum += p[i * k + r];
    }
    for (Label r = 0; r < k; ++r) {
      p[i * k + r] = sum > 0.0 ? p[i * k + r] / sum : 1.0 / static_cast<double>(k);
    }
    // Put the rounding residue on the largest entry so the row sums to 1.
    double total = 0.0;
    std::size_t largest = 0;
    for (Label r = 0; r < k; ++r) {
      total += p[i * k + r];
      if (p[i * k + r] > p[i * k + largest]) largest = r;
    }
    p[i * k + largest] += 1.0 - total;
  }
  return {n, k, std::move(p)};
}

struct SolveOptions {
  std::size_t rank = 0;  // 0 selects rank = dim
  std::size_t max_iters = 20000;
  double tol = 1e-6;
  std::uint64_t seed = 0;
  std::size_t restarts = 5;
  std::optional<Labeling> warm_start;
  bool conditional_warm_start = true;
  double tie_tolerance = 1e-4;  // starts closer than this count as tied
};

/// One accepted ascent step: the penalty phase it belongs to and the
/// augmented Lagrangian after the step.
struct TracePoint {
  std::size_t phase = 0;
  double merit = 0.0;
};

struct StartReport {
  std::size_t index = 0;
  double objective = 0.0;
  bool feasible = false;
  bool converged = false;
  std::size_t iterations = 0;
};

struct SolveReport {
  GramSolution solution;
  std::size_t chosen = 0;
  std::vector<StartReport> starts;
  std::vector<TracePoint> trace;  // of the chosen start
};

namespace detail {

// Projected gradient ascent on the product of unit spheres for the
// augmented Lagrangian
//   f(V) - sum_i (max(0, l_i + mu g_i)^2 - l_i^2) / (2 mu),
// with multiplier and penalty updates between phases.
class FactorizedAscent {
public:
  FactorizedAscent(const SdpProblem& prob, std::size_t rank, const SolveOptions& opts)
      : prob_(prob), rank_(rank), opts_(opts) {}

  struct Result {
    std::vector<double> best;
    double best_objective = -std::numeric_limits<double>::infinity();
    bool feasible = false;
    bool converged = false;
    std::size_t iterations = 0;
    std::size_t phases = 0;
    std::vector<TracePoint> trace;
  };

  // `seed_point`, when given, is a feasible iterate recorded before ascent
  // begins from `v`.
  Result run(std::vector<double> v, const std::vector<double>* seed_point) {
    Result out;
    if (seed_point) consider(*seed_point, out);
    const std::size_t n = prob_.vertex_constraints.size();
    multipliers_.assign(n, 0.0);
    penalty_ = 10.0;
    double previous_violation = std::numeric_limits<double>::infinity();

    std::vector<double> grad(v.size());
    std::vector<double> trial(v.size());
    std::vector<double> prev_v;
    std::vector<double> prev_grad;

    for (std::size_t phase = 0; out.iterations < opts_.max_iters; ++phase) {
      // Loose inner solves while the multipliers are still moving.
      const double inner_tol = std::max(opts_.tol, 1e-2 * std::pow(0.1, static_cast<double>(phase)));
      bool stationary = false;
      double gnorm = std::numeric_limits<double>::infinity();
      double merit_value = merit(v);
      consider(v, out);
      while (out.iterations < opts_.max_iters) {
        gnorm = tangent_gradient(v, grad);
        if (gnorm <= inner_tol) {
          stationary = true;
          break;
        }
        double step = initial_step(v, grad, prev_v, prev_grad);
        prev_v = v;
        prev_grad = grad;
        bool accepted = false;
        while (step >= 1e-14) {
          for (std::size_t t = 0; t < v.size(); ++t) trial[t] = v[t] + step * grad[t];
          normalize_rows(trial, rank_);
          const double m = merit(trial);
          if (m > merit_value) {
            v.swap(trial);
            merit_value = m;
            accepted = true;
            break;
          }
          step *= 0.5;
        }
        ++out.iterations;
        if (!accepted) {
          // Ascent below machine precision of the merit: as stationary as
          // this arithmetic allows.
          stationary = true;
          gnorm = 0.0;
          break;
        }
        out.trace.push_back({phase, merit_value});
        consider(v, out);
      }

      // KKT check with the shifted multipliers the inner loop just used:
      // primal feasibility and complementary slackness.
      const auto g = constraint_values(prob_, v, rank_);
      double violation = 0.0;
      double complementarity = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        violation = std::max(violation, std::max(g[i], 0.0));
        const double updated = std::max(0.0, multipliers_[i] + penalty_ * g[i]);
        complementarity = std::max(complementarity, updated * std::abs(g[i]));
        multipliers_[i] = updated;
      }
      ++out.phases;
      if (stationary && gnorm <= opts_.tol && violation <= 0.1 * kConstraintTolerance && complementarity <= opts_.tol) {
        out.converged = true;
        break;
      }
      if (violation > 0.25 * previous_violation) penalty_ = std::min(penalty_ * 10.0, 1e7);
      previous_violation = violation;
    }
    return out;
  }

private:
  // Barzilai-Borwein length from the last accepted step, 1.0 when there is
  // no usable curvature estimate. Backtracking halves from here.
  static double initial_step(const std::vector<double>& v, const std::vector<double>& grad,
                             const std::vector<double>& prev_v,
                             const std::vector<double>& prev_grad) {
    if (prev_v.empty()) return 1.0;
    double ss = 0.0;
    double sy = 0.0;
    for (std::size_t t = 0; t < v.size(); ++t) {
      const double s = v[t] - prev_v[t];
      ss += s * s;
      sy += s * (grad[t] - prev_grad[t]);
    }
    if (!(sy < 0.0)) return 1.0;
    return std::clamp(ss / -sy, 1e-6, 1e3);
  }

  void consider(const std::vector<double>& v, Result& out) const {
    const auto g = constraint_values(prob_, v, rank_);
    for (const double gi : g)
      if (gi > kConstraintTolerance) return;
    const double f = objective_at(prob_, v, rank_);
    if (!out.feasible || f > out.best_objective) {
      out.best = v;
      out.best_objective = f;
      out.feasible = true;
    }
  }

  double merit(const std::vector<double>& v) const {
    double m = objective_at(prob_, v, rank_);
    const auto g = constraint_values(prob_, v, rank_);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double shifted = std::max(0.0, multipliers_[i] + penalty_ * g[i]);
      m -= (shifted * shifted - multipliers_[i] * multipliers_[i]) / (2.0 * penalty_);
    }
    return m;
  }

  // Writes the Riemannian gradient of the merit into grad, returns its norm.
  double tangent_gradient(const std::vector<double>& v, std::vector<double>& grad) const {
    std::fill(grad.begin(), grad.end(), 0.0);
    for (const auto& c : prob_.objective) {
      for (std::size_t t = 0; t < rank_; ++t) {
        grad[c.a * rank_ + t] += 2.0 * c.value * v[c.b * rank_ + t];
        grad[c.b * rank_ + t] += 2.0 * c.value * v[c.a * rank_ + t];
      }
    }
    const auto g = constraint_values(prob_, v, rank_);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double force = std::max(0.0, multipliers_[i] + penalty_ * g[i]);
      if (force == 0.0) continue;
      const auto& con = prob_.vertex_constraints[i];
      for (const std::size_t s : con.slots) {
        for (std::size_t t = 0; t < rank_; ++t) {
          grad[con.anchor * rank_ + t] -= force * v[s * rank_ + t];
          grad[s * rank_ + t] -= force * v[con.anchor * rank_ + t];
        }
      }
    }
    double norm2 = 0.0;
    for (std::size_t off = 0; off < v.size(); off += rank_) {
      double radial = 0.0;
      for (std::size_t t = 0; t < rank_; ++t) radial += grad[off + t] * v[off + t];
      for (std::size_t t = 0; t < rank_; ++t) {
        grad[off + t] -= radial * v[off + t];
        norm2 += grad[off + t] * grad[off + t];
      }
    }
    return std::sqrt(norm2);
  }

  const SdpProblem& prob_;
  std::size_t rank_;
  const SolveOptions& opts_;
  std::vector<double> multipliers_;
  double penalty_ = 10.0;
};

inline std::vector<double> random_factor(std::size_t dim, std::size_t rank, Rng& rng) {
  std::vector<double> v(dim * rank);
  for (double& x : v) x = rng.normal();
  normalize_rows(v, rank);
  return v;
}

// Rank-1 embedding padded with zero columns.
inline std::vector<double> padded_embedding(const SdpProblem& prob, const Labeling& labeling,
                                            std::size_t rank) {
  const GramSolution rank1 = embed_labeling(prob, labeling);
  std::vector<double> v(prob.dim * rank, 0.0);
  for (std::size_t u = 0; u < prob.dim; ++u) v[u * rank] = rank1.factors[u];
  return v;
}

// Label with the smallest anchor product per vertex.
inline Labeling anchor_argmin(const UgInstance& inst, const GramSolution& sol) {
  const std::size_t stride = inst.k() + 1;
  Labeling out{std::vector<Label>(inst.n(), 0)};
  for (Vertex i = 0; i < inst.n(); ++i) {
    double low = sol.inner(i * stride, i * stride + 1);
    for (Label r = 1; r < inst.k(); ++r) {
      const double x = sol.inner(i * stride, i * stride + r + 1);
      if (x < low) {
        low = x;
        out.labels[i] = r;
      }
    }
  }
  return out;
}

// Moves single vertices to their best label given the rest until no move
// gains. Never lowers the value.
inline Labeling improve_locally(const UgInstance& inst, Labeling labeling) {
  std::vector<std::vector<std::size_t>> incident(inst.n());
  std::vector<Permutation> inverse;
  for (std::size_t t = 0; t < inst.m(); ++t) {
    const Edge& e = inst.edges()[t];
    incident[e.i].push_back(t);
    incident[e.j].push_back(t);
    inverse.push_back(e.sigma.inverse());
  }
  std::vector<double> gain(inst.k());
  for (bool moved = true; moved;) {
    moved = false;
    for (Vertex i = 0; i < inst.n(); ++i) {
      std::fill(gain.begin(), gain.end(), 0.0);
      for (const std::size_t t : incident[i]) {
        const Edge& e = inst.edges()[t];
        if (e.i == i) gain[inverse[t](labeling.labels[e.j])] += e.w;
        else gain[e.sigma(labeling.labels[e.i])] += e.w;
      }
      const auto best = static_cast<Label>(std::max_element(gain.begin(), gain.end()) - gain.begin());
      if (gain[best] > gain[labeling.labels[i]]) {
        labeling.labels[i] = best;
        moved = true;
      }
    }
  }
  return labeling;
}

}  // namespace detail

/// Low-rank factorized ascent with multi-start. Start indices: 0 is the
/// caller's warm start (if any), 1 the conditional-expectation warm start (if
/// enabled), then the random restarts. The highest feasible objective wins;
/// a later start must beat the incumbent by more than tie_tolerance.
inline SolveReport solve_sdp_report(const SdpProblem& prob, const SolveOptions& opts = {}) {
  if (prob.dim == 0) {
    GramSolution empty;
    empty.rank = 1;
    empty.objective = prob.constant;
    return {empty, 0, {}, {}};
  }
  const std::size_t rank = opts.rank == 0 ? prob.dim : std::min(opts.rank, prob.dim);
  detail::FactorizedAscent ascent(prob, rank, opts);
  Rng rng(opts.seed);

  struct Candidate {
    std::size_t index;
    detail::FactorizedAscent::Result result;
  };
  std::vector<Candidate> candidates;

  // Warm starts are recorded exactly, then ascended from a small
  // perturbation: a rank-1 embedding is itself a critical point. The
  // embedding is kept unless the ascent beats it by more than the tie
  // tolerance.
  auto warm = [&](std::size_t index, const Labeling& labeling) {
    const auto exact = detail::padded_embedding(prob, labeling, rank);
    auto start = exact;
    for (double& x : start) x += 1e-3 * rng.normal();
    detail::normalize_rows(start, rank);
    auto result = ascent.run(std::move(start), &exact);
    const double exact_objective = detail::objective_at(prob, exact, rank);
    if (result.best_objective <= exact_objective + opts.tie_tolerance) {
      result.best = exact;
      result.best_objective = exact_objective;
    }
    candidates.push_back({index, std::move(result)});
  };

  if (opts.warm_start) warm(0, *opts.warm_start);

  std::vector<Candidate> randoms;
  for (std::size_t s = 0; s < opts.restarts; ++s) {
    randoms.push_back({2 + s, ascent.run(detail::random_factor(prob.dim, rank, rng), nullptr)});
  }

  if (opts.conditional_warm_start) {
    const UgInstance& inst = prob.instance;
    Labeling pick = detail::improve_locally(inst, round_conditional(inst, ProbAssignment::uniform(inst.n(), inst.k())));
    auto offer = [&](const Labeling& labeling) {
      const Labeling polished = detail::improve_locally(inst, labeling);
      if (value(inst, polished) > value(inst, pick)) pick = polished;
    };
    // The optimal face is large, so a restart's labels may sit at either
    // extreme of the anchor products; read them both ways.
    for (const auto& c : randoms) {
      if (!c.result.feasible) continue;
      GramSolution probe{prob.dim, rank, c.result.best, 0.0, {}, true, 0};
      offer(round_conditional(inst, induced_probabilities(prob, probe)));
      offer(round_gram(inst, probe));
      offer(detail::anchor_argmin(inst, probe));
    }
    warm(1, pick);
  }
  for (auto& c : randoms) candidates.push_back(std::move(c));

  SolveReport report;
  const Candidate* best = nullptr;
  for (const auto& c : candidates) {
    report.starts.push_back({c.index, c.result.best_objective, c.result.feasible,
                             c.result.converged, c.result.iterations});
    if (!c.result.feasible) continue;
    if (!best || c.result.best_objective > best->result.best_objective + opts.tie_tolerance) best = &c;
  }

  GramSolution& sol = report.solution;
  sol.dim = prob.dim;
  sol.rank = rank;
  if (best) {
    report.chosen = best->index;
    report.trace = best->result.trace;
    sol.factors = best->result.best;
    sol.converged = best->result.converged;
    sol.iterations = best->result.iterations;
  } else {
    // Nothing feasible: hand back a normalized random point, flagged.
    sol.factors = detail::random_factor(prob.dim, rank, rng);
    sol.converged = false;
  }
  sol.objective = detail::objective_at(prob, sol.factors, rank);
  sol.residuals = check_feasibility(sol, prob);
  return report;
}

inline GramSolution solve_sdp(const SdpProblem& prob, const SolveOptions& opts = {}) {
  return solve_sdp_report(prob, opts).solution;
}

}  // namespace ugbound
