#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ugbound/error.hpp"
#include "ugbound/exact.hpp"
#include "ugbound/instance.hpp"
#include "ugbound/rng.hpp"

namespace ugbound {

inline constexpr double kRowSumTolerance = 1e-12;

namespace detail {

// Dense n x k row-major matrix shared by the two assignment types.
class LabelMatrix {
public:
  LabelMatrix(std::size_t n, std::size_t k, std::vector<double> data)
      : n_(n), k_(k), data_(std::move(data)) {
    if (data_.size() != n_ * k_) {
      throw Error(ErrorKind::DimensionMismatch, std::to_string(data_.size()) +
                                                    " entries for " + std::to_string(n_) + " x " +
                                                    std::to_string(k_));
    }
  }

  std::size_t n() const noexcept { return n_; }
  std::size_t k() const noexcept { return k_; }
  double operator()(Vertex i, Label r) const { return data_[i * k_ + r]; }
  std::span<const double> row(Vertex i) const { return {data_.data() + i * k_, k_}; }
  const std::vector<double>& data() const noexcept { return data_; }

protected:
  void check_rows(double lo, double hi, double row_sum, const char* what) const {
    for (Vertex i = 0; i < n_; ++i) {
      double sum = 0.0;
      for (const double x : row(i)) {
        if (!(x >= lo && x <= hi)) {
          throw Error(ErrorKind::InvariantViolation, std::string(what) + " entry out of range in row " +
                                                         std::to_string(i));
        }
        sum += x;
      }
      if (std::abs(sum - row_sum) > kRowSumTolerance) {
        throw Error(ErrorKind::InvariantViolation,
                    std::string(what) + " row " + std::to_string(i) + " sums to " +
                        std::to_string(sum) + ", expected " + std::to_string(row_sum));
      }
    }
  }

private:
  std::size_t n_;
  std::size_t k_;
  std::vector<double> data_;
};

}  // namespace detail

/// Row-stochastic n x k matrix: row i is the label distribution of vertex i.
class ProbAssignment : public detail::LabelMatrix {
public:
  ProbAssignment(std::size_t n, std::size_t k, std::vector<double> p)
      : LabelMatrix(n, k, std::move(p)) {
    check_rows(0.0, 1.0, 1.0, "probability");
  }

  static ProbAssignment uniform(std::size_t n, std::size_t k) {
    return {n, k, std::vector<double>(n * k, 1.0 / static_cast<double>(k))};
  }

  static ProbAssignment one_hot(std::size_t k, const Labeling& labeling) {
    const std::size_t n = labeling.labels.size();
    std::vector<double> p(n * k, 0.0);
    for (Vertex i = 0; i < n; ++i) p[i * k + labeling.labels[i]] = 1.0;
    return {n, k, std::move(p)};
  }
};

/// y = 2p - 1. Entries in [-1, 1], each row sums to 2 - k.
class YAssignment : public detail::LabelMatrix {
public:
  YAssignment(std::size_t n, std::size_t k, std::vector<double> y)
      : LabelMatrix(n, k, std::move(y)) {
    check_rows(-1.0, 1.0, 2.0 - static_cast<double>(this->k()), "y");
  }
};

inline ProbAssignment from_y(const YAssignment& y) {
  std::vector<double> p(y.data().size());
  for (std::size_t t = 0; t < p.size(); ++t) p[t] = 0.5 * (1.0 + y.data()[t]);
  return {y.n(), y.k(), std::move(p)};
}

inline YAssignment to_y(const ProbAssignment& p) {
  std::vector<double> y(p.data().size());
  for (std::size_t t = 0; t < y.size(); ++t) y[t] = 2.0 * p.data()[t] - 1.0;
  return {p.n(), p.k(), std::move(y)};
}

namespace detail {

template <class Matrix>
void check_shape(const UgInstance& inst, const Matrix& a) {
  if (a.n() != inst.n() || a.k() != inst.k()) {
    throw Error(ErrorKind::DimensionMismatch,
                std::to_string(a.n()) + " x " + std::to_string(a.k()) + " assignment for n = " +
                    std::to_string(inst.n()) + ", k = " + std::to_string(inst.k()));
  }
}

inline double edge_match_prob_unchecked(const ProbAssignment& p, const Edge& e) {
  double rho = 0.0;
  for (Label r = 0; r < p.k(); ++r) rho += p(e.i, r) * p(e.j, e.sigma(r));
  return rho;
}

}  // namespace detail

/// Probability that independent draws from p match edge e.
inline double edge_match_prob(const UgInstance& inst, const ProbAssignment& p, const Edge& e) {
  detail::check_shape(inst, p);
  return detail::edge_match_prob_unchecked(p, e);
}

inline double expected_value(const UgInstance& inst, const ProbAssignment& p) {
  detail::check_shape(inst, p);
  double total = 0.0;
  for (const Edge& e : inst.edges()) total += e.w * detail::edge_match_prob_unchecked(p, e);
  return total;
}

/// Sum over r of y_i[r] * y_j[sigma(r)]. Generic so that +-1 rows can be
/// evaluated in integer arithmetic.
template <class T>
T signed_product_sum(std::span<const T> yi, std::span<const T> yj, const Permutation& sigma) {
  T sum{};
  for (Label r = 0; r < sigma.size(); ++r) sum += yi[r] * yj[sigma(r)];
  return sum;
}

/// Expected matched weight written in y coordinates:
/// (1/4) sum_e w sum_r (1 + y_ir + y_js + y_ir y_js), s = sigma(r).
inline double expected_value_y(const UgInstance& inst, const YAssignment& y) {
  detail::check_shape(inst, y);
  double total = 0.0;
  for (const Edge& e : inst.edges()) {
    double edge = 0.0;
    for (Label r = 0; r < inst.k(); ++r) {
      const double a = y(e.i, r);
      const double b = y(e.j, e.sigma(r));
      edge += 1.0 + a + b + a * b;
    }
    total += 0.25 * e.w * edge;
  }
  return total;
}

/// Independent inverse-CDF draw per vertex, vertices in index order.
inline Labeling sample(const UgInstance& inst, const ProbAssignment& p, std::uint64_t seed) {
  detail::check_shape(inst, p);
  Rng rng(seed);
  Labeling out{std::vector<Label>(inst.n(), 0)};
  for (Vertex i = 0; i < inst.n(); ++i) {
    const double u = rng.uniform();
    double cumulative = 0.0;
    Label chosen = inst.k();
    Label last_positive = 0;
    for (Label r = 0; r < inst.k(); ++r) {
      if (p(i, r) > 0.0) last_positive = r;
      cumulative += p(i, r);
      if (chosen == inst.k() && p(i, r) > 0.0 && u < cumulative) chosen = r;
    }
    // Rounding can leave the cumulative sum just below u.
    out.labels[i] = chosen == inst.k() ? last_positive : chosen;
  }
  return out;
}

/// Method of conditional expectations. Vertices are fixed in index order,
/// each to the label maximizing the expectation given the vertices already
/// fixed (ties to the lowest label). The result has value >= E[z] under p.
inline Labeling round_conditional(const UgInstance& inst, const ProbAssignment& p) {
  detail::check_shape(inst, p);
  const std::size_t n = inst.n();
  const std::size_t k = inst.k();

  std::vector<std::vector<std::size_t>> incident(n);
  for (std::size_t e = 0; e < inst.m(); ++e) {
    incident[inst.edges()[e].i].push_back(e);
    incident[inst.edges()[e].j].push_back(e);
  }

  std::vector<double> q = p.data();
  Labeling out{std::vector<Label>(n, 0)};
  for (Vertex v = 0; v < n; ++v) {
    Label best = 0;
    double best_gain = 0.0;
    for (Label r = 0; r < k; ++r) {
      // Only edges touching v depend on its row.
      double gain = 0.0;
      for (const std::size_t idx : incident[v]) {
        const Edge& e = inst.edges()[idx];
        if (e.i == v) {
          gain += e.w * q[e.j * k + e.sigma(r)];
        } else {
          double mass = 0.0;
          for (Label s = 0; s < k; ++s)
            if (e.sigma(s) == r) mass = q[e.i * k + s];
          gain += e.w * mass;
        }
      }
      if (r == 0 || gain > best_gain) {
        best = r;
        best_gain = gain;
      }
    }
    for (Label r = 0; r < k; ++r) q[v * k + r] = r == best ? 1.0 : 0.0;
    out.labels[v] = best;
  }
  return out;
}

/// (1/2) sum w (1 - y_i y_j) over a weighted graph, y_i in [-1, 1].
inline double maxcut_objective(const std::vector<WeightedPair>& graph, std::span<const double> y1) {
  for (std::size_t i = 0; i < y1.size(); ++i) {
    if (!(std::abs(y1[i]) <= 1.0)) {
      throw Error(ErrorKind::RangeViolation, "y[" + std::to_string(i) + "] outside [-1, 1]");
    }
  }
  double total = 0.0;
  for (const auto& [i, j, w] : graph) {
    if (i >= y1.size() || j >= y1.size()) {
      throw Error(ErrorKind::DimensionMismatch, "edge endpoint beyond y vector");
    }
    total += 0.5 * w * (1.0 - y1[i] * y1[j]);
  }
  return total;
}

}  // namespace ugbound
