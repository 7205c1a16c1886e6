#pragma once

#include <cstddef>
#include <cstdint>
#include <future>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ugbound/error.hpp"
#include "ugbound/instance.hpp"

namespace ugbound {

/// One label per vertex.
struct Labeling {
  std::vector<Label> labels;

  friend bool operator==(const Labeling&, const Labeling&) = default;
  friend auto operator<=>(const Labeling&, const Labeling&) = default;
};

inline void check_labeling(const UgInstance& inst, const Labeling& labeling) {
  if (labeling.labels.size() != inst.n()) {
    throw Error(ErrorKind::DimensionMismatch, "labeling has " +
                                                  std::to_string(labeling.labels.size()) +
                                                  " entries for n = " + std::to_string(inst.n()));
  }
  for (const Label r : labeling.labels) {
    if (r >= inst.k()) throw Error(ErrorKind::DimensionMismatch, "label " + std::to_string(r));
  }
}

inline bool is_matched(const Edge& e, const Labeling& labeling) {
  return labeling.labels[e.j] == e.sigma(labeling.labels[e.i]);
}

/// Total weight of matched edges.
inline double value(const UgInstance& inst, const Labeling& labeling) {
  check_labeling(inst, labeling);
  double total = 0.0;
  for (const Edge& e : inst.edges())
    if (is_matched(e, labeling)) total += e.w;
  return total;
}

struct ExactResult {
  Labeling labeling;
  double value = 0.0;
};

/// k^n, or nullopt if it does not fit in 64 bits.
inline std::optional<std::uint64_t> labeling_count(std::size_t n, std::size_t k) {
  std::uint64_t count = 1;
  for (std::size_t v = 0; v < n; ++v) {
    if (count > std::numeric_limits<std::uint64_t>::max() / k) return std::nullopt;
    count *= k;
  }
  return count;
}

namespace detail {

inline void check_budget(const UgInstance& inst, std::uint64_t limit) {
  const auto count = labeling_count(inst.n(), inst.k());
  if (!count || *count > limit) {
    const std::string size = count ? std::to_string(*count)
                                   : std::to_string(inst.k()) + "^" + std::to_string(inst.n());
    throw Error(ErrorKind::BudgetExceeded,
                "k^n = " + size + " exceeds limit " + std::to_string(limit));
  }
}

// Scans every labeling whose first `fixed` entries equal prefix, in
// lexicographic order (mixed radix, vertex 0 most significant). The first
// strict maximum wins.
inline ExactResult scan(const UgInstance& inst, std::vector<Label> prefix) {
  const std::size_t n = inst.n();
  const std::size_t k = inst.k();
  const std::size_t fixed = prefix.size();
  Labeling current{std::move(prefix)};
  current.labels.resize(n, 0);

  ExactResult best{current, value(inst, current)};
  if (fixed == n) return best;
  for (;;) {
    std::size_t pos = n;
    while (pos > fixed) {
      --pos;
      if (++current.labels[pos] < k) break;
      current.labels[pos] = 0;
      if (pos == fixed) return best;
    }
    const double v = value(inst, current);
    if (v > best.value) best = {current, v};
  }
}

}  // namespace detail

/// Exhaustive maximum over all k^n labelings; ties go to the
/// lexicographically smallest labeling. Throws BudgetExceeded if k^n > limit.
inline ExactResult solve_exact(const UgInstance& inst, std::uint64_t limit) {
  detail::check_budget(inst, limit);
  return detail::scan(inst, {});
}

/// Same result as solve_exact, with one task per label of vertex 0.
inline ExactResult solve_exact_partitioned(const UgInstance& inst, std::uint64_t limit) {
  detail::check_budget(inst, limit);
  if (inst.n() == 0) return detail::scan(inst, {});
  std::vector<std::future<ExactResult>> parts;
  for (Label r = 0; r < inst.k(); ++r) {
    parts.push_back(std::async(std::launch::async, [&inst, r] { return detail::scan(inst, {r}); }));
  }
  ExactResult best = parts.front().get();
  for (std::size_t r = 1; r < parts.size(); ++r) {
    ExactResult part = parts[r].get();
    if (part.value > best.value) best = std::move(part);
  }
  return best;
}

}  // namespace ugbound
