#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ugbound/error.hpp"
#include "ugbound/rng.hpp"

namespace ugbound {

using Vertex = std::size_t;
using Label = std::size_t;

/// Bijection on {0, ..., k-1}. at(r) is the label of the head vertex that
/// matches label r of the tail vertex.
class Permutation {
public:
  Permutation() = default;

  explicit Permutation(std::vector<Label> map) : map_(std::move(map)) {
    std::vector<bool> seen(map_.size(), false);
    for (const Label s : map_) {
      if (s >= map_.size() || seen[s]) {
        throw Error(ErrorKind::NonBijectivePermutation,
                    "value " + std::to_string(s) + " repeated or out of range");
      }
      seen[s] = true;
    }
  }

  static Permutation identity(std::size_t k) {
    std::vector<Label> map(k);
    std::iota(map.begin(), map.end(), Label{0});
    return Permutation(std::move(map));
  }

  Label operator()(Label r) const { return map_[r]; }
  std::size_t size() const noexcept { return map_.size(); }
  const std::vector<Label>& map() const noexcept { return map_; }

  Permutation inverse() const {
    std::vector<Label> inv(map_.size());
    for (Label r = 0; r < map_.size(); ++r) inv[map_[r]] = r;
    return Permutation(std::move(inv));
  }

  friend bool operator==(const Permutation&, const Permutation&) = default;

private:
  std::vector<Label> map_;
};

/// Directed constraint: matched iff label(j) == sigma(label(i)).
struct Edge {
  Vertex i = 0;
  Vertex j = 0;
  double w = 1.0;
  Permutation sigma;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct WeightedPair {
  Vertex i = 0;
  Vertex j = 0;
  double w = 1.0;
};

/// Checks every instance invariant and throws the matching Error.
inline void validate(std::size_t n, std::size_t k, const std::vector<Edge>& edges) {
  if (k < 2) throw Error(ErrorKind::TooFewLabels, "k = " + std::to_string(k));
  std::vector<std::pair<Vertex, Vertex>> pairs;
  pairs.reserve(edges.size());
  for (const Edge& e : edges) {
    const auto where = "edge (" + std::to_string(e.i) + ", " + std::to_string(e.j) + ")";
    if (e.i >= n || e.j >= n) throw Error(ErrorKind::VertexOutOfRange, where);
    if (e.i == e.j) throw Error(ErrorKind::SelfLoop, where);
    if (!(e.w > 0.0)) throw Error(ErrorKind::NonPositiveWeight, where);
    if (e.sigma.size() != k) {
      throw Error(ErrorKind::PermutationLength,
                  where + " has " + std::to_string(e.sigma.size()) + " entries");
    }
    // Permutation enforces bijectivity on construction; recheck for
    // default-constructed or moved-from values.
    Permutation recheck(e.sigma.map());
    pairs.emplace_back(std::min(e.i, e.j), std::max(e.i, e.j));
  }
  std::sort(pairs.begin(), pairs.end());
  const auto dup = std::adjacent_find(pairs.begin(), pairs.end());
  if (dup != pairs.end()) {
    throw Error(ErrorKind::DuplicateEdge, "pair {" + std::to_string(dup->first) +
                                              ", " + std::to_string(dup->second) + "}");
  }
}

/// Weighted unique-games constraint graph. Immutable once constructed; edges
/// are kept sorted by (i, j) as stored.
class UgInstance {
public:
  UgInstance(std::size_t n, std::size_t k, std::vector<Edge> edges)
      : n_(n), k_(k), edges_(std::move(edges)) {
    validate(n_, k_, edges_);
    std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
      return std::pair(a.i, a.j) < std::pair(b.i, b.j);
    });
  }

  std::size_t n() const noexcept { return n_; }
  std::size_t k() const noexcept { return k_; }
  std::size_t m() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  double total_weight() const {
    double total = 0.0;
    for (const Edge& e : edges_) total += e.w;
    return total;
  }

  friend bool operator==(const UgInstance&, const UgInstance&) = default;

private:
  std::size_t n_;
  std::size_t k_;
  std::vector<Edge> edges_;
};

inline void validate(const UgInstance& inst) { validate(inst.n(), inst.k(), inst.edges()); }

namespace detail {

inline std::vector<std::pair<Vertex, Vertex>> sample_pairs(std::size_t n, std::size_t m,
                                                           Rng& rng) {
  const std::size_t available = n < 2 ? 0 : n * (n - 1) / 2;
  if (m > available) {
    throw Error(ErrorKind::TooManyEdges, std::to_string(m) + " edges requested, " +
                                             std::to_string(available) + " pairs exist");
  }
  std::vector<std::pair<Vertex, Vertex>> pairs;
  pairs.reserve(available);
  for (Vertex i = 0; i < n; ++i)
    for (Vertex j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  // Partial Fisher-Yates: the first m slots are a uniform m-subset.
  for (std::size_t t = 0; t < m; ++t) {
    const auto pick = t + static_cast<std::size_t>(rng.below(available - t));
    std::swap(pairs[t], pairs[pick]);
  }
  pairs.resize(m);
  return pairs;
}

inline Permutation random_permutation(std::size_t k, Rng& rng) {
  std::vector<Label> map(k);
  std::iota(map.begin(), map.end(), Label{0});
  rng.shuffle(std::span<Label>(map));
  return Permutation(std::move(map));
}

}  // namespace detail

/// m distinct vertex pairs, uniform permutations, unit weights.
inline UgInstance generate_random(std::size_t n, std::size_t k, std::size_t m,
                                  std::uint64_t seed) {
  if (k < 2) throw Error(ErrorKind::TooFewLabels, "k = " + std::to_string(k));
  Rng rng(seed);
  auto pairs = detail::sample_pairs(n, m, rng);
  std::vector<Edge> edges;
  edges.reserve(m);
  for (const auto& [i, j] : pairs) edges.push_back({i, j, 1.0, detail::random_permutation(k, rng)});
  return UgInstance(n, k, std::move(edges));
}

struct PlantedInstance {
  UgInstance instance;
  std::vector<Label> labels;
};

/// Like generate_random, but every permutation is conditioned to match a
/// hidden uniform labeling, so the optimum equals the total weight.
inline PlantedInstance generate_planted(std::size_t n, std::size_t k, std::size_t m,
                                        std::uint64_t seed) {
  if (k < 2) throw Error(ErrorKind::TooFewLabels, "k = " + std::to_string(k));
  Rng rng(seed);
  std::vector<Label> labels(n);
  for (auto& label : labels) label = static_cast<Label>(rng.below(k));
  auto pairs = detail::sample_pairs(n, m, rng);
  std::vector<Edge> edges;
  edges.reserve(m);
  for (const auto& [i, j] : pairs) {
    std::vector<Label> map(k);
    std::iota(map.begin(), map.end(), Label{0});
    rng.shuffle(std::span<Label>(map));
    const auto pos = static_cast<std::size_t>(std::find(map.begin(), map.end(), labels[j]) - map.begin());
    std::swap(map[pos], map[labels[i]]);
    edges.push_back({i, j, 1.0, Permutation(std::move(map))});
  }
  return {UgInstance(n, k, std::move(edges)), std::move(labels)};
}

/// k = 2 encoding of maxcut: every edge carries the swap, so an edge is
/// matched exactly when its endpoints take different labels.
inline UgInstance from_maxcut(std::size_t n, const std::vector<WeightedPair>& graph) {
  std::vector<Edge> edges;
  edges.reserve(graph.size());
  for (const auto& [i, j, w] : graph) edges.push_back({i, j, w, Permutation({1, 0})});
  return UgInstance(n, 2, std::move(edges));
}

/// Random simple graph with m unit-weight edges, for maxcut corpora.
inline std::vector<WeightedPair> random_graph(std::size_t n, std::size_t m, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<WeightedPair> graph;
  for (const auto& [i, j] : detail::sample_pairs(n, m, rng)) graph.push_back({i, j, 1.0});
  return graph;
}

// ---------------------------------------------------------------------------
// Text format
//
//   UG 1
//   <n> <k>
//   <m>
//   <i> <j> <w> <s1> ... <sk>      (m lines, 1-based vertices and labels)
//
// Lines whose first non-blank character is '#' are comments; blank lines are
// ignored.

namespace detail {

inline std::string format_real(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

struct LineReader {
  std::istringstream in;
  std::size_t line_no = 0;

  explicit LineReader(std::string_view text) : in(std::string(text)) {}

  // Next non-comment, non-blank line; false at end of input.
  bool next(std::string& line) {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const auto first = line.find_first_not_of(" \t");
      if (first == std::string::npos || line[first] == '#') continue;
      return true;
    }
    return false;
  }
};

inline std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  while (pos < line.size()) {
    const auto start = line.find_first_not_of(" \t", pos);
    if (start == std::string_view::npos) break;
    auto end = line.find_first_of(" \t", start);
    if (end == std::string_view::npos) end = line.size();
    tokens.push_back(line.substr(start, end - start));
    pos = end;
  }
  return tokens;
}

inline std::size_t parse_count(std::string_view token, std::size_t line) {
  std::size_t value = 0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
    throw ParseError(line, "expected a nonnegative integer, got '" + std::string(token) + "'");
  }
  return value;
}

inline double parse_real(std::string_view token, std::size_t line) {
  double value = 0.0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
    throw ParseError(line, "expected a real number, got '" + std::string(token) + "'");
  }
  return value;
}

}  // namespace detail

/// Canonical text: edges in (i, j) order, shortest round-trip weights.
inline std::string write(const UgInstance& inst) {
  std::string out = "UG 1\n";
  out += std::to_string(inst.n()) + " " + std::to_string(inst.k()) + "\n";
  out += std::to_string(inst.m()) + "\n";
  for (const Edge& e : inst.edges()) {
    out += std::to_string(e.i + 1) + " " + std::to_string(e.j + 1) + " " + detail::format_real(e.w);
    for (const Label s : e.sigma.map()) out += " " + std::to_string(s + 1);
    out += "\n";
  }
  return out;
}

inline UgInstance read(std::string_view text) {
  detail::LineReader reader(text);
  std::string line;

  if (!reader.next(line)) throw ParseError(reader.line_no + 1, "missing 'UG' header");
  auto tokens = detail::split(line);
  if (tokens.size() != 2 || tokens[0] != "UG") {
    throw ParseError(reader.line_no, "expected header 'UG 1'");
  }
  if (tokens[1] != "1") {
    throw Error(ErrorKind::UnsupportedVersion, "line " + std::to_string(reader.line_no) +
                                                   ": version " + std::string(tokens[1]));
  }

  if (!reader.next(line)) throw ParseError(reader.line_no + 1, "missing '<n> <k>' line");
  tokens = detail::split(line);
  if (tokens.size() != 2) throw ParseError(reader.line_no, "expected '<n> <k>'");
  const std::size_t n = detail::parse_count(tokens[0], reader.line_no);
  const std::size_t k = detail::parse_count(tokens[1], reader.line_no);
  if (k < 2) throw Error(ErrorKind::TooFewLabels, "line " + std::to_string(reader.line_no));

  if (!reader.next(line)) throw ParseError(reader.line_no + 1, "missing '<m>' line");
  tokens = detail::split(line);
  if (tokens.size() != 1) throw ParseError(reader.line_no, "expected '<m>'");
  const std::size_t m = detail::parse_count(tokens[0], reader.line_no);

  std::vector<Edge> edges;
  edges.reserve(m);
  for (std::size_t e = 0; e < m; ++e) {
    if (!reader.next(line)) {
      throw ParseError(reader.line_no + 1, "expected " + std::to_string(m) + " edges, found " +
                                               std::to_string(e));
    }
    const std::size_t at = reader.line_no;
    tokens = detail::split(line);
    if (tokens.size() != 3 + k) {
      throw ParseError(at, "edge line has " + std::to_string(tokens.size()) +
                               " fields, expected " + std::to_string(3 + k));
    }
    const std::size_t i = detail::parse_count(tokens[0], at);
    const std::size_t j = detail::parse_count(tokens[1], at);
    if (i == 0 || j == 0) throw Error(ErrorKind::VertexOutOfRange, "line " + std::to_string(at));
    const double w = detail::parse_real(tokens[2], at);
    std::vector<Label> map(k);
    for (std::size_t r = 0; r < k; ++r) {
      const std::size_t s = detail::parse_count(tokens[3 + r], at);
      if (s == 0) {
        throw Error(ErrorKind::NonBijectivePermutation, "line " + std::to_string(at) +
                                                            ": label 0 in 1-based permutation");
      }
      map[r] = s - 1;
    }
    try {
      edges.push_back({i - 1, j - 1, w, Permutation(std::move(map))});
    } catch (const Error& err) {
      throw Error(err.kind(), "line " + std::to_string(at));
    }
  }
  if (reader.next(line)) throw ParseError(reader.line_no, "unexpected content after last edge");
  return UgInstance(n, k, std::move(edges));
}

}  // namespace ugbound
