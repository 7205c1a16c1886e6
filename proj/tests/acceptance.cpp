// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Run from the build tree; corpus and archive files land in the
// working directory.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "ugbound/cli.hpp"
#include "ugbound/ugbound.hpp"

namespace fs = std::filesystem;
using namespace ugbound;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Verdict {
  bool pass;
  std::string detail;
};

ProbAssignment random_probs(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<double> p(n * k);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t r = 0; r < k; ++r) sum += (p[i * k + r] = rng.uniform() < 0.2 ? 0.0 : rng.uniform());
    if (sum == 0.0) {
      p[i * k] = 1.0;
      continue;
    }
    double total = 0.0;
    for (std::size_t r = 0; r < k; ++r) total += (p[i * k + r] /= sum);
    p[i * k] = std::max(0.0, p[i * k] + 1.0 - total);
  }
  return {n, k, std::move(p)};
}

struct CorpusEntry {
  std::string name;
  UgInstance instance;
};

// Fuzz corpus, every instance small enough for exhaustive search (k^n <= 4096).
std::vector<CorpusEntry> build_corpus() {
  std::vector<CorpusEntry> corpus;
  char name[64];
  const std::vector<std::pair<std::size_t, std::size_t>> shapes{{12, 2}, {9, 2}, {7, 3}, {6, 4}, {5, 5}, {4, 8}};
  for (std::uint64_t seed = 0; seed < 24; ++seed) {
    const auto [n, k] = shapes[seed % shapes.size()];
    const std::size_t m = std::min(n * (n - 1) / 2, n + 2 + seed % 5);
    std::snprintf(name, sizeof name, "random_%02llu", static_cast<unsigned long long>(seed));
    corpus.push_back({name, generate_random(n, k, m, seed)});
  }
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const auto [n, k] = shapes[(seed + 2) % shapes.size()];
    std::snprintf(name, sizeof name, "planted_%02llu", static_cast<unsigned long long>(seed));
    corpus.push_back({name, generate_planted(n, k, std::min(n * (n - 1) / 2, n + 3), 100 + seed).instance});
  }
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const std::size_t n = 5 + seed % 6;
    const std::size_t m = std::min(n * (n - 1) / 2, n + 2 * (seed % 7));
    std::snprintf(name, sizeof name, "maxcut_%02llu", static_cast<unsigned long long>(seed));
    corpus.push_back({name, from_maxcut(n, random_graph(n, m, 200 + seed))});
  }
  std::vector<WeightedPair> k5;
  for (Vertex i = 0; i < 5; ++i)
    for (Vertex j = i + 1; j < 5; ++j) k5.push_back({i, j, 1.0});
  corpus.push_back({"maxcut_complete5", from_maxcut(5, k5)});
  // verify walks the directory in name order.
  std::sort(corpus.begin(), corpus.end(), [](const CorpusEntry& a, const CorpusEntry& b) { return a.name < b.name; });
  return corpus;
}

Verdict criterion1() {
  const auto start = Clock::now();
  int mismatches = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const std::size_t n = 3 + seed % 4;
    const std::size_t k = 2 + seed % 2;
    const UgInstance inst = generate_random(n, k, std::min(n * (n - 1) / 2, n + 1 + seed % 4), seed);
    double best = 0.0;
    for (std::uint64_t t = 0; t < oracle::power(k, n); ++t) {
      best = std::max(best, expected_value(inst, ProbAssignment::one_hot(k, Labeling{oracle::decode(t, n, k)})));
    }
    if (best != solve_exact(inst, 1u << 12).value) ++mismatches;
  }
  const double elapsed = seconds_since(start);
  return {mismatches == 0 && elapsed < 60.0,
          std::to_string(mismatches) + " mismatches in 50 instances, " + cli::detail::fixed(elapsed, 2) + " s"};
}

Verdict criterion2() {
  Rng rng(2);
  double worst_y = 0.0;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const std::size_t n = 3 + seed % 6;
    const std::size_t k = 2 + seed % 5;
    const UgInstance inst = generate_random(n, k, std::min(n * (n - 1) / 2, n + seed % 6), seed);
    const ProbAssignment p = random_probs(n, k, rng);
    const double a = expected_value(inst, p);
    worst_y = std::max(worst_y, std::abs(a - expected_value_y(inst, to_y(p))) / std::max(1.0, std::abs(a)));
  }
  double worst_p4 = 0.0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const std::size_t n = 3 + seed % 5;
    const std::size_t k = 2 + seed % 4;
    const UgInstance inst = generate_random(n, k, std::min(n * (n - 1) / 2, n + 2), seed);
    Labeling labeling{std::vector<Label>(n)};
    for (auto& r : labeling.labels) r = rng.below(k);
    const double p4 = p4_objective(inst, embed_labeling(inst, labeling));
    worst_p4 = std::max(worst_p4, std::abs(p4 - oracle::matched_weight(inst, labeling.labels)));
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "max relative y gap %.2e over 500 pairs, max embedding gap %.2e", worst_y, worst_p4);
  return {worst_y <= 1e-9 && worst_p4 <= 1e-9, buf};
}

Verdict criterion3() {
  int bad = 0;
  for (int k = 2; k <= 6; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    Rng rng(static_cast<std::uint64_t>(k));
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<Label> map(ku);
      for (std::size_t r = 0; r < ku; ++r) map[r] = r;
      rng.shuffle(std::span<Label>(map));
      const Permutation sigma(map);
      for (std::size_t s = 0; s < ku; ++s) {
        for (std::size_t t = 0; t < ku; ++t) {
          std::vector<int> yi(ku, -1), yj(ku, -1);
          yi[s] = 1;
          yj[t] = 1;
          const int expected = sigma(s) == t ? k : k - 4;
          if (signed_product_sum<int>(yi, yj, sigma) != expected) ++bad;
        }
      }
    }
  }
  return {bad == 0, std::to_string(bad) + " wrong sums for k = 2..6"};
}

Verdict criterion4() {
  Rng rng(4);
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t n = 4 + seed % 8;
    const auto graph = random_graph(n, std::min(n * (n - 1) / 2, n + seed % 9), seed);
    std::vector<double> y1(n), rows;
    for (double& x : y1) {
      x = 2.0 * rng.uniform() - 1.0;
      rows.push_back(x);
      rows.push_back(-x);
    }
    const double ug = expected_value_y(from_maxcut(n, graph), YAssignment(n, 2, rows));
    worst = std::max(worst, std::abs(ug - maxcut_objective(graph, y1)));
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "max gap %.2e over 100 graphs", worst);
  return {worst <= 1e-12, buf};
}

struct CorpusRun {
  std::vector<BoundReport> reports;
  std::vector<double> optimum;
};

Verdict criterion5(const std::vector<CorpusEntry>& corpus, CorpusRun& run) {
  int violations = 0;
  for (const auto& entry : corpus) {
    run.reports.push_back(verify_bounds(entry.instance, 4096));
    run.optimum.push_back(oracle::brute_force_optimum(entry.instance));
    if (!(run.reports.back().z1 + 1e-4 >= run.optimum.back())) ++violations;
  }
  return {violations == 0,
          std::to_string(violations) + " violations over " + std::to_string(corpus.size()) + " instances"};
}

Verdict criterion6() {
  int failures = 0;
  double slowest = 0.0;
  const std::vector<std::pair<std::size_t, std::size_t>> shapes{{10, 2}, {12, 2}, {8, 3}, {10, 3}, {7, 4},
                                                                {8, 5}, {6, 6}, {5, 8}, {12, 4}, {6, 9}};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto [n, k] = shapes[seed % shapes.size()];
    const std::size_t m = std::min(n * (n - 1) / 2, n + 2 + seed % 6);
    const auto planted = generate_planted(n, k, m, 300 + seed);
    const auto start = Clock::now();
    SolveOptions opts;
    opts.seed = seed;
    const GramSolution sol = solve_sdp(build_sdp(planted.instance), opts);
    const double w = planted.instance.total_weight();
    const double rounded = value(planted.instance, round_gram(planted.instance, sol));
    const double elapsed = seconds_since(start);
    slowest = std::max(slowest, elapsed);
    if ((k + 1) * n > 60 || std::abs(sol.objective - w) > 1e-4 * w || rounded != w || elapsed >= 30.0) {
      ++failures;
    }
  }
  return {failures == 0, std::to_string(failures) + " failures in 20 planted instances, slowest " +
                             cli::detail::fixed(slowest, 2) + " s"};
}

Verdict criterion7(const CorpusRun& run) {
  double worst = 0.0;
  for (const auto& r : run.reports) {
    if (r.z1 > 0.0) worst = std::max(worst, std::abs(r.lb / r.z1 - 2.0 / std::numbers::pi));
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "max deviation %.2e over %zu reports", worst, run.reports.size());
  return {worst <= 1e-9, buf};
}

std::string run_cli(const std::vector<std::string>& args, int& code) {
  std::ostringstream out, err;
  code = cli::run(args, out, err);
  return out.str();
}

std::map<std::string, std::string> fields(const std::string& line) {
  std::map<std::string, std::string> kv;
  std::istringstream in(line);
  for (std::string token; in >> token;) {
    const auto eq = token.find('=');
    kv[token.substr(0, eq)] = token.substr(eq + 1);
  }
  return kv;
}

Verdict criterion8(const std::vector<CorpusEntry>& corpus, const fs::path& dir, const std::string& records,
                   int code, const CorpusRun& run) {
  std::istringstream in(records);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  if (code != 0 || lines.size() != corpus.size()) {
    return {false, "verify exited " + std::to_string(code) + " with " + std::to_string(lines.size()) + " lines"};
  }
  int missing_flag = 0, unsound = 0, unarchived = 0, counterexamples = 0;
  for (std::size_t t = 0; t < lines.size(); ++t) {
    auto kv = fields(lines[t]);
    if (kv["theorem2_holds"] != "true" && kv["theorem2_holds"] != "false") ++missing_flag;
    if (kv["sound"] != "true") ++unsound;
    if (kv["theorem2_holds"] == "false") {
      ++counterexamples;
      const fs::path stem = dir / "archive" / corpus[t].name;
      if (!fs::exists(stem.string() + ".ug") || !fs::exists(stem.string() + ".report")) ++unarchived;
    }
  }
  int library_unsound = 0;
  for (const auto& r : run.reports) library_unsound += !r.sound.value_or(false);
  return {missing_flag == 0 && unsound == 0 && unarchived == 0 && library_unsound == 0,
          std::to_string(lines.size()) + " records, " + std::to_string(counterexamples) +
              " counterexamples archived, " + std::to_string(missing_flag + unarchived) + " ledger gaps, " +
              std::to_string(unsound + library_unsound) + " unsound"};
}

Verdict criterion9() {
  Rng rng(9);
  int violations = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const std::size_t n = 3 + seed % 8;
    const std::size_t k = 2 + seed % 5;
    const UgInstance inst = generate_random(n, k, std::min(n * (n - 1) / 2, n + seed % 7), seed);
    const ProbAssignment p = random_probs(n, k, rng);
    if (value(inst, round_conditional(inst, p)) < expected_value(inst, p) - 1e-9) ++violations;
  }
  return {violations == 0, std::to_string(violations) + " violations over 1000 pairs"};
}

}  // namespace

int main() {
  const fs::path dir = fs::current_path() / "acceptance_work";
  fs::remove_all(dir);
  fs::create_directories(dir / "corpus");

  const auto corpus = build_corpus();
  for (const auto& entry : corpus) cli::detail::write_file(dir / "corpus" / (entry.name + ".ug"), write(entry.instance));

  int failures = 0;
  auto report = [&failures](int id, const std::string& title, const std::function<Verdict()>& check) {
    const auto start = Clock::now();
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += !v.pass;
    std::printf("criterion %2d %s  %s: %s (%.1f s)\n", id, v.pass ? "PASS" : "FAIL", title.c_str(),
                v.detail.c_str(), seconds_since(start));
    std::fflush(stdout);
  };

  const std::vector<std::string> verify_args{"verify", (dir / "corpus").string(), "--enum-limit", "4096",
                                             "--format", "records", "--seed", "11",
                                             "--archive", (dir / "archive").string()};
  CorpusRun run;
  int first_code = -1;
  std::string first;

  report(1, "integral expectation equals exact optimum", criterion1);
  report(2, "objective forms agree", criterion2);
  report(3, "one-hot signed sums are k and k-4", criterion3);
  report(4, "maxcut reduction", criterion4);
  report(5, "relaxation soundness on fuzz corpus", [&] { return criterion5(corpus, run); });
  report(6, "satisfiable instances are tight and rounded exactly", criterion6);
  report(7, "bound factor 2/pi", [&] { return criterion7(run); });
  report(8, "verification ledger with archived counterexamples", [&] {
    first = run_cli(verify_args, first_code);
    return criterion8(corpus, dir, first, first_code, run);
  });
  report(9, "conditional rounding dominates expectation", criterion9);
  report(10, "records output is deterministic", [&] {
    int code = -1;
    const std::string second = run_cli(verify_args, code);
    const bool same = code == first_code && second == first && !first.empty();
    return Verdict{same, same ? "two runs byte-identical (" + std::to_string(first.size()) + " bytes)"
                              : "outputs differ between runs"};
  });

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
