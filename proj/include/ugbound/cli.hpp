#pragma once

// Command-line front end. Kept header-only so the test suites can drive the
// same entry point the ugbound executable uses.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ugbound/exact.hpp"
#include "ugbound/geometry.hpp"
#include "ugbound/instance.hpp"
#include "ugbound/randomized.hpp"
#include "ugbound/relaxation.hpp"

namespace ugbound::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kInput = 2, kNotConverged = 3 };

enum class Format { Text, Records };

struct RunConfig {
  std::string command;
  std::string instance_path;
  std::uint64_t seed = 0;
  double tol = 1e-6;
  std::size_t max_iters = 20000;
  std::size_t restarts = 5;
  std::uint64_t enum_limit = 1u << 20;
  std::string output;  // empty: the caller's stream
  Format format = Format::Text;

  // gen
  std::string type = "random";
  std::size_t n = 0;
  std::size_t k = 2;
  std::size_t m = 0;
  std::string labels_out;

  // expected
  std::string probs = "uniform";

  // verify
  std::string archive;

  SolveOptions solve_options() const {
    SolveOptions opts;
    opts.seed = seed;
    opts.tol = tol;
    opts.max_iters = max_iters;
    opts.restarts = restarts;
    return opts;
  }
};

namespace detail {

inline std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

inline std::string flag(bool b) { return b ? "true" : "false"; }

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Parse, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Parse, "cannot write " + path.string());
  out << text;
}

inline UgInstance load_instance(const std::string& path) { return read(read_file(path)); }

// Rows must sum to 1 within 1e-9; they are rescaled to the exact simplex
// before constructing the assignment.
inline ProbAssignment load_probabilities(const std::string& path, const UgInstance& inst) {
  std::istringstream in(read_file(path));
  std::vector<double> p;
  std::string line;
  std::size_t line_no = 0;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = ugbound::detail::split(line);
    if (tokens.empty() || tokens.front().front() == '#') continue;
    if (tokens.size() != inst.k()) {
      throw ParseError(line_no, "expected " + std::to_string(inst.k()) + " probabilities");
    }
    double sum = 0.0;
    std::vector<double> row;
    for (const auto token : tokens) {
      row.push_back(ugbound::detail::parse_real(token, line_no));
      sum += row.back();
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ParseError(line_no, "row does not sum to 1");
    for (double x : row) p.push_back(x / sum);
    ++rows;
  }
  if (rows != inst.n()) {
    throw Error(ErrorKind::DimensionMismatch, std::to_string(rows) + " probability rows for n = " +
                                                  std::to_string(inst.n()));
  }
  return {inst.n(), inst.k(), std::move(p)};
}

}  // namespace detail

/// Record line with the fixed key set
/// n k m W z_exact z1 lb sound theorem2_holds ratio iters converged.
inline std::string format_record(const BoundReport& r) {
  auto opt_real = [](const std::optional<double>& x, int digits) {
    return x ? detail::fixed(*x, digits) : std::string("NA");
  };
  auto opt_flag = [](const std::optional<bool>& b) {
    return b ? detail::flag(*b) : std::string("NA");
  };
  std::string line;
  line += "n=" + std::to_string(r.n);
  line += " k=" + std::to_string(r.k);
  line += " m=" + std::to_string(r.m);
  line += " W=" + detail::fixed(r.total_weight, 6);
  line += " z_exact=" + opt_real(r.z_exact, 6);
  line += " z1=" + detail::fixed(r.z1, 6);
  line += " lb=" + detail::fixed(r.lb, 6);
  line += " sound=" + opt_flag(r.sound);
  line += " theorem2_holds=" + opt_flag(r.theorem2_holds);
  line += " ratio=" + opt_real(r.ratio, 4);
  line += " iters=" + std::to_string(r.iterations);
  line += " converged=" + detail::flag(r.converged);
  return line;
}

inline std::string format_text(const BoundReport& r) {
  std::string s;
  s += "instance: n=" + std::to_string(r.n) + " k=" + std::to_string(r.k) +
       " m=" + std::to_string(r.m) + " total weight=" + detail::fixed(r.total_weight, 6) + "\n";
  s += "exact optimum z*: " + (r.z_exact ? detail::fixed(*r.z_exact, 6) : "not computed") + "\n";
  s += "relaxation z1: " + detail::fixed(r.z1, 6) + (r.converged ? "" : " (not converged)") + "\n";
  s += "lower bound (2/pi) z1: " + detail::fixed(r.lb, 6) + "\n";
  if (r.z_exact) {
    s += "sound (z1 >= z*): " + detail::flag(*r.sound) + "\n";
    s += "z* >= (2/pi) z1: " + detail::flag(*r.theorem2_holds) + "\n";
    if (r.ratio) s += "z* / z1: " + detail::fixed(*r.ratio, 4) + "\n";
  }
  s += "iterations: " + std::to_string(r.iterations) + "\n";
  s += "max norm deviation: " + detail::fixed(r.residuals.max_norm_deviation, 9) +
       ", max constraint violation: " + detail::fixed(r.residuals.max_violation, 9) +
       ", max constraint slack: " + detail::fixed(r.residuals.max_slack, 9) + "\n";
  return s;
}

namespace detail {

inline std::string labels_text(const Labeling& labeling) {
  std::string s;
  for (std::size_t i = 0; i < labeling.labels.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(labeling.labels[i] + 1);
  }
  return s;
}

inline int cmd_gen(const RunConfig& cfg, std::string& out) {
  if (cfg.type == "random") {
    out = write(generate_random(cfg.n, cfg.k, cfg.m, cfg.seed));
  } else if (cfg.type == "planted") {
    const auto planted = generate_planted(cfg.n, cfg.k, cfg.m, cfg.seed);
    out = write(planted.instance);
    if (!cfg.labels_out.empty()) {
      write_file(cfg.labels_out, labels_text(Labeling{planted.labels}) + "\n");
    }
  } else if (cfg.type == "maxcut") {
    out = write(from_maxcut(cfg.n, random_graph(cfg.n, cfg.m, cfg.seed)));
  } else {
    throw CLI::ValidationError("--type", "must be random, planted or maxcut");
  }
  return kOk;
}

inline int cmd_exact(const RunConfig& cfg, std::string& out) {
  const UgInstance inst = load_instance(cfg.instance_path);
  const ExactResult best = solve_exact(inst, cfg.enum_limit);
  if (cfg.format == Format::Records) {
    out = "n=" + std::to_string(inst.n()) + " k=" + std::to_string(inst.k()) +
          " m=" + std::to_string(inst.m()) + " W=" + fixed(inst.total_weight(), 6) +
          " z_exact=" + fixed(best.value, 6) + "\n";
  } else {
    out = "z* = " + fixed(best.value, 6) + "\nlabeling = " + labels_text(best.labeling) + "\n";
  }
  return kOk;
}

inline int cmd_expected(const RunConfig& cfg, std::string& out) {
  const UgInstance inst = load_instance(cfg.instance_path);
  const ProbAssignment p = cfg.probs == "uniform" ? ProbAssignment::uniform(inst.n(), inst.k())
                                                  : load_probabilities(cfg.probs, inst);
  const Labeling rounded = round_conditional(inst, p);
  out = "expected value E[z] = " + fixed(expected_value(inst, p), 9) + "\n";
  out += "expected value, y form = " + fixed(expected_value_y(inst, to_y(p)), 9) + "\n";
  out += "conditional rounding value = " + fixed(value(inst, rounded), 9) + "\n";
  out += "conditional rounding labeling = " + labels_text(rounded) + "\n";
  return kOk;
}

inline int cmd_sdp(const RunConfig& cfg, std::string& out) {
  const UgInstance inst = load_instance(cfg.instance_path);
  const SdpProblem prob = build_sdp(inst);
  const GramSolution sol = solve_sdp(prob, cfg.solve_options());
  BoundReport r;
  r.n = inst.n();
  r.k = inst.k();
  r.m = inst.m();
  r.total_weight = inst.total_weight();
  r.z1 = sol.objective;
  r.lb = bound_from_sdp(std::max(sol.objective, 0.0));
  r.converged = sol.converged;
  r.iterations = sol.iterations;
  r.residuals = sol.residuals;
  if (cfg.format == Format::Records) {
    out = format_record(r) + "\n";
  } else {
    const Labeling rounded = round_gram(inst, sol);
    out = format_text(r);
    out += "rounded labeling value: " + fixed(value(inst, rounded), 6) + "\n";
    out += "rounded labeling: " + labels_text(rounded) + "\n";
  }
  return sol.converged ? kOk : kNotConverged;
}

inline int cmd_bound(const RunConfig& cfg, std::string& out) {
  const UgInstance inst = load_instance(cfg.instance_path);
  const BoundReport r = verify_bounds(inst, cfg.enum_limit, cfg.solve_options());
  out = cfg.format == Format::Records ? format_record(r) + "\n" : format_text(r);
  return r.converged ? kOk : kNotConverged;
}

inline std::vector<std::filesystem::path> instance_files(const std::string& path) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(path)) return {fs::path(path)};
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(path)) {
    if (entry.is_regular_file() && entry.path().extension() == ".ug") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
    return a.filename().string() < b.filename().string();
  });
  return files;
}

inline int cmd_verify(const RunConfig& cfg, std::string& out) {
  namespace fs = std::filesystem;
  const auto files = instance_files(cfg.instance_path);
  if (!cfg.archive.empty()) fs::create_directories(cfg.archive);
  int code = kOk;
  for (const auto& file : files) {
    const UgInstance inst = load_instance(file.string());
    if (const auto count = labeling_count(inst.n(), inst.k()); !count || *count > cfg.enum_limit) {
      throw Error(ErrorKind::BudgetExceeded, file.filename().string() + ": k^n exceeds --enum-limit " +
                                                 std::to_string(cfg.enum_limit));
    }
    const BoundReport r = verify_bounds(inst, cfg.enum_limit, cfg.solve_options());
    const std::string record = format_record(r);
    out += cfg.format == Format::Records ? record + "\n"
                                         : "== " + file.filename().string() + "\n" + format_text(r);
    if (!r.converged) code = kNotConverged;
    if (!cfg.archive.empty() && r.theorem2_holds && !*r.theorem2_holds) {
      const fs::path stem = fs::path(cfg.archive) / file.stem();
      write_file(stem.string() + ".ug", write(inst));
      write_file(stem.string() + ".report", record + "\n");
    }
  }
  return code;
}

inline void add_solver_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--tol", cfg.tol, "stationarity tolerance")->check(CLI::PositiveNumber);
  sub->add_option("--max-iters", cfg.max_iters, "iteration budget per start");
  sub->add_option("--restarts", cfg.restarts, "random restarts")->check(CLI::PositiveNumber);
  sub->add_option("--seed", cfg.seed, "random seed");
}

inline void add_output_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--output,-o", cfg.output, "write to this file instead of stdout");
  sub->add_option("--format", cfg.format, "text or records")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, Format>{{"text", Format::Text}, {"records", Format::Records}}));
}

}  // namespace detail

/// Runs one command. args excludes the program name. Exit codes: 0 success,
/// 1 usage error, 2 input or parse error, 3 solver did not converge (the
/// report is still written).
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Unique games relaxation and bound verification", "ugbound"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "generate an instance");
  gen->add_option("--type", cfg.type, "random, planted or maxcut")
      ->check(CLI::IsMember({"random", "planted", "maxcut"}));
  gen->add_option("--n", cfg.n, "vertices")->required();
  gen->add_option("--k", cfg.k, "labels (maxcut forces 2)");
  gen->add_option("--m", cfg.m, "edges")->required();
  gen->add_option("--seed", cfg.seed, "random seed");
  gen->add_option("--out", cfg.output, "instance file (default stdout)");
  gen->add_option("--labels-out", cfg.labels_out, "planted labeling file (1-based)");

  auto* exact = app.add_subcommand("exact", "exhaustive optimum");
  exact->add_option("file", cfg.instance_path)->required();
  exact->add_option("--enum-limit", cfg.enum_limit)->check(CLI::PositiveNumber);
  detail::add_output_options(exact, cfg);

  auto* expected = app.add_subcommand("expected", "expected value of independent labeling");
  expected->add_option("file", cfg.instance_path)->required();
  expected->add_option("--probs", cfg.probs, "'uniform' or a file of n rows of k probabilities");
  expected->add_option("--output,-o", cfg.output, "write to this file instead of stdout");

  auto* sdp = app.add_subcommand("sdp", "solve the semidefinite relaxation");
  sdp->add_option("file", cfg.instance_path)->required();
  detail::add_solver_options(sdp, cfg);
  detail::add_output_options(sdp, cfg);

  auto* bound = app.add_subcommand("bound", "relaxation bound with optional exact comparison");
  bound->add_option("file", cfg.instance_path)->required();
  bound->add_option("--enum-limit", cfg.enum_limit)->check(CLI::PositiveNumber);
  detail::add_solver_options(bound, cfg);
  detail::add_output_options(bound, cfg);

  auto* verify = app.add_subcommand("verify", "check bounds against the exact optimum");
  verify->add_option("path", cfg.instance_path, "instance file or directory of .ug files")
      ->required();
  verify->add_option("--enum-limit", cfg.enum_limit)->check(CLI::PositiveNumber);
  verify->add_option("--archive", cfg.archive, "directory for counterexample instances");
  detail::add_solver_options(verify, cfg);
  detail::add_output_options(verify, cfg);

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "ugbound: " << e.what() << "\n";
    return kUsage;
  }
  cfg.command = app.get_subcommands().front()->get_name();

  std::string text;
  int code = kOk;
  try {
    if (cfg.command == "gen") code = detail::cmd_gen(cfg, text);
    else if (cfg.command == "exact") code = detail::cmd_exact(cfg, text);
    else if (cfg.command == "expected") code = detail::cmd_expected(cfg, text);
    else if (cfg.command == "sdp") code = detail::cmd_sdp(cfg, text);
    else if (cfg.command == "bound") code = detail::cmd_bound(cfg, text);
    else code = detail::cmd_verify(cfg, text);
  } catch (const CLI::Error& e) {
    err << "ugbound: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "ugbound: " << e.what() << "\n";
    return kInput;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "ugbound: " << e.what() << "\n";
    return kInput;
  }

  try {
    if (cfg.output.empty()) {
      out << text;
    } else {
      detail::write_file(cfg.output, text);
    }
  } catch (const Error& e) {
    err << "ugbound: " << e.what() << "\n";
    return kInput;
  }
  if (code == kNotConverged) err << "ugbound: solver did not converge; report is best feasible iterate\n";
  return code;
}

}  // namespace ugbound::cli
