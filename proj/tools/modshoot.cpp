// modshoot: compare, sweep and study runs driven by a JSON config.
//
// Exit codes: 0 every solve Optimal, 2 config error, 3 some solve not Optimal,
// 1 anything else (I/O failures).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "modshoot/errors.hpp"
#include "modshoot/harness.hpp"

namespace fs = std::filesystem;
using namespace modshoot;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNotOptimal = 3;

struct Options {
  std::string config;
  std::string out = "./out";
  bool plot = false;
  int ref_multiplier = 8;
};

fs::path output_dir(const Options& opt, bool out_given, const std::string& from_config) {
  if (!out_given && !from_config.empty()) return from_config;
  return opt.out;
}

void write_effective(const fs::path& dir, const json& j) {
  std::ofstream out(dir / "effective-config.json");
  out << j.dump(2) << '\n';
}

void print_rows(const RunSummary& s) {
  std::printf("%-12s %-10s %6s %14s %10s %6s %6s  %s\n", "problem", "scheme", "N", "eta_total", "time_s", "outer",
              "inner", "status");
  for (const auto& r : s.rows) {
    char eta[32] = "-";
    if (r.has_eta) std::snprintf(eta, sizeof eta, "%.6e", r.eta_total);
    std::printf("%-12s %-10s %6d %14s %10.3f %6d %6d  %s\n", r.problem.c_str(), r.scheme.c_str(), r.N, eta,
                r.solve_time, r.outer_iters, r.inner_iters, std::string(status_label(r.status)).c_str());
  }
  if (s.reference_status != SolveStatus::Optimal) {
    std::fprintf(stderr, "reference solve (2nd-rk4, N = %d) ended with status %s; error columns left empty\n",
                 s.reference_N, std::string(status_label(s.reference_status)).c_str());
  }
}

int run_benchmark(const Options& opt, bool out_given, RunMode mode) {
  const RunConfig cfg = parse_run_config(load_json(opt.config), mode);
  if (opt.ref_multiplier < 1) throw ConfigError("--ref-multiplier must be at least 1");
  RunConfig run = cfg;
  run.plot = cfg.plot || opt.plot;
  const fs::path dir = output_dir(opt, out_given, cfg.output_dir);
  fs::create_directories(dir);
  json eff = effective_config(run, opt.ref_multiplier);
  eff["output_dir"] = dir.string();
  write_effective(dir, eff);

  const RunSummary summary = run_experiment(run, opt.ref_multiplier);
  const std::string stem = mode == RunMode::Compare ? "compare" : "sweep";
  write_csv(dir / (stem + ".csv"), summary.rows);
  if (mode == RunMode::Sweep && run.plot) {
    write_sweep_svg(dir / "sweep.svg", summary.rows, run.problem + ": eta_total vs N");
  }
  print_rows(summary);
  return summary.all_optimal() ? 0 : kExitNotOptimal;
}

int run_study(const Options& opt, bool out_given) {
  StudyConfig cfg = parse_study_config(load_json(opt.config));
  cfg.plot = cfg.plot || opt.plot;
  const fs::path dir = output_dir(opt, out_given, cfg.output_dir);
  fs::create_directories(dir);
  json eff = effective_config(cfg);
  eff["output_dir"] = dir.string();
  write_effective(dir, eff);

  const StudySummary summary = run_integrator_study(cfg);
  write_study_csv(dir / "study.csv", summary);
  std::printf("%-10s %6s %12s %14s %14s %14s\n", "scheme", "N", "h", "terminal_err", "max_err", "bound");
  for (const auto& r : summary.rows) {
    char bound[32] = "-";
    if (r.has_bound) std::snprintf(bound, sizeof bound, "%.6e", r.bound);
    std::printf("%-10s %6d %12.6g %14.6e %14.6e %14s\n", r.scheme.c_str(), r.N, r.h, r.terminal_error, r.max_error,
                bound);
  }
  for (const auto& [scheme, slope] : summary.slopes) std::printf("slope %-10s %.4f\n", scheme.c_str(), slope);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Direct-shooting transcription experiments"};
  app.require_subcommand(1);
  Options opt;
  CLI::App* compare = app.add_subcommand("compare", "solve one N with every scheme and tabulate eta_total");
  CLI::App* sweep = app.add_subcommand("sweep", "solve every (scheme, N) pair of an N list");
  CLI::App* study = app.add_subcommand("study", "integrator convergence study on an analytic test system");
  for (CLI::App* sub : {compare, sweep, study}) {
    sub->add_option("--config", opt.config, "JSON config file")->required();
    sub->add_option("--out", opt.out, "output directory")->capture_default_str();
    sub->add_flag("--plot", opt.plot, "write an SVG plot (sweep)");
    sub->add_option("--ref-multiplier", opt.ref_multiplier, "reference N as a multiple of the largest N")
        ->capture_default_str();
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  CLI::App* chosen = app.get_subcommands().front();
  const bool out_given = chosen->count("--out") > 0;
  try {
    if (chosen == compare) return run_benchmark(opt, out_given, RunMode::Compare);
    if (chosen == sweep) return run_benchmark(opt, out_given, RunMode::Sweep);
    return run_study(opt, out_given);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
