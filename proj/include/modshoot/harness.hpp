#pragma once

// Experiment driver behind the command-line tool: config parsing, the
// compare/sweep/study runs and their CSV, SVG and JSON outputs.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "modshoot/analysis.hpp"
#include "modshoot/benchmarks.hpp"
#include "modshoot/ocp.hpp"
#include "modshoot/solver.hpp"
#include "modshoot/transcription.hpp"

namespace modshoot {

using json = nlohmann::json;

inline constexpr const char* kCsvHeader = "problem,scheme,N,h,eta_total,solve_time_s,outer_iters,inner_iters,status";

/// Benchmark experiment used by compare and sweep.
struct RunConfig {
  std::string problem;
  ParamMap params;            ///< defaults merged with overrides
  double tf = 1.0;
  std::vector<int> N_list;    ///< one entry for compare
  std::vector<SchemeKind> schemes;
  OptimalControlProblem ocp;  ///< N is overwritten per run
  SolverOptions solver;
  std::string output_dir;     ///< empty when the config leaves it to the caller
  bool plot = false;
  json meta = json::object();
};

/// Analytic-system convergence study.
struct StudyConfig {
  std::string system = "damped";  ///< damped (q'' = -q' + u) or harmonic (q'' = -q)
  double q0 = 0.0;
  double v0 = 1.0;
  double control = 0.0;
  double tf = 1.0;
  std::vector<int> N_list;
  std::vector<SchemeKind> schemes;
  std::string output_dir;
  bool plot = false;
  json meta = json::object();
};

enum class RunMode { Compare, Sweep };

/// Throws ConfigError naming the offending field.
RunConfig parse_run_config(const json& j, RunMode mode);
StudyConfig parse_study_config(const json& j);
json load_json(const std::filesystem::path& path);

/// Every setting, defaults included, as the run actually used it.
json effective_config(const RunConfig& cfg, int ref_multiplier);
json effective_config(const StudyConfig& cfg);

struct RunRow {
  std::string problem;
  std::string scheme;
  int N = 0;
  double h = 0.0;
  bool has_eta = false;
  double eta_total = 0.0;
  double solve_time = 0.0;
  int outer_iters = 0;
  int inner_iters = 0;
  SolveStatus status = SolveStatus::MaxIterations;
  double terminal_violation = 0.0;  ///< not serialized
};

struct RunSummary {
  std::vector<RunRow> rows;
  int reference_N = 0;
  SolveStatus reference_status = SolveStatus::Optimal;
  bool all_optimal() const;
};

/// Solves every (scheme, N) pair and measures eta_total against a SecondRK4
/// reference at ref_multiplier times the largest N. Rows are ordered by
/// scheme, then N. A failed solve yields a row with an empty error column.
RunSummary run_experiment(const RunConfig& cfg, int ref_multiplier);

std::string format_double(double x);
std::string csv_row(const RunRow& row);
void write_csv(const std::filesystem::path& path, const std::vector<RunRow>& rows);
/// Log-log chart of eta_total against N, one polyline per scheme.
void write_sweep_svg(const std::filesystem::path& path, const std::vector<RunRow>& rows, const std::string& title);

struct StudyRow {
  std::string scheme;
  int N = 0;
  double h = 0.0;
  double terminal_error = 0.0;
  double max_error = 0.0;
  bool has_bound = false;
  double bound = 0.0;
};

struct StudySummary {
  std::vector<StudyRow> rows;
  std::vector<std::pair<std::string, double>> slopes;
};

StudySummary run_integrator_study(const StudyConfig& cfg);
void write_study_csv(const std::filesystem::path& path, const StudySummary& summary);

}  // namespace modshoot
