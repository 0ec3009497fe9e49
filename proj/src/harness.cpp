#include "modshoot/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "modshoot/errors.hpp"

namespace modshoot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void fail(const std::string& field, const std::string& why) {
  throw ConfigError("config field '" + field + "': " + why);
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      fail(where.empty() ? it.key() : where + "." + it.key(), "unknown key (expected one of: " + list + ")");
    }
  }
}

double get_number(const json& v, const std::string& field) {
  if (!v.is_number()) fail(field, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(field, "must be finite");
  return x;
}

int get_positive_int(const json& v, const std::string& field) {
  if (!v.is_number_integer() || v.get<long long>() < 1) fail(field, "expected a positive integer");
  return v.get<int>();
}

bool get_bool(const json& v, const std::string& field) {
  if (!v.is_boolean()) fail(field, "expected true or false");
  return v.get<bool>();
}

// Fixed-length vector; null entries become `null_value` when allowed.
VectorXd get_vector(const json& v, const std::string& field, Eigen::Index n, bool allow_null = false,
                    double null_value = 0.0) {
  if (!v.is_array()) fail(field, "expected an array of " + std::to_string(n) + " numbers");
  if (static_cast<Eigen::Index>(v.size()) != n) {
    fail(field, "expected " + std::to_string(n) + " entries, got " + std::to_string(v.size()));
  }
  VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const json& e = v[static_cast<size_t>(i)];
    const std::string f = field + "[" + std::to_string(i) + "]";
    if (e.is_null() && allow_null) {
      out[i] = null_value;
    } else {
      out[i] = get_number(e, f);
    }
  }
  return out;
}

std::vector<int> get_n_list(const json& v, const std::string& field) {
  if (!v.is_array() || v.empty()) fail(field, "expected a nonempty array of positive integers");
  std::vector<int> out;
  for (size_t i = 0; i < v.size(); ++i) {
    out.push_back(get_positive_int(v[i], field + "[" + std::to_string(i) + "]"));
    if (i > 0 && out[i] <= out[i - 1]) fail(field, "entries must be strictly increasing");
  }
  return out;
}

std::vector<SchemeKind> get_schemes(const json& j) {
  if (!j.contains("schemes")) fail("schemes", "missing");
  const json& v = j.at("schemes");
  if (!v.is_array() || v.empty()) fail("schemes", "expected a nonempty array of scheme labels");
  std::vector<SchemeKind> out;
  for (size_t i = 0; i < v.size(); ++i) {
    const std::string f = "schemes[" + std::to_string(i) + "]";
    if (!v[i].is_string()) fail(f, "expected a scheme label");
    SchemeKind k;
    try {
      k = parse_scheme(v[i].get<std::string>());
    } catch (const ConfigError& e) {
      fail(f, e.what());
    }
    if (k == SchemeKind::EulerOrderN) fail(f, "euler-n applies to high-order systems only");
    if (std::find(out.begin(), out.end(), k) != out.end()) fail(f, "duplicate scheme");
    out.push_back(k);
  }
  return out;
}

json meta_of(const json& j) {
  if (!j.contains("meta")) return json::object();
  if (!j.at("meta").is_object()) fail("meta", "expected an object");
  return j.at("meta");
}

std::string output_dir_of(const json& j) {
  if (!j.contains("output_dir")) return {};
  if (!j.at("output_dir").is_string()) fail("output_dir", "expected a string");
  return j.at("output_dir").get<std::string>();
}

SolverOptions parse_solver(const json& j) {
  SolverOptions o;
  if (!j.contains("solver")) return o;
  const json& s = j.at("solver");
  if (!s.is_object()) fail("solver", "expected an object");
  reject_unknown(s,
                 {"feas_tol", "stat_tol", "penalty_init", "penalty_growth", "penalty_max", "max_outer", "max_inner",
                  "armijo", "backtrack", "memory"},
                 "solver");
  auto num = [&](const char* k, double& dst) {
    if (s.contains(k)) dst = get_number(s.at(k), std::string("solver.") + k);
  };
  auto count = [&](const char* k, int& dst) {
    if (s.contains(k)) dst = get_positive_int(s.at(k), std::string("solver.") + k);
  };
  num("feas_tol", o.feas_tol);
  num("stat_tol", o.stat_tol);
  num("penalty_init", o.penalty_init);
  num("penalty_growth", o.penalty_growth);
  num("penalty_max", o.penalty_max);
  count("max_outer", o.max_outer);
  count("max_inner", o.max_inner);
  num("armijo", o.armijo);
  num("backtrack", o.backtrack);
  count("memory", o.memory);
  try {
    o.validate();
  } catch (const ConfigError& e) {
    fail("solver", e.what());
  }
  return o;
}

ParamMap parse_params(const json& j, const std::string& problem) {
  ParamMap params = default_params(problem);
  if (!j.contains("params")) return params;
  const json& p = j.at("params");
  if (!p.is_object()) fail("params", "expected an object");
  for (auto it = p.begin(); it != p.end(); ++it) {
    if (!params.count(it.key())) fail("params." + it.key(), "not a parameter of " + problem);
    params[it.key()] = get_number(it.value(), "params." + it.key());
  }
  return params;
}

void parse_limits(const json& j, const char* key, Eigen::Index n, VectorXd& lower, VectorXd& upper, bool optional) {
  if (!j.contains(key) || j.at(key).is_null()) {
    if (optional) {
      lower.resize(0);
      upper.resize(0);
    } else {
      lower = VectorXd::Constant(n, -kInf);
      upper = VectorXd::Constant(n, kInf);
    }
    return;
  }
  const json& v = j.at(key);
  const std::string f = key;
  if (!v.is_object()) fail(f, "expected an object with 'lower' and 'upper'");
  reject_unknown(v, {"lower", "upper"}, f);
  lower = v.contains("lower") ? get_vector(v.at("lower"), f + ".lower", n, true, -kInf) : VectorXd::Constant(n, -kInf);
  upper = v.contains("upper") ? get_vector(v.at("upper"), f + ".upper", n, true, kInf) : VectorXd::Constant(n, kInf);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (lower[i] > upper[i]) fail(f, "lower exceeds upper at index " + std::to_string(i));
  }
}

json limits_json(const VectorXd& lower, const VectorXd& upper) {
  if (lower.size() == 0) return nullptr;
  auto side = [](const VectorXd& v) {
    json a = json::array();
    for (double x : v) a.push_back(std::isfinite(x) ? json(x) : json(nullptr));
    return a;
  };
  return {{"lower", side(lower)}, {"upper", side(upper)}};
}

json vec_json(const VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json diag_json(const MatrixXd& m) { return vec_json(m.diagonal()); }

json solver_json(const SolverOptions& o) {
  return {{"feas_tol", o.feas_tol},         {"stat_tol", o.stat_tol},   {"penalty_init", o.penalty_init},
          {"penalty_growth", o.penalty_growth}, {"penalty_max", o.penalty_max}, {"max_outer", o.max_outer},
          {"max_inner", o.max_inner},       {"armijo", o.armijo},       {"backtrack", o.backtrack},
          {"memory", o.memory}};
}

json schemes_json(const std::vector<SchemeKind>& schemes) {
  json a = json::array();
  for (auto k : schemes) a.push_back(std::string(scheme_label(k)));
  return a;
}

double terminal_violation(const OptimalControlProblem& p, const KnotTrajectory& knots) {
  const VectorXd xN = knots.state(knots.intervals());
  double worst = 0.0;
  for (size_t i = 0; i < p.xf_fixed.size(); ++i) {
    if (p.xf_fixed[i]) worst = std::max(worst, std::abs(xN[static_cast<Eigen::Index>(i)] - p.xf[static_cast<Eigen::Index>(i)]));
  }
  return worst;
}

}  // namespace

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
}

RunConfig parse_run_config(const json& j, RunMode mode) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(j,
                 {"meta", "problem", "params", "tf", "N", "N_list", "schemes", "cost", "control_limits",
                  "state_limits", "initial_state", "terminal_state", "terminal_fixed", "solver", "output_dir", "plot"},
                 "");
  RunConfig cfg;
  cfg.meta = meta_of(j);
  if (!j.contains("problem") || !j.at("problem").is_string()) fail("problem", "expected a benchmark name");
  cfg.problem = j.at("problem").get<std::string>();
  const auto names = benchmark_names();
  if (std::find(names.begin(), names.end(), cfg.problem) == names.end()) {
    std::string list;
    for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
    fail("problem", "unknown benchmark '" + cfg.problem + "'; valid names: " + list);
  }
  cfg.params = parse_params(j, cfg.problem);
  SecondOrderSystem sys = [&] {
    try {
      return make_benchmark(cfg.problem, cfg.params);
    } catch (const ConfigError& e) {
      fail("params", e.what());
    }
  }();

  if (!j.contains("tf")) fail("tf", "missing");
  cfg.tf = get_number(j.at("tf"), "tf");
  if (!(cfg.tf > 0.0)) fail("tf", "must be positive");

  if (mode == RunMode::Compare) {
    if (!j.contains("N")) fail("N", "missing (compare needs a single interval count)");
    cfg.N_list = {get_positive_int(j.at("N"), "N")};
  } else {
    if (!j.contains("N_list")) fail("N_list", "missing (sweep needs a list of interval counts)");
    cfg.N_list = get_n_list(j.at("N_list"), "N_list");
  }
  cfg.schemes = get_schemes(j);

  const Eigen::Index nq = sys.n_q();
  const Eigen::Index nu = sys.n_u();
  const Eigen::Index nx = 2 * nq;
  OptimalControlProblem p = make_problem(sys, cfg.tf, cfg.N_list.front());

  if (j.contains("cost")) {
    const json& c = j.at("cost");
    if (!c.is_object()) fail("cost", "expected an object");
    reject_unknown(c, {"Q", "R", "Qf", "x_ref", "u_ref", "xf_ref"}, "cost");
    if (c.contains("Q")) p.stage.Q = get_vector(c.at("Q"), "cost.Q", nx).asDiagonal();
    if (c.contains("R")) p.stage.R = get_vector(c.at("R"), "cost.R", nu).asDiagonal();
    if (c.contains("Qf")) p.terminal.Qf = get_vector(c.at("Qf"), "cost.Qf", nx).asDiagonal();
    if (c.contains("x_ref")) p.stage.x_ref = get_vector(c.at("x_ref"), "cost.x_ref", nx);
    if (c.contains("u_ref")) p.stage.u_ref = get_vector(c.at("u_ref"), "cost.u_ref", nu);
    if (c.contains("xf_ref")) p.terminal.x_ref = get_vector(c.at("xf_ref"), "cost.xf_ref", nx);
  }
  parse_limits(j, "control_limits", nu, p.u_lower, p.u_upper, false);
  parse_limits(j, "state_limits", nx, p.x_lower, p.x_upper, true);
  if (j.contains("initial_state")) p.x0 = get_vector(j.at("initial_state"), "initial_state", nx);
  if (j.contains("terminal_state")) p.xf = get_vector(j.at("terminal_state"), "terminal_state", nx);
  if (j.contains("terminal_fixed")) {
    const json& f = j.at("terminal_fixed");
    if (f.is_boolean()) {
      p.xf_fixed.assign(static_cast<size_t>(nx), f.get<bool>());
    } else if (f.is_array() && static_cast<Eigen::Index>(f.size()) == nx) {
      p.xf_fixed.clear();
      for (size_t i = 0; i < f.size(); ++i) p.xf_fixed.push_back(get_bool(f[i], "terminal_fixed[" + std::to_string(i) + "]"));
    } else {
      fail("terminal_fixed", "expected true/false or an array of " + std::to_string(nx) + " booleans");
    }
  }
  try {
    p.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("config describes an invalid problem: ") + e.what());
  }
  cfg.ocp = p;
  cfg.solver = parse_solver(j);
  cfg.output_dir = output_dir_of(j);
  if (j.contains("plot")) cfg.plot = get_bool(j.at("plot"), "plot");
  return cfg;
}

StudyConfig parse_study_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(j, {"meta", "system", "initial_state", "control", "tf", "N_list", "schemes", "output_dir", "plot"},
                 "");
  StudyConfig cfg;
  cfg.meta = meta_of(j);
  if (j.contains("system")) {
    if (!j.at("system").is_string()) fail("system", "expected 'damped' or 'harmonic'");
    cfg.system = j.at("system").get<std::string>();
  }
  if (cfg.system != "damped" && cfg.system != "harmonic") fail("system", "expected 'damped' or 'harmonic'");
  if (j.contains("initial_state")) {
    const VectorXd x0 = get_vector(j.at("initial_state"), "initial_state", 2);
    cfg.q0 = x0[0];
    cfg.v0 = x0[1];
  }
  if (j.contains("control")) cfg.control = get_number(j.at("control"), "control");
  if (j.contains("tf")) cfg.tf = get_number(j.at("tf"), "tf");
  if (!(cfg.tf > 0.0)) fail("tf", "must be positive");
  if (!j.contains("N_list")) fail("N_list", "missing");
  cfg.N_list = get_n_list(j.at("N_list"), "N_list");
  if (cfg.N_list.size() < 3) fail("N_list", "a slope needs at least three entries");
  cfg.schemes = get_schemes(j);
  cfg.output_dir = output_dir_of(j);
  if (j.contains("plot")) cfg.plot = get_bool(j.at("plot"), "plot");
  return cfg;
}

json effective_config(const RunConfig& cfg, int ref_multiplier) {
  const OptimalControlProblem& p = cfg.ocp;
  json j;
  j["meta"] = cfg.meta;
  j["problem"] = cfg.problem;
  j["params"] = cfg.params;
  j["tf"] = cfg.tf;
  if (cfg.N_list.size() == 1) {
    j["N"] = cfg.N_list.front();
  } else {
    j["N_list"] = cfg.N_list;
  }
  j["schemes"] = schemes_json(cfg.schemes);
  j["cost"] = {{"Q", diag_json(p.stage.Q)},         {"R", diag_json(p.stage.R)},
               {"Qf", diag_json(p.terminal.Qf)},    {"x_ref", vec_json(p.stage.x_ref)},
               {"u_ref", vec_json(p.stage.u_ref)},  {"xf_ref", vec_json(p.terminal.x_ref)}};
  j["control_limits"] = limits_json(p.u_lower, p.u_upper);
  j["state_limits"] = limits_json(p.x_lower, p.x_upper);
  j["initial_state"] = vec_json(p.x0);
  j["terminal_state"] = vec_json(p.xf);
  j["terminal_fixed"] = p.xf_fixed;
  j["solver"] = solver_json(cfg.solver);
  j["reference"] = {{"scheme", "2nd-rk4"}, {"multiplier", ref_multiplier},
                    {"N", ref_multiplier * cfg.N_list.back()}};
  j["plot"] = cfg.plot;
  return j;
}

json effective_config(const StudyConfig& cfg) {
  json j;
  j["meta"] = cfg.meta;
  j["system"] = cfg.system;
  j["initial_state"] = {cfg.q0, cfg.v0};
  j["control"] = cfg.control;
  j["tf"] = cfg.tf;
  j["N_list"] = cfg.N_list;
  j["schemes"] = schemes_json(cfg.schemes);
  j["plot"] = cfg.plot;
  return j;
}

bool RunSummary::all_optimal() const {
  if (reference_status != SolveStatus::Optimal) return false;
  return std::all_of(rows.begin(), rows.end(), [](const RunRow& r) { return r.status == SolveStatus::Optimal; });
}

RunSummary run_experiment(const RunConfig& cfg, int ref_multiplier) {
  if (ref_multiplier < 1) throw ConfigError("reference multiplier must be at least 1");
  if (cfg.schemes.empty()) fail("schemes", "expected a nonempty array of scheme labels");
  if (cfg.N_list.empty()) fail("N_list", "expected at least one interval count");
  RunSummary summary;
  OptimalControlProblem ref_problem = cfg.ocp;
  ref_problem.N = ref_multiplier * cfg.N_list.back();
  summary.reference_N = ref_problem.N;
  const OcpSolution ref = solve_ocp(ref_problem, Scheme::make(SchemeKind::SecondRK4), cfg.solver);
  summary.reference_status = ref.solve.report.status;
  const bool ref_ok = ref.solve.report.status == SolveStatus::Optimal;
  const CubicHermiteSpline ref_spline = reconstruct(ref.knots);

  for (SchemeKind kind : cfg.schemes) {
    for (int n : cfg.N_list) {
      OptimalControlProblem p = cfg.ocp;
      p.N = n;
      const OcpSolution sol = solve_ocp(p, Scheme::make(kind), cfg.solver);
      RunRow row;
      row.problem = cfg.problem;
      row.scheme = std::string(scheme_label(kind));
      row.N = n;
      row.h = p.step();
      row.status = sol.solve.report.status;
      row.solve_time = sol.solve.report.wall_time;
      row.outer_iters = sol.solve.report.outer_iters;
      row.inner_iters = sol.solve.report.inner_iters;
      row.terminal_violation = terminal_violation(p, sol.knots);
      if (row.status == SolveStatus::Optimal && ref_ok) {
        row.has_eta = true;
        row.eta_total = total_error(reconstruct(sol.knots), ref_spline).eta_total;
      }
      summary.rows.push_back(row);
    }
  }
  return summary;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_row(const RunRow& r) {
  std::ostringstream os;
  os << r.problem << ',' << r.scheme << ',' << r.N << ',' << format_double(r.h) << ','
     << (r.has_eta ? format_double(r.eta_total) : "") << ',' << format_double(r.solve_time) << ',' << r.outer_iters
     << ',' << r.inner_iters << ',' << status_label(r.status);
  return os.str();
}

void write_csv(const std::filesystem::path& path, const std::vector<RunRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << kCsvHeader << '\n';
  for (const auto& r : rows) out << csv_row(r) << '\n';
}

void write_sweep_svg(const std::filesystem::path& path, const std::vector<RunRow>& rows, const std::string& title) {
  // Series in first-appearance order.
  std::vector<std::string> names;
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  for (const auto& r : rows) {
    if (std::find(names.begin(), names.end(), r.scheme) == names.end()) names.push_back(r.scheme);
    if (r.has_eta && r.eta_total > 0.0) series[r.scheme].emplace_back(r.N, r.eta_total);
  }
  double xmin = kInf, xmax = -kInf, ymin = kInf, ymax = -kInf;
  for (const auto& [name, pts] : series) {
    for (auto [x, y] : pts) {
      xmin = std::min(xmin, std::log10(x));
      xmax = std::max(xmax, std::log10(x));
      ymin = std::min(ymin, std::log10(y));
      ymax = std::max(ymax, std::log10(y));
    }
  }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  xmin = std::floor(xmin * 10) / 10 - 0.05;
  xmax = std::ceil(xmax * 10) / 10 + 0.05;
  ymin = std::floor(ymin);
  ymax = std::ceil(ymax);
  if (ymax <= ymin) ymax = ymin + 1;

  const double W = 640, H = 440, L = 80, R = 170, T = 40, B = 60;
  auto px = [&](double lx) { return L + (lx - xmin) / (xmax - xmin) * (W - L - R); };
  auto py = [&](double ly) { return H - B - (ly - ymin) / (ymax - ymin) * (H - T - B); };
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
      << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<title>" << title << "</title>\n"
      << "<desc>log-log plot of total transcription error eta_total against interval count N</desc>\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << (L + (W - L - R) / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << title
      << "</text>\n";
  out << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << (W - L - R) << "\" height=\"" << (H - T - B)
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int e = static_cast<int>(ymin); e <= static_cast<int>(ymax); ++e) {
    out << "<line x1=\"" << L << "\" x2=\"" << (W - R) << "\" y1=\"" << py(e) << "\" y2=\"" << py(e)
        << "\" stroke=\"#ddd\"/>\n"
        << "<text x=\"" << (L - 6) << "\" y=\"" << py(e) + 4 << "\" text-anchor=\"end\">1e" << e << "</text>\n";
  }
  std::set<int> ticks;
  for (const auto& r : rows) ticks.insert(r.N);
  for (int n : ticks) {
    const double x = px(std::log10(n));
    out << "<line x1=\"" << x << "\" x2=\"" << x << "\" y1=\"" << T << "\" y2=\"" << (H - B)
        << "\" stroke=\"#eee\"/>\n"
        << "<text x=\"" << x << "\" y=\"" << (H - B + 16) << "\" text-anchor=\"middle\">" << n << "</text>\n";
  }
  out << "<text x=\"" << (L + (W - L - R) / 2) << "\" y=\"" << (H - 16) << "\" text-anchor=\"middle\">N</text>\n"
      << "<text transform=\"translate(20," << (T + (H - T - B) / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">eta_total</text>\n";
  for (size_t s = 0; s < names.size(); ++s) {
    const std::string& name = names[s];
    const char* color = colors[s % 6];
    out << "<g class=\"series\" data-scheme=\"" << name << "\">\n";
    const auto& pts = series[name];
    if (!pts.empty()) {
      out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
      for (auto [x, y] : pts) out << px(std::log10(x)) << ',' << py(std::log10(y)) << ' ';
      out << "\"/>\n";
      for (auto [x, y] : pts) {
        out << "<circle cx=\"" << px(std::log10(x)) << "\" cy=\"" << py(std::log10(y)) << "\" r=\"3\" fill=\"" << color
            << "\"/>\n";
      }
    }
    const double ly = T + 20 + 20 * static_cast<double>(s);
    out << "<line x1=\"" << (W - R + 15) << "\" x2=\"" << (W - R + 40) << "\" y1=\"" << ly << "\" y2=\"" << ly
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << (W - R + 46) << "\" y=\"" << ly + 4 << "\">" << name << "</text>\n</g>\n";
  }
  out << "</svg>\n";
}

StudySummary run_integrator_study(const StudyConfig& cfg) {
  if (cfg.schemes.empty()) fail("schemes", "expected a nonempty array of scheme labels");
  if (cfg.N_list.size() < 3) fail("N_list", "a slope needs at least three entries");
  const AnalyticTestSystem test = cfg.system == "damped" ? damped_test_system(cfg.q0, cfg.v0, cfg.control)
                                                         : harmonic_test_system(cfg.q0, cfg.v0);
  const bool bounded = test.lipschitz > 0.0;
  StudySummary summary;
  for (SchemeKind kind : cfg.schemes) {
    const ConvergenceResult res = convergence_study(test, Scheme::make(kind), cfg.tf, cfg.N_list);
    for (size_t i = 0; i < res.N.size(); ++i) {
      StudyRow row;
      row.scheme = std::string(scheme_label(kind));
      row.N = res.N[i];
      row.h = res.h[i];
      row.terminal_error = res.error[i];
      row.max_error = res.max_error[i];
      if (bounded && kind == SchemeKind::SecondEuler) {
        row.has_bound = true;
        row.bound = euler_bound(test.lipschitz, test.alpha, cfg.tf, row.h);
      } else if (bounded && kind == SchemeKind::SecondRK4) {
        row.has_bound = true;
        row.bound = rk4_bound(test.lipschitz, test.beta, cfg.tf, row.h);
      }
      summary.rows.push_back(row);
    }
    summary.slopes.emplace_back(std::string(scheme_label(kind)), res.slope);
  }
  return summary;
}

void write_study_csv(const std::filesystem::path& path, const StudySummary& summary) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "scheme,N,h,terminal_error,max_error,bound\n";
  for (const auto& r : summary.rows) {
    out << r.scheme << ',' << r.N << ',' << format_double(r.h) << ',' << format_double(r.terminal_error) << ','
        << format_double(r.max_error) << ',' << (r.has_bound ? format_double(r.bound) : "") << '\n';
  }
}

}  // namespace modshoot
