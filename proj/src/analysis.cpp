#include "modshoot/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace modshoot {

CubicHermiteSpline::CubicHermiteSpline(VectorXd times, MatrixXd q, MatrixXd qdot)
    : times_(std::move(times)), q_(std::move(q)), qdot_(std::move(qdot)) {
  if (times_.size() < 2) throw ContractViolation("spline reconstruction needs at least two knots");
  if (q_.rows() != times_.size() || qdot_.rows() != times_.size() || q_.cols() != qdot_.cols()) {
    throw ContractViolation("spline knots, values and derivatives disagree in shape");
  }
  for (Eigen::Index k = 0; k + 1 < times_.size(); ++k) {
    if (!(times_[k + 1] > times_[k])) throw ContractViolation("spline knot times must be strictly increasing");
  }
}

void CubicHermiteSpline::check_domain(double t) const {
  const double slack = 1e-12 * std::max(1.0, std::abs(tf()));
  if (!(t >= t0() - slack && t <= tf() + slack)) {
    std::ostringstream os;
    os << "spline evaluated at t = " << t << " outside [" << t0() << ", " << tf() << "]";
    throw ContractViolation(os.str());
  }
}

int CubicHermiteSpline::interval_of(double t) const {
  const double* begin = times_.data();
  const double* end = begin + times_.size();
  const auto it = std::upper_bound(begin, end, t);
  const int idx = static_cast<int>(it - begin) - 1;
  return std::clamp(idx, 0, intervals() - 1);
}

VectorXd CubicHermiteSpline::value(double t) const {
  check_domain(t);
  const int k = interval_of(t);
  const double h = times_[k + 1] - times_[k];
  const double s = (t - times_[k]) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
  const double h10 = s3 - 2.0 * s2 + s;
  const double h01 = -2.0 * s3 + 3.0 * s2;
  const double h11 = s3 - s2;
  return (h00 * q_.row(k) + h10 * h * qdot_.row(k) + h01 * q_.row(k + 1) + h11 * h * qdot_.row(k + 1)).transpose();
}

VectorXd CubicHermiteSpline::derivative(double t) const {
  check_domain(t);
  const int k = interval_of(t);
  const double h = times_[k + 1] - times_[k];
  const double s = (t - times_[k]) / h;
  const double s2 = s * s;
  const double d00 = (6.0 * s2 - 6.0 * s) / h;
  const double d10 = 3.0 * s2 - 4.0 * s + 1.0;
  const double d01 = (-6.0 * s2 + 6.0 * s) / h;
  const double d11 = 3.0 * s2 - 2.0 * s;
  return (d00 * q_.row(k) + d10 * qdot_.row(k) + d01 * q_.row(k + 1) + d11 * qdot_.row(k + 1)).transpose();
}

CubicHermiteSpline reconstruct(const KnotTrajectory& knots) {
  if (knots.times.size() < 2) throw ContractViolation("reconstruct: fewer than two knots");
  if (knots.derivs.empty()) throw ContractViolation("reconstruct: knots carry no velocities");
  return CubicHermiteSpline(knots.times, knots.q, knots.qdot());
}

namespace {

void check_same_domain(const CubicHermiteSpline& a, const CubicHermiteSpline& b) {
  const double tol = 1e-12 * std::max(1.0, std::abs(a.tf()));
  if (std::abs(a.t0() - b.t0()) > tol || std::abs(a.tf() - b.tf()) > tol) {
    throw ContractViolation("candidate and reference trajectories span different time domains");
  }
  if (a.n_q() != b.n_q()) throw ContractViolation("candidate and reference configurations differ in dimension");
}

}  // namespace

VectorXd config_error(const CubicHermiteSpline& candidate, const CubicHermiteSpline& reference, double t) {
  check_same_domain(candidate, reference);
  return candidate.value(t) - reference.value(t);
}

double romberg(const std::function<double(double)>& f, double a, double b, double rel_tol, int max_levels) {
  if (!(a < b)) throw ContractViolation("romberg: need a < b");
  if (max_levels < 1) throw ContractViolation("romberg: max_levels must be at least 1");
  auto sample = [&](double x) {
    const double y = f(x);
    if (!std::isfinite(y)) {
      std::ostringstream os;
      os << "romberg: non-finite integrand at x = " << x;
      throw EvaluationError(os.str(), {x});
    }
    return y;
  };
  std::vector<double> prev{0.5 * (b - a) * (sample(a) + sample(b))};
  std::vector<double> row;
  for (int level = 1; level <= max_levels; ++level) {
    const long panels = 1L << level;
    const double h = (b - a) / static_cast<double>(panels);
    double midpoints = 0.0;
    for (long i = 1; i < panels; i += 2) midpoints += sample(a + static_cast<double>(i) * h);
    row.assign(level + 1, 0.0);
    row[0] = 0.5 * prev[0] + h * midpoints;
    double factor = 1.0;
    for (int j = 1; j <= level; ++j) {
      factor *= 4.0;
      row[j] = row[j - 1] + (row[j - 1] - prev[j - 1]) / (factor - 1.0);
    }
    const double diff = std::abs(row[level] - prev[level - 1]);
    if (level >= 2 && diff <= rel_tol * std::abs(row[level])) return row[level];
    prev.swap(row);
  }
  return prev.back();
}

double interval_error(const CubicHermiteSpline& candidate, const CubicHermiteSpline& reference, int k,
                      ErrorAggregation mode) {
  check_same_domain(candidate, reference);
  if (k < 0 || k >= candidate.intervals()) {
    throw ContractViolation("interval_error: interval index " + std::to_string(k) + " out of range");
  }
  const double a = candidate.times()[k];
  const double b = candidate.times()[k + 1];
  auto integrand = [&](double t) {
    const VectorXd e = candidate.value(t) - reference.value(t);
    return mode == ErrorAggregation::ComponentSum ? std::abs(e.sum()) : e.cwiseAbs().sum();
  };
  return romberg(integrand, a, b);
}

ErrorReport total_error(const CubicHermiteSpline& candidate, const CubicHermiteSpline& reference,
                        ErrorAggregation mode) {
  check_same_domain(candidate, reference);
  ErrorReport rep;
  rep.eta.resize(candidate.intervals());
  rep.reference_N = reference.intervals();
  for (int k = 0; k < candidate.intervals(); ++k) {
    rep.eta[k] = interval_error(candidate, reference, k, mode);
    rep.eta_total += rep.eta[k];
  }
  return rep;
}

namespace {

void check_bound_args(double lipschitz, double tf, double h, double coef, const char* coef_name) {
  if (!(lipschitz > 0.0)) throw ContractViolation("error bound: Lipschitz constant must be positive");
  if (!(tf > 0.0)) throw ContractViolation("error bound: tf must be positive");
  if (!(h > 0.0)) throw ContractViolation("error bound: h must be positive");
  if (!(coef >= 0.0)) throw ContractViolation(std::string("error bound: ") + coef_name + " must be nonnegative");
}

}  // namespace

double euler_bound(double lipschitz, double alpha, double tf, double h) {
  check_bound_args(lipschitz, tf, h, alpha, "alpha");
  const double hl = h * lipschitz;
  return alpha * h * h * h / (6.0 * hl + 3.0 * hl * hl) * std::expm1(tf * lipschitz);
}

double rk4_bound(double lipschitz, double beta, double tf, double h) {
  check_bound_args(lipschitz, tf, h, beta, "beta");
  const double hl = h * lipschitz;
  double series = 0.0;
  double term = 1.0;
  for (int i = 1; i <= 5; ++i) {
    term *= hl / i;
    series += term;
  }
  return beta * std::pow(h, 6) / (720.0 * series) * std::expm1(tf * lipschitz);
}

AnalyticTestSystem damped_test_system(double q0, double v0, double u) {
  AnalyticTestSystem t;
  t.name = "damped";
  t.system = SecondOrderSystem("damped", 1, 1, 6, [](const auto& /*q*/, const auto& qd, const auto& uu) {
    using V = std::decay_t<decltype(qd)>;
    V out = uu - qd;
    return out;
  });
  t.x0 = (VectorXd(2) << q0, v0).finished();
  t.u = VectorXd::Constant(1, u);
  t.exact_q = [q0, v0, u](double time) {
    return VectorXd::Constant(1, q0 + u * time - (v0 - u) * std::expm1(-time));
  };
  if (u == 0.0) {
    t.lipschitz = 1.0;
    t.alpha = std::abs(v0);
    t.beta = std::abs(v0);
  }
  return t;
}

AnalyticTestSystem harmonic_test_system(double q0, double v0) {
  AnalyticTestSystem t;
  t.name = "harmonic";
  t.system = SecondOrderSystem("harmonic", 1, 1, 6, [](const auto& q, const auto& /*qd*/, const auto& /*u*/) {
    using V = std::decay_t<decltype(q)>;
    V out = -q;
    return out;
  });
  t.x0 = (VectorXd(2) << q0, v0).finished();
  t.u = VectorXd::Zero(1);
  t.exact_q = [q0, v0](double time) { return VectorXd::Constant(1, q0 * std::cos(time) + v0 * std::sin(time)); };
  // No bound constants: q can take the same value at two times where q'
  // differs, so no L links |q'(t1) - q'(t2)| to |q(t1) - q(t2)|.
  return t;
}

double loglog_slope(const std::vector<double>& h, const std::vector<double>& error) {
  if (h.size() != error.size() || h.size() < 2) throw ContractViolation("loglog_slope: need matching samples");
  const auto n = static_cast<double>(h.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double x = std::log(h[i]);
    const double y = std::log(error[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

void check_n_list(const std::vector<int>& N_list) {
  if (N_list.size() < 3) throw ContractViolation("convergence study needs at least three grid sizes");
  for (std::size_t i = 0; i < N_list.size(); ++i) {
    if (N_list[i] < 1 || (i > 0 && N_list[i] <= N_list[i - 1])) {
      throw ContractViolation("convergence study grid sizes must be positive and strictly increasing");
    }
  }
}

}  // namespace

ConvergenceResult convergence_study(const AnalyticTestSystem& test, const Scheme& scheme, double tf,
                                    const std::vector<int>& N_list) {
  check_n_list(N_list);
  ConvergenceResult res;
  const VectorXd exact = test.exact_q(tf);
  for (int n : N_list) {
    const double h = tf / n;
    const MatrixXd controls = test.u.transpose().replicate(n, 1);
    const KnotTrajectory traj = rollout(test.system, scheme, test.x0, controls, h);
    res.N.push_back(n);
    res.h.push_back(h);
    res.error.push_back((traj.q.row(n).transpose() - exact).norm());
    double worst = 0.0;
    for (int k = 0; k <= n; ++k) {
      worst = std::max(worst, (traj.q.row(k).transpose() - test.exact_q(traj.times[k])).norm());
    }
    res.max_error.push_back(worst);
  }
  res.slope = loglog_slope(res.h, res.error);
  return res;
}

OcpSolution solve_ocp(const OptimalControlProblem& problem, const Scheme& scheme, const SolverOptions& opts) {
  const NlpProgram nlp = build_nlp(problem, scheme);
  OcpSolution out;
  out.solve = solve(nlp, opts, VectorXd::Zero(nlp.n_vars));
  const DecisionLayout layout(problem.N, problem.system.n_q(), problem.system.n_u());
  out.knots = layout.unpack(out.solve.z, problem.step());
  return out;
}

ConvergenceResult convergence_study(const OptimalControlProblem& base, const Scheme& scheme,
                                    const std::vector<int>& N_list, const SolverOptions& opts, int ref_multiplier) {
  check_n_list(N_list);
  if (ref_multiplier < 1) throw ContractViolation("reference multiplier must be at least 1");
  OptimalControlProblem ref_problem = base;
  ref_problem.N = ref_multiplier * N_list.back();
  const OcpSolution ref = solve_ocp(ref_problem, Scheme::make(SchemeKind::SecondRK4), opts);
  if (ref.solve.report.status != SolveStatus::Optimal) {
    throw std::runtime_error("reference solve at N = " + std::to_string(ref_problem.N) + " ended with status " +
                             std::string(status_label(ref.solve.report.status)));
  }
  const CubicHermiteSpline ref_spline = reconstruct(ref.knots);

  ConvergenceResult res;
  for (int n : N_list) {
    OptimalControlProblem p = base;
    p.N = n;
    const OcpSolution sol = solve_ocp(p, scheme, opts);
    if (sol.solve.report.status != SolveStatus::Optimal) {
      throw std::runtime_error("solve at N = " + std::to_string(n) + " ended with status " +
                               std::string(status_label(sol.solve.report.status)));
    }
    res.N.push_back(n);
    res.h.push_back(p.step());
    res.error.push_back(total_error(reconstruct(sol.knots), ref_spline).eta_total);
  }
  res.slope = loglog_slope(res.h, res.error);
  return res;
}

}  // namespace modshoot
