#pragma once

// Accuracy analysis of transcribed trajectories.
//
// A knot solution is turned back into a continuous configuration by cubic
// Hermite interpolation of (q_k, q'_k). The transcription error of a candidate
// against a reference is then, per candidate interval,
//
//   eta_k = integral over [t_k, t_{k+1}] of | sum_i (q_hat(t) - q_ref(t))_i | dt
//
// computed with Romberg quadrature, and eta_total = sum_k eta_k.

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "modshoot/ocp.hpp"
#include "modshoot/solver.hpp"
#include "modshoot/transcription.hpp"

namespace modshoot {

/// Piecewise cubic Hermite interpolant of a configuration trajectory.
class CubicHermiteSpline {
 public:
  /// times: N+1 strictly increasing knots; q, qdot: (N+1) x n_q.
  CubicHermiteSpline(VectorXd times, MatrixXd q, MatrixXd qdot);

  int n_q() const { return static_cast<int>(q_.cols()); }
  int intervals() const { return static_cast<int>(times_.size()) - 1; }
  double t0() const { return times_[0]; }
  double tf() const { return times_[times_.size() - 1]; }
  const VectorXd& times() const { return times_; }

  /// Interval containing t; the right end belongs to the last interval.
  int interval_of(double t) const;
  VectorXd value(double t) const;
  VectorXd derivative(double t) const;
  VectorXd operator()(double t) const { return value(t); }

 private:
  void check_domain(double t) const;

  VectorXd times_;
  MatrixXd q_;
  MatrixXd qdot_;
};

/// Requires at least two knots.
CubicHermiteSpline reconstruct(const KnotTrajectory& knots);

/// candidate(t) - reference(t). Both splines must span the same time domain.
VectorXd config_error(const CubicHermiteSpline& candidate, const CubicHermiteSpline& reference, double t);

/// Romberg integration of f over [a, b]. Stops once two successive diagonal
/// entries agree to rel_tol relative to the latest one, or at max_levels.
double romberg(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-10,
               int max_levels = 12);

enum class ErrorAggregation {
  ComponentSum,    ///< |sum_i e_i|, components may cancel
  ComponentAbsSum  ///< sum_i |e_i|
};

double interval_error(const CubicHermiteSpline& candidate, const CubicHermiteSpline& reference, int k,
                      ErrorAggregation mode = ErrorAggregation::ComponentSum);

struct ErrorReport {
  VectorXd eta;  ///< per candidate interval, configuration units times seconds
  double eta_total = 0.0;
  int reference_N = 0;
};

ErrorReport total_error(const CubicHermiteSpline& candidate, const CubicHermiteSpline& reference,
                        ErrorAggregation mode = ErrorAggregation::ComponentSum);

/// Global error bound of the modified Euler scheme:
///   alpha h^3 / (6 h L + 3 h^2 L^2) * (exp(tf L) - 1).
double euler_bound(double lipschitz, double alpha, double tf, double h);

/// Global error bound of the modified RK4 scheme:
///   beta h^6 / (720 sum_{i=1..5} (h L)^i / i!) * (exp(tf L) - 1).
double rk4_bound(double lipschitz, double beta, double tf, double h);

/// A second-order system with a closed-form solution under constant control,
/// plus hand-derived constants for the error bounds.
struct AnalyticTestSystem {
  std::string name;
  SecondOrderSystem system;
  VectorXd x0;  ///< stacked (q, q') at t = 0
  VectorXd u;   ///< constant control
  std::function<VectorXd(double)> exact_q;
  double lipschitz = 0.0;  ///< L linking successive derivative orders; 0 if unknown
  double alpha = 0.0;      ///< bound on |q'''| over [0, tf]
  double beta = 0.0;       ///< bound on |q^(6)| over [0, tf]
};

/// q'' = -q' + u. Solution: q' = u + (v0 - u) e^-t, q = q0 + u t + (v0 - u)(1 - e^-t).
/// The bound constants are only filled in for u = 0, where |q^(i+1)(t1) -
/// q^(i+1)(t2)| = |q^(i)(t1) - q^(i)(t2)| for every i and L = 1,
/// alpha = beta = |v0|.
AnalyticTestSystem damped_test_system(double q0, double v0, double u);

/// q'' = -q (the control input is ignored). Solution q = q0 cos t + v0 sin t.
/// Bound constants are left at zero; the Lipschitz hypothesis does not hold.
AnalyticTestSystem harmonic_test_system(double q0, double v0);

struct ConvergenceResult {
  std::vector<int> N;
  std::vector<double> h;
  std::vector<double> error;
  /// Integrator mode only: max over knots of |q_k - q(t_k)|.
  std::vector<double> max_error;
  double slope = 0.0;
};

/// Least-squares slope of log(error) against log(h).
double loglog_slope(const std::vector<double>& h, const std::vector<double>& error);

/// Integrator mode: rolls the scheme out to tf on each grid and measures the
/// terminal configuration error |q_N - q(tf)| against the closed form.
ConvergenceResult convergence_study(const AnalyticTestSystem& test, const Scheme& scheme, double tf,
                                    const std::vector<int>& N_list);

/// Transcription-error mode: solves `base` at each N and measures eta_total
/// against a SecondRK4 solve at ref_multiplier times the largest N.
/// Throws std::runtime_error naming the N whose solve failed.
ConvergenceResult convergence_study(const OptimalControlProblem& base, const Scheme& scheme,
                                    const std::vector<int>& N_list, const SolverOptions& opts,
                                    int ref_multiplier = 8);

/// Solves `problem` from the all-zero initial guess and reconstructs the
/// configuration spline of the solution.
struct OcpSolution {
  SolveResult solve;
  KnotTrajectory knots;
};
OcpSolution solve_ocp(const OptimalControlProblem& problem, const Scheme& scheme, const SolverOptions& opts);

}  // namespace modshoot
