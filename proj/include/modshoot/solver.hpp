#pragma once

// Augmented Lagrangian solver for NlpProgram.
//
// Outer loop: minimize the augmented Lagrangian
//   L(z) = f + lam'c + rho/2 |c|^2 + 1/(2 rho) sum(max(0, mu + rho g)^2 - mu^2)
// then update lam += rho c, mu = max(0, mu + rho g), and grow rho whenever the
// constraint violation did not shrink by a factor of four.
//
// Inner loop: limited-memory BFGS with Armijo backtracking. The initial
// inverse-Hessian of the two-loop recursion is the Gauss-Newton model
// H_f + rho J'J + rho G_A'G_A (active inequalities only), factorized sparsely.

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "modshoot/nlp.hpp"

namespace modshoot {

struct SolverOptions {
  double feas_tol = 1e-8;        ///< infinity norm of constraint violation
  double stat_tol = 1e-6;        ///< infinity norm of the augmented Lagrangian gradient
  double penalty_init = 10.0;
  double penalty_growth = 10.0;
  double penalty_max = 1e12;
  int max_outer = 30;
  int max_inner = 500;           ///< per outer iteration
  double armijo = 1e-4;          ///< sufficient decrease
  double backtrack = 0.5;
  int memory = 8;                ///< stored secant pairs

  /// Throws ConfigError for nonpositive tolerances or growth <= 1.
  void validate() const;
};

enum class SolveStatus { Optimal, MaxIterations, LineSearchFailure, EvaluationError };

std::string_view status_label(SolveStatus status);

struct OuterIteration {
  double penalty = 0.0;
  double violation = 0.0;
  double stationarity = 0.0;
  int inner_iters = 0;
};

struct SolveReport {
  SolveStatus status = SolveStatus::MaxIterations;
  int outer_iters = 0;
  int inner_iters = 0;
  double final_feasibility = 0.0;
  double final_stationarity = 0.0;
  double wall_time = 0.0;  ///< seconds, monotonic clock
  std::vector<OuterIteration> history;
  std::string message;
  /// Set when status is EvaluationError.
  std::vector<double> failed_point;
};

struct SolveResult {
  VectorXd z;
  SolveReport report;
};

SolveResult solve(const NlpProgram& nlp, const SolverOptions& opts, const VectorXd& initial);

/// Largest discrepancy between the program's analytic derivatives (objective
/// gradient, equality and inequality Jacobians) and central differences with
/// step 1e-6 max(1, |z_i|). Entries are compared as |a - b| / max(1, |b|).
double check_derivatives(const NlpProgram& nlp, const VectorXd& point);

}  // namespace modshoot
