#pragma once

// Discrete optimal control problems and their transcription into an NLP.
//
// Decision vector layout, with stride 2 n_q + n_u:
//   [q0, q'0, u0, q1, q'1, u1, ..., u_{N-1}, qN, q'N]
//
// Equality residuals are ordered as the N interval defects, then the fixed
// initial state, then the fixed terminal components. Inequality residuals are
// ordered by knot; at each knot the state bounds come first (upper, lower per
// component) followed by the control bounds for knots 0..N-1.

#include <vector>

#include <Eigen/Core>

#include "modshoot/dynamics.hpp"
#include "modshoot/nlp.hpp"
#include "modshoot/transcription.hpp"

namespace modshoot {

/// l(x, u) = (x - x_ref)' Q (x - x_ref) + (u - u_ref)' R (u - u_ref).
struct QuadraticCost {
  MatrixXd Q;
  MatrixXd R;
  VectorXd x_ref;
  VectorXd u_ref;
};

/// phi(x_N) = (x_N - x_ref)' Qf (x_N - x_ref).
struct TerminalCost {
  MatrixXd Qf;
  VectorXd x_ref;
};

struct OptimalControlProblem {
  SecondOrderSystem system;
  double tf = 1.0;
  int N = 1;
  QuadraticCost stage;
  TerminalCost terminal;
  /// Per-component control limits; +-infinity disables a side.
  VectorXd u_lower;
  VectorXd u_upper;
  /// Optional limits on the stacked state (q, q'); empty vectors mean none.
  VectorXd x_lower;
  VectorXd x_upper;
  VectorXd x0;
  VectorXd xf;
  std::vector<bool> xf_fixed;

  double step() const { return tf / N; }
  int n_x() const { return 2 * system.n_q(); }

  /// Throws ConfigError naming the first inconsistency found.
  void validate() const;
};

/// A problem on `sys` with zero state weights, unit control weight, no bounds,
/// zero initial state and free terminal state.
OptimalControlProblem make_problem(SecondOrderSystem sys, double tf, int N);

/// Index arithmetic for the decision vector.
class DecisionLayout {
 public:
  DecisionLayout(int N, int n_q, int n_u) : N_(N), n_q_(n_q), n_u_(n_u) {}

  int N() const { return N_; }
  int n_q() const { return n_q_; }
  int n_u() const { return n_u_; }
  int stride() const { return 2 * n_q_ + n_u_; }
  int n_vars() const { return (N_ + 1) * 2 * n_q_ + N_ * n_u_; }
  int state_index(int k) const { return k * stride(); }
  int qdot_index(int k) const { return k * stride() + n_q_; }
  int control_index(int k) const { return k * stride() + 2 * n_q_; }

  /// states: (N+1) x 2 n_q rows of (q, q'); controls: N x n_u.
  VectorXd pack(const MatrixXd& states, const MatrixXd& controls) const;
  VectorXd pack(const KnotTrajectory& traj) const;
  /// Knot times are {0, h, ..., N h}.
  KnotTrajectory unpack(const VectorXd& z, double h) const;

 private:
  int N_;
  int n_q_;
  int n_u_;
};

/// Transcribes `problem` with `scheme`. The objective uses the left rectangle
/// rule: sum_{k<N} l(x_k, u_k) h + phi(x_N).
NlpProgram build_nlp(const OptimalControlProblem& problem, const Scheme& scheme);

}  // namespace modshoot
