#pragma once

// Discretization schemes for direct shooting.
//
// Two families are provided. The first-order schemes apply an explicit
// Runge-Kutta tableau to the augmented state x = (q, q'). The second-order
// schemes propagate q' with the Runge-Kutta stages and integrate q' exactly
// over the step, so the control at knot k already moves q at knot k+1:
//
//   SecondEuler: K1 = h f(q, q', u)
//                q+ = q + h q' + h K1 / 2,   q'+ = q' + K1
//   SecondRK4:   K1 = h f(q,         q',        u)
//                K2 = h f(q + h q'/2, q' + K1/2, u)
//                K3 = h f(q + h q'/2, q' + K2/2, u)
//                K4 = h f(q + h q',   q' + K3,   u)
//                q+  = q + h q' + h (K1/5 + K2/6 + K3/10 + K4/30)
//                q'+ = q' + (K1 + 2 K2 + 2 K3 + K4) / 6
//
// All stages hold the control constant (zero-order hold).

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "modshoot/dynamics.hpp"
#include "modshoot/errors.hpp"

namespace modshoot {

enum class SchemeKind { FirstEuler, SecondEuler, FirstRK4, SecondRK4, EulerOrderN };

/// Explicit Runge-Kutta coefficients; `a` is strictly lower triangular.
struct ButcherTableau {
  int stages = 0;
  MatrixXd a;
  VectorXd b;
};

struct Scheme {
  SchemeKind kind = SchemeKind::SecondRK4;
  /// Classic tableau for the first-order kinds, empty otherwise.
  ButcherTableau tableau;
  /// Expected global convergence order of the configuration. Informational.
  int order_hint = 0;

  static Scheme make(SchemeKind kind);

  bool is_first_order() const { return kind == SchemeKind::FirstEuler || kind == SchemeKind::FirstRK4; }
  std::string_view label() const;
};

/// "1st-euler", "2nd-euler", "1st-rk4", "2nd-rk4", "euler-n".
std::string_view scheme_label(SchemeKind kind);
/// Inverse of scheme_label; unknown labels raise ConfigError.
SchemeKind parse_scheme(std::string_view label);

template <class T>
struct SecondOrderState {
  Vec<T> q;
  Vec<T> qdot;
};

namespace detail {

inline void require_positive_step(double h) {
  if (!(h > 0.0)) throw ContractViolation("step size must be positive, got " + std::to_string(h));
}

// One explicit Runge-Kutta step of x' = flow(x, u) with u held constant.
template <class T, class Flow>
Vec<T> explicit_rk_step(const ButcherTableau& tab, Flow&& flow, const Vec<T>& x, const Vec<T>& u, double h) {
  std::vector<Vec<T>> k;
  k.reserve(tab.stages);
  for (int i = 0; i < tab.stages; ++i) {
    Vec<T> xi = x;
    for (int j = 0; j < i; ++j) {
      if (tab.a(i, j) != 0.0) xi += tab.a(i, j) * k[j];
    }
    k.push_back(h * flow(xi, u));
  }
  Vec<T> next = x;
  for (int i = 0; i < tab.stages; ++i) next += tab.b[i] * k[i];
  return next;
}

template <class T>
Vec<T> stack(const Vec<T>& top, const Vec<T>& bottom) {
  Vec<T> out(top.size() + bottom.size());
  out << top, bottom;
  return out;
}

}  // namespace detail

/// x+ = x + h f1(x, u).
template <class T>
Vec<T> step_first_euler(const FirstOrderSystem& sys, const Vec<T>& x, const Vec<T>& u, double h) {
  detail::require_positive_step(h);
  const Scheme s = Scheme::make(SchemeKind::FirstEuler);
  return detail::explicit_rk_step<T>(
      s.tableau, [&](const Vec<T>& xi, const Vec<T>& ui) { return sys.flow(xi, ui); }, x, u, h);
}

/// Classic four-stage Runge-Kutta on x' = f1(x, u).
template <class T>
Vec<T> step_first_rk4(const FirstOrderSystem& sys, const Vec<T>& x, const Vec<T>& u, double h) {
  detail::require_positive_step(h);
  const Scheme s = Scheme::make(SchemeKind::FirstRK4);
  return detail::explicit_rk_step<T>(
      s.tableau, [&](const Vec<T>& xi, const Vec<T>& ui) { return sys.flow(xi, ui); }, x, u, h);
}

template <class T>
SecondOrderState<T> step_second_euler(const SecondOrderSystem& sys, const Vec<T>& q, const Vec<T>& qdot,
                                      const Vec<T>& u, double h) {
  detail::require_positive_step(h);
  const Vec<T> k1 = h * sys.accel(q, qdot, u);
  return {q + h * qdot + (0.5 * h) * k1, qdot + k1};
}

template <class T>
SecondOrderState<T> step_second_rk4(const SecondOrderSystem& sys, const Vec<T>& q, const Vec<T>& qdot,
                                    const Vec<T>& u, double h) {
  detail::require_positive_step(h);
  const Vec<T> q_mid = q + (0.5 * h) * qdot;
  const Vec<T> k1 = h * sys.accel(q, qdot, u);
  const Vec<T> k2 = h * sys.accel(q_mid, Vec<T>(qdot + 0.5 * k1), u);
  const Vec<T> k3 = h * sys.accel(q_mid, Vec<T>(qdot + 0.5 * k2), u);
  const Vec<T> k4 = h * sys.accel(Vec<T>(q + h * qdot), Vec<T>(qdot + k3), u);
  SecondOrderState<T> next;
  next.q = q + h * qdot + h * (k1 / 5.0 + k2 / 6.0 + k3 / 10.0 + k4 / 30.0);
  next.qdot = qdot + (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
  return next;
}

/// Order-N modified Euler on stacked derivatives (q, q', ..., q^(N-1)).
/// With F = fN at the knot, block i advances as
///   sum_{j=0}^{N-1-i} h^j/j! q^(i+j) + h^(N-i)/(N-i)! F.
template <class T>
Vec<T> step_euler_order_n(const HighOrderSystem& sys, const Vec<T>& derivs, const Vec<T>& u, double h) {
  detail::require_positive_step(h);
  const int order = sys.order();
  const Eigen::Index n = sys.n_q();
  // K = h F, and h^p/p! F is written (h^(p-1)/p!) K so that order 2 matches
  // step_second_euler term for term.
  const Vec<T> k = h * sys.top_deriv(derivs, u);
  Vec<T> next(derivs.size());
  for (int i = 0; i < order; ++i) {
    Vec<T> block = derivs.segment(i * n, n);
    double taylor = 1.0;
    for (int j = 1; j < order - i; ++j) {
      taylor = taylor * h / j;
      block += taylor * derivs.segment((i + j) * n, n);
    }
    const int p = order - i;
    double top = 1.0;
    for (int m = 1; m < p; ++m) top *= h;
    for (int m = 2; m <= p; ++m) top /= m;
    block += top * k;
    next.segment(i * n, n) = block;
  }
  return next;
}

/// Advances the stacked state (q, q') of a second-order system by one
/// interval. First-order kinds integrate the augmented flow (q', f2).
template <class T>
Vec<T> propagate(const SecondOrderSystem& sys, const Scheme& scheme, const Vec<T>& x, const Vec<T>& u,
                 double h) {
  const Eigen::Index n = sys.n_q();
  detail::check_dim(sys.name(), "state", x.size(), 2 * n);
  const Vec<T> q = x.head(n);
  const Vec<T> qd = x.tail(n);
  switch (scheme.kind) {
    case SchemeKind::FirstEuler:
    case SchemeKind::FirstRK4: {
      detail::require_positive_step(h);
      auto flow = [&](const Vec<T>& xi, const Vec<T>& ui) {
        const Vec<T> qi = xi.head(n);
        const Vec<T> qdi = xi.tail(n);
        return detail::stack<T>(qdi, sys.accel(qi, qdi, ui));
      };
      return detail::explicit_rk_step<T>(scheme.tableau, flow, x, u, h);
    }
    case SchemeKind::SecondEuler: {
      auto next = step_second_euler<T>(sys, q, qd, u, h);
      return detail::stack<T>(next.q, next.qdot);
    }
    case SchemeKind::SecondRK4: {
      auto next = step_second_rk4<T>(sys, q, qd, u, h);
      return detail::stack<T>(next.q, next.qdot);
    }
    case SchemeKind::EulerOrderN:
      return step_euler_order_n<T>(HighOrderSystem(sys), x, u, h);
  }
  throw ContractViolation("unhandled scheme");
}

/// Advances stacked derivatives of a high-order system. Second-order kinds
/// require order 2.
template <class T>
Vec<T> propagate(const HighOrderSystem& sys, const Scheme& scheme, const Vec<T>& x, const Vec<T>& u, double h) {
  switch (scheme.kind) {
    case SchemeKind::EulerOrderN:
      return step_euler_order_n<T>(sys, x, u, h);
    case SchemeKind::FirstEuler:
    case SchemeKind::FirstRK4: {
      detail::require_positive_step(h);
      const Eigen::Index n = sys.n_q();
      const Eigen::Index lower = (sys.order() - 1) * n;
      auto flow = [&](const Vec<T>& xi, const Vec<T>& ui) {
        Vec<T> xdot(xi.size());
        xdot.head(lower) = xi.tail(lower);
        xdot.tail(n) = sys.top_deriv(xi, ui);
        return xdot;
      };
      return detail::explicit_rk_step<T>(scheme.tableau, flow, x, u, h);
    }
    case SchemeKind::SecondEuler:
    case SchemeKind::SecondRK4:
      if (sys.order() != 2) {
        throw ContractViolation(std::string(scheme.label()) + " requires a second-order system");
      }
      return propagate<T>(sys.to_second_order(), scheme, x, u, h);
  }
  throw ContractViolation("unhandled scheme");
}

/// Residual of the propagation equation between two knots: the state
/// predicted from knot k minus the state at knot k+1.
template <class T>
Vec<T> defect(const SecondOrderSystem& sys, const Scheme& scheme, const Vec<T>& x_k, const Vec<T>& x_next,
              const Vec<T>& u_k, double h) {
  detail::check_dim(sys.name(), "next state", x_next.size(), 2 * Eigen::Index{sys.n_q()});
  return propagate<T>(sys, scheme, x_k, u_k, h) - x_next;
}

template <class T>
Vec<T> defect(const HighOrderSystem& sys, const Scheme& scheme, const Vec<T>& x_k, const Vec<T>& x_next,
              const Vec<T>& u_k, double h) {
  detail::check_dim(sys.name(), "next state", x_next.size(), Eigen::Index{sys.order()} * sys.n_q());
  return propagate<T>(sys, scheme, x_k, u_k, h) - x_next;
}

/// Knot values on a uniform grid. Controls are zero-order held over each
/// interval, so there is one control row fewer than there are knots.
struct KnotTrajectory {
  VectorXd times;                ///< N+1 knot times
  MatrixXd q;                    ///< (N+1) x n_q
  std::vector<MatrixXd> derivs;  ///< derivs[i] holds q^(i+1), each (N+1) x n_q
  MatrixXd controls;             ///< N x n_u

  int intervals() const { return static_cast<int>(times.size()) - 1; }
  double step() const { return intervals() > 0 ? times[1] - times[0] : 0.0; }
  const MatrixXd& qdot() const { return derivs.at(0); }
  /// Stacked (q, q', ..., q^(N-1)) at knot k.
  VectorXd state(int k) const;

  /// Checks uniform spacing and shape consistency; throws ContractViolation.
  void validate(int n_q, int n_u, int order) const;
};

/// Integrates forward from x0 (stacked (q, q')) applying one row of
/// `controls` per interval. Knot times are {0, h, ..., N h}.
KnotTrajectory rollout(const SecondOrderSystem& sys, const Scheme& scheme, const VectorXd& x0,
                       const MatrixXd& controls, double h);
KnotTrajectory rollout(const HighOrderSystem& sys, const Scheme& scheme, const VectorXd& x0,
                       const MatrixXd& controls, double h);

}  // namespace modshoot
