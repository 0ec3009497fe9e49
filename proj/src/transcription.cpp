#include "modshoot/transcription.hpp"

#include <cmath>
#include <sstream>

namespace modshoot {

Scheme Scheme::make(SchemeKind kind) {
  Scheme s;
  s.kind = kind;
  switch (kind) {
    case SchemeKind::FirstEuler:
      s.tableau.stages = 1;
      s.tableau.a = MatrixXd::Zero(1, 1);
      s.tableau.b = VectorXd::Ones(1);
      s.order_hint = 1;
      break;
    case SchemeKind::FirstRK4:
      s.tableau.stages = 4;
      s.tableau.a = MatrixXd::Zero(4, 4);
      s.tableau.a(1, 0) = 0.5;
      s.tableau.a(2, 1) = 0.5;
      s.tableau.a(3, 2) = 1.0;
      s.tableau.b.resize(4);
      s.tableau.b << 1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0;
      s.order_hint = 4;
      break;
    case SchemeKind::SecondEuler:
    case SchemeKind::EulerOrderN:
      s.order_hint = 1;
      break;
    case SchemeKind::SecondRK4:
      s.order_hint = 4;
      break;
  }
  return s;
}

std::string_view Scheme::label() const { return scheme_label(kind); }

std::string_view scheme_label(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::FirstEuler:
      return "1st-euler";
    case SchemeKind::SecondEuler:
      return "2nd-euler";
    case SchemeKind::FirstRK4:
      return "1st-rk4";
    case SchemeKind::SecondRK4:
      return "2nd-rk4";
    case SchemeKind::EulerOrderN:
      return "euler-n";
  }
  return "?";
}

SchemeKind parse_scheme(std::string_view label) {
  for (auto k : {SchemeKind::FirstEuler, SchemeKind::SecondEuler, SchemeKind::FirstRK4, SchemeKind::SecondRK4,
                 SchemeKind::EulerOrderN}) {
    if (scheme_label(k) == label) return k;
  }
  throw ConfigError("unknown scheme '" + std::string(label) +
                    "'; valid schemes: 1st-euler, 2nd-euler, 1st-rk4, 2nd-rk4, euler-n");
}

VectorXd KnotTrajectory::state(int k) const {
  const Eigen::Index n = q.cols();
  VectorXd x((1 + derivs.size()) * n);
  x.head(n) = q.row(k).transpose();
  for (std::size_t i = 0; i < derivs.size(); ++i) x.segment((i + 1) * n, n) = derivs[i].row(k).transpose();
  return x;
}

void KnotTrajectory::validate(int n_q, int n_u, int order) const {
  const Eigen::Index knots = times.size();
  auto fail = [](const std::string& msg) { throw ContractViolation("KnotTrajectory: " + msg); };
  if (knots < 2) fail("needs at least two knots");
  const double h = times[1] - times[0];
  if (!(h > 0.0)) fail("times must be strictly increasing");
  for (Eigen::Index k = 0; k + 1 < knots; ++k) {
    const double hk = times[k + 1] - times[k];
    if (!(hk > 0.0)) fail("times must be strictly increasing");
    if (std::abs(hk - h) > 1e-12 * std::max(std::abs(h), std::abs(times[k + 1]))) fail("step is not uniform");
  }
  if (q.rows() != knots || q.cols() != n_q) fail("configuration array has wrong shape");
  if (static_cast<int>(derivs.size()) != order - 1) fail("wrong number of derivative arrays");
  for (const auto& d : derivs) {
    if (d.rows() != knots || d.cols() != n_q) fail("derivative array has wrong shape");
  }
  if (controls.rows() != knots - 1 || controls.cols() != n_u) fail("control array has wrong shape");
}

namespace {

template <class Sys>
KnotTrajectory rollout_impl(const Sys& sys, int order, const Scheme& scheme, const VectorXd& x0,
                            const MatrixXd& controls, double h) {
  detail::require_positive_step(h);
  const int n_q = sys.n_q();
  const int n = static_cast<int>(controls.rows());
  detail::check_dim(sys.name(), "initial state", x0.size(), Eigen::Index{order} * n_q);
  detail::check_dim(sys.name(), "control columns", controls.cols(), sys.n_u());

  KnotTrajectory traj;
  traj.times.resize(n + 1);
  for (int k = 0; k <= n; ++k) traj.times[k] = k * h;
  traj.q.resize(n + 1, n_q);
  traj.derivs.assign(order - 1, MatrixXd(n + 1, n_q));
  traj.controls = controls;

  auto store = [&](int k, const VectorXd& x) {
    traj.q.row(k) = x.head(n_q).transpose();
    for (int i = 1; i < order; ++i) traj.derivs[i - 1].row(k) = x.segment(i * n_q, n_q).transpose();
  };

  VectorXd x = x0;
  store(0, x);
  for (int k = 0; k < n; ++k) {
    const VectorXd u = controls.row(k).transpose();
    try {
      x = propagate<double>(sys, scheme, x, u, h);
    } catch (const EvaluationError& e) {
      std::ostringstream os;
      os << "rollout step " << k << ": " << e.what();
      throw EvaluationError(os.str(), e.point());
    }
    store(k + 1, x);
  }
  return traj;
}

}  // namespace

KnotTrajectory rollout(const SecondOrderSystem& sys, const Scheme& scheme, const VectorXd& x0,
                       const MatrixXd& controls, double h) {
  return rollout_impl(sys, 2, scheme, x0, controls, h);
}

KnotTrajectory rollout(const HighOrderSystem& sys, const Scheme& scheme, const VectorXd& x0,
                       const MatrixXd& controls, double h) {
  return rollout_impl(sys, sys.order(), scheme, x0, controls, h);
}

}  // namespace modshoot
