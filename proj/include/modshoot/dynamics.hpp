#pragma once

// Control systems in second-order, high-order and first-order form.
//
// Each system stores its right-hand side twice: once for double and once for
// Dual, both instantiated from the same generic callable. Models are therefore
// written once over an abstract scalar and get exact derivatives for free.

#include <functional>
#include <initializer_list>
#include <type_traits>
#include <string>
#include <utility>

#include <Eigen/Core>

#include "modshoot/dual.hpp"
#include "modshoot/errors.hpp"

namespace modshoot {

template <class T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace detail {

[[noreturn]] void throw_non_finite(const std::string& who, std::initializer_list<const VectorXd*> parts);
void check_dim(const std::string& who, const char* what, Eigen::Index got, Eigen::Index want);

template <class T>
bool all_finite(const Vec<T>& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(value_of(v[i]))) return false;
  }
  return true;
}

template <class T>
VectorXd values(const Vec<T>& v) {
  VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = value_of(v[i]);
  return out;
}

}  // namespace detail

/// q'' = f2(q, q', u).
class SecondOrderSystem {
 public:
  template <class T>
  using AccelFn = std::function<Vec<T>(const Vec<T>&, const Vec<T>&, const Vec<T>&)>;

  SecondOrderSystem() = default;

  /// `fn` must be callable as fn(q, qdot, u) for both Vec<double> and Vec<Dual>.
  template <class F>
  SecondOrderSystem(std::string name, int n_q, int n_u, int smoothness, F fn)
      : name_(std::move(name)),
        n_q_(n_q),
        n_u_(n_u),
        smoothness_(smoothness),
        f_(
            [fn](const Vec<double>& q, const Vec<double>& qd, const Vec<double>& u) -> Vec<double> {
              return fn(q, qd, u);
            }),
        f_dual_([fn](const Vec<Dual>& q, const Vec<Dual>& qd, const Vec<Dual>& u) -> Vec<Dual> {
          return fn(q, qd, u);
        }) {}

  const std::string& name() const { return name_; }
  int n_q() const { return n_q_; }
  int n_u() const { return n_u_; }
  int smoothness() const { return smoothness_; }

  /// Evaluates the acceleration map with dimension and finiteness checks.
  template <class T>
  Vec<T> accel(const Vec<T>& q, const Vec<T>& qd, const Vec<T>& u) const {
    detail::check_dim(name_, "q", q.size(), n_q_);
    detail::check_dim(name_, "qdot", qd.size(), n_q_);
    detail::check_dim(name_, "u", u.size(), n_u_);
    Vec<T> out;
    if constexpr (std::is_same_v<T, double>) {
      out = f_(q, qd, u);
    } else {
      out = f_dual_(q, qd, u);
    }
    detail::check_dim(name_, "accel output", out.size(), n_q_);
    if (!detail::all_finite(out)) {
      const VectorXd qv = detail::values(q), qdv = detail::values(qd), uv = detail::values(u);
      detail::throw_non_finite(name_, {&qv, &qdv, &uv});
    }
    return out;
  }

 private:
  std::string name_;
  int n_q_ = 0;
  int n_u_ = 0;
  int smoothness_ = 0;
  AccelFn<double> f_;
  AccelFn<Dual> f_dual_;
};

/// Free-function form of SecondOrderSystem::accel.
inline VectorXd eval_accel(const SecondOrderSystem& sys, const VectorXd& q, const VectorXd& qd,
                           const VectorXd& u) {
  return sys.accel<double>(q, qd, u);
}

/// q^(N) = fN(q, q', ..., q^(N-1), u). Derivatives are passed stacked, lowest
/// order first, as one vector of length order * n_q.
class HighOrderSystem {
 public:
  template <class T>
  using TopFn = std::function<Vec<T>(const Vec<T>&, const Vec<T>&)>;

  HighOrderSystem() = default;

  template <class F>
  HighOrderSystem(std::string name, int order, int n_q, int n_u, F fn)
      : name_(std::move(name)),
        order_(order),
        n_q_(n_q),
        n_u_(n_u),
        f_([fn](const Vec<double>& x, const Vec<double>& u) -> Vec<double> { return fn(x, u); }),
        f_dual_([fn](const Vec<Dual>& x, const Vec<Dual>& u) -> Vec<Dual> { return fn(x, u); }) {
    if (order < 1) throw ContractViolation("HighOrderSystem: order must be >= 1");
  }

  /// Lossless view of a second-order system.
  explicit HighOrderSystem(const SecondOrderSystem& sys);

  const std::string& name() const { return name_; }
  int order() const { return order_; }
  int n_q() const { return n_q_; }
  int n_u() const { return n_u_; }

  template <class T>
  Vec<T> top_deriv(const Vec<T>& derivs, const Vec<T>& u) const {
    detail::check_dim(name_, "stacked derivatives", derivs.size(), Eigen::Index{order_} * n_q_);
    detail::check_dim(name_, "u", u.size(), n_u_);
    Vec<T> out;
    if constexpr (std::is_same_v<T, double>) {
      out = f_(derivs, u);
    } else {
      out = f_dual_(derivs, u);
    }
    detail::check_dim(name_, "top derivative output", out.size(), n_q_);
    if (!detail::all_finite(out)) {
      const VectorXd xv = detail::values(derivs), uv = detail::values(u);
      detail::throw_non_finite(name_, {&xv, &uv});
    }
    return out;
  }

  /// Inverse of the converting constructor; requires order() == 2.
  SecondOrderSystem to_second_order() const;

 private:
  std::string name_;
  int order_ = 0;
  int n_q_ = 0;
  int n_u_ = 0;
  TopFn<double> f_;
  TopFn<Dual> f_dual_;
};

/// x' = f1(x, u).
class FirstOrderSystem {
 public:
  template <class T>
  using FlowFn = std::function<Vec<T>(const Vec<T>&, const Vec<T>&)>;

  FirstOrderSystem() = default;

  template <class F>
  FirstOrderSystem(std::string name, int n_x, int n_u, F fn)
      : name_(std::move(name)),
        n_x_(n_x),
        n_u_(n_u),
        f_([fn](const Vec<double>& x, const Vec<double>& u) -> Vec<double> { return fn(x, u); }),
        f_dual_([fn](const Vec<Dual>& x, const Vec<Dual>& u) -> Vec<Dual> { return fn(x, u); }) {}

  const std::string& name() const { return name_; }
  int n_x() const { return n_x_; }
  int n_u() const { return n_u_; }

  template <class T>
  Vec<T> flow(const Vec<T>& x, const Vec<T>& u) const {
    detail::check_dim(name_, "x", x.size(), n_x_);
    detail::check_dim(name_, "u", u.size(), n_u_);
    Vec<T> out;
    if constexpr (std::is_same_v<T, double>) {
      out = f_(x, u);
    } else {
      out = f_dual_(x, u);
    }
    detail::check_dim(name_, "flow output", out.size(), n_x_);
    if (!detail::all_finite(out)) {
      const VectorXd xv = detail::values(x), uv = detail::values(u);
      detail::throw_non_finite(name_, {&xv, &uv});
    }
    return out;
  }

 private:
  std::string name_;
  int n_x_ = 0;
  int n_u_ = 0;
  FlowFn<double> f_;
  FlowFn<Dual> f_dual_;
};

/// Rewrites a high-order system in first-order form on the stacked state
/// x = (q, q', ..., q^(N-1)). The flow is (q', ..., q^(N-1), fN).
FirstOrderSystem augment(const HighOrderSystem& sys);
FirstOrderSystem augment(const SecondOrderSystem& sys);

}  // namespace modshoot
