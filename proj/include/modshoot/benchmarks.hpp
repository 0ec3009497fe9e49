#pragma once

// Benchmark systems: block, cartpole, acrobot, 1D and 2D quadrotor.
//
// All models are plain structs with a templated `accel` so they can be
// instantiated over double and Dual. Angles are measured from the downward
// vertical for the pendulum systems, so q = 0 is the hanging equilibrium.

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "modshoot/dynamics.hpp"

namespace modshoot {

using ParamMap = std::map<std::string, double>;

/// q'' = u.
struct Block {
  template <class T>
  Vec<T> accel(const Vec<T>& /*q*/, const Vec<T>& /*qd*/, const Vec<T>& u) const {
    return u;
  }
};

/// Cart on a frictionless track with a point-mass pole; q = (cart position, pole angle).
struct CartPole {
  double cart_mass = 1.0;
  double pole_mass = 0.3;
  double pole_length = 0.5;
  double gravity = 9.81;

  template <class T>
  Vec<T> accel(const Vec<T>& q, const Vec<T>& qd, const Vec<T>& u) const {
    using std::cos;
    using std::sin;
    const T s = sin(q[1]);
    const T c = cos(q[1]);
    const T w = qd[1];
    const T denom = cart_mass + pole_mass * s * s;
    Vec<T> out(2);
    out[0] = (u[0] + pole_mass * s * (pole_length * w * w + gravity * c)) / denom;
    out[1] = (-u[0] * c - pole_mass * pole_length * w * w * c * s - (cart_mass + pole_mass) * gravity * s) /
             (pole_length * denom);
    return out;
  }

  Eigen::Matrix2d mass_matrix(const Eigen::Vector2d& q) const;
};

/// Two-link pendulum actuated at the elbow. Uniform rods, inertia taken about
/// each link's center of mass.
struct Acrobot {
  double m1 = 1.0;
  double m2 = 1.0;
  double l1 = 1.0;
  double l2 = 1.0;
  double lc1 = 0.5;
  double lc2 = 0.5;
  double i1 = 1.0 / 12.0;
  double i2 = 1.0 / 12.0;
  double gravity = 9.81;

  template <class T>
  Vec<T> accel(const Vec<T>& q, const Vec<T>& qd, const Vec<T>& u) const {
    using std::cos;
    using std::sin;
    const T c2 = cos(q[1]);
    const T s2 = sin(q[1]);
    const T s1 = sin(q[0]);
    const T s12 = sin(q[0] + q[1]);

    const T m11 = i1 + i2 + m1 * lc1 * lc1 + m2 * (l1 * l1 + lc2 * lc2 + 2.0 * l1 * lc2 * c2);
    const T m12 = i2 + m2 * (lc2 * lc2 + l1 * lc2 * c2);
    const T m22 = T(i2 + m2 * lc2 * lc2);

    const T coriolis_k = m2 * l1 * lc2 * s2;
    const T bias1 = -coriolis_k * (2.0 * qd[0] * qd[1] + qd[1] * qd[1]) +
                    (m1 * lc1 + m2 * l1) * gravity * s1 + m2 * lc2 * gravity * s12;
    const T bias2 = coriolis_k * qd[0] * qd[0] + m2 * lc2 * gravity * s12;

    const T rhs1 = -bias1;
    const T rhs2 = u[0] - bias2;
    const T det = m11 * m22 - m12 * m12;
    Vec<T> out(2);
    out[0] = (m22 * rhs1 - m12 * rhs2) / det;
    out[1] = (m11 * rhs2 - m12 * rhs1) / det;
    return out;
  }

  Eigen::Matrix2d mass_matrix(const Eigen::Vector2d& q) const;
};

/// Vertical-only quadrotor: q'' = u/m - g.
struct Quadrotor1D {
  double mass = 1.0;
  double gravity = 9.81;

  template <class T>
  Vec<T> accel(const Vec<T>& /*q*/, const Vec<T>& /*qd*/, const Vec<T>& u) const {
    Vec<T> out(1);
    out[0] = u[0] / mass - gravity;
    return out;
  }
};

/// Planar quadrotor; q = (horizontal, vertical, tilt), u = (left thrust, right thrust).
/// Positive tilt rotates the thrust vector toward negative horizontal.
struct Quadrotor2D {
  double mass = 1.0;
  double inertia = 0.01;
  double arm = 0.2;
  double gravity = 9.81;

  template <class T>
  Vec<T> accel(const Vec<T>& q, const Vec<T>& /*qd*/, const Vec<T>& u) const {
    using std::cos;
    using std::sin;
    const T thrust = u[0] + u[1];
    Vec<T> out(3);
    out[0] = -thrust * sin(q[2]) / mass;
    out[1] = thrust * cos(q[2]) / mass - gravity;
    out[2] = arm * (u[0] - u[1]) / inertia;
    return out;
  }
};

/// Names accepted by make_benchmark, in a fixed order.
std::vector<std::string> benchmark_names();

/// Default parameters of a benchmark (empty for the block).
ParamMap default_params(std::string_view name);

/// Builds a benchmark system. Parameters not given in `params` take their
/// defaults; unknown names or parameter keys raise ConfigError.
SecondOrderSystem make_benchmark(std::string_view name, const ParamMap& params = {});

}  // namespace modshoot
