#pragma once

// Forward-mode dual numbers with a single tangent direction.
//
// A Dual carries (value, derivative) and propagates the derivative through the
// usual arithmetic and elementary functions. Every model in this library is
// written over an abstract scalar, so instantiating it with Dual and seeding
// one input with derivative 1 yields one exact column of the Jacobian.

#include <cmath>
#include <ostream>

#include <Eigen/Core>

namespace modshoot {

struct Dual {
  double val = 0.0;
  double der = 0.0;

  constexpr Dual() = default;
  constexpr Dual(double v) : val(v) {}  // NOLINT(google-explicit-constructor)
  constexpr Dual(double v, double d) : val(v), der(d) {}

  constexpr Dual& operator+=(const Dual& o) {
    val += o.val;
    der += o.der;
    return *this;
  }
  constexpr Dual& operator-=(const Dual& o) {
    val -= o.val;
    der -= o.der;
    return *this;
  }
  constexpr Dual& operator*=(const Dual& o) {
    der = der * o.val + val * o.der;
    val *= o.val;
    return *this;
  }
  constexpr Dual& operator/=(const Dual& o) {
    const double inv = 1.0 / o.val;
    val *= inv;
    der = (der - val * o.der) * inv;
    return *this;
  }
};

constexpr Dual operator+(Dual a, const Dual& b) { return a += b; }
constexpr Dual operator-(Dual a, const Dual& b) { return a -= b; }
constexpr Dual operator*(Dual a, const Dual& b) { return a *= b; }
constexpr Dual operator/(Dual a, const Dual& b) { return a /= b; }
constexpr Dual operator-(const Dual& a) { return {-a.val, -a.der}; }
constexpr Dual operator+(const Dual& a) { return a; }

constexpr bool operator==(const Dual& a, const Dual& b) { return a.val == b.val; }
constexpr bool operator!=(const Dual& a, const Dual& b) { return a.val != b.val; }
constexpr bool operator<(const Dual& a, const Dual& b) { return a.val < b.val; }
constexpr bool operator>(const Dual& a, const Dual& b) { return a.val > b.val; }
constexpr bool operator<=(const Dual& a, const Dual& b) { return a.val <= b.val; }
constexpr bool operator>=(const Dual& a, const Dual& b) { return a.val >= b.val; }

inline Dual sin(const Dual& a) { return {std::sin(a.val), a.der * std::cos(a.val)}; }
inline Dual cos(const Dual& a) { return {std::cos(a.val), -a.der * std::sin(a.val)}; }
inline Dual tan(const Dual& a) {
  const double t = std::tan(a.val);
  return {t, a.der * (1.0 + t * t)};
}
inline Dual exp(const Dual& a) {
  const double e = std::exp(a.val);
  return {e, a.der * e};
}
inline Dual log(const Dual& a) { return {std::log(a.val), a.der / a.val}; }
inline Dual sqrt(const Dual& a) {
  const double s = std::sqrt(a.val);
  return {s, a.der / (2.0 * s)};
}
inline Dual pow(const Dual& a, double p) {
  const double v = std::pow(a.val, p);
  return {v, a.der * p * std::pow(a.val, p - 1.0)};
}
inline Dual abs(const Dual& a) { return a.val < 0 ? -a : a; }
inline Dual atan2(const Dual& y, const Dual& x) {
  const double r2 = x.val * x.val + y.val * y.val;
  return {std::atan2(y.val, x.val), (x.val * y.der - y.val * x.der) / r2};
}

inline bool isfinite(const Dual& a) { return std::isfinite(a.val) && std::isfinite(a.der); }

inline std::ostream& operator<<(std::ostream& os, const Dual& a) {
  return os << a.val << "+" << a.der << "e";
}

/// Value part of a scalar; identity for double.
inline double value_of(double x) { return x; }
inline double value_of(const Dual& x) { return x.val; }

}  // namespace modshoot

namespace Eigen {

template <>
struct NumTraits<modshoot::Dual> : NumTraits<double> {
  using Real = modshoot::Dual;
  using NonInteger = modshoot::Dual;
  using Nested = modshoot::Dual;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 2,
    AddCost = 2,
    MulCost = 3
  };
};

template <class BinaryOp>
struct ScalarBinaryOpTraits<modshoot::Dual, double, BinaryOp> {
  using ReturnType = modshoot::Dual;
};

template <class BinaryOp>
struct ScalarBinaryOpTraits<double, modshoot::Dual, BinaryOp> {
  using ReturnType = modshoot::Dual;
};

}  // namespace Eigen
