#include "modshoot/benchmarks.hpp"

#include <cmath>
#include <sstream>

#include "modshoot/errors.hpp"

namespace modshoot {

Eigen::Matrix2d CartPole::mass_matrix(const Eigen::Vector2d& q) const {
  const double c = std::cos(q[1]);
  Eigen::Matrix2d m;
  m << cart_mass + pole_mass, pole_mass * pole_length * c,  //
      pole_mass * pole_length * c, pole_mass * pole_length * pole_length;
  return m;
}

Eigen::Matrix2d Acrobot::mass_matrix(const Eigen::Vector2d& q) const {
  const double c2 = std::cos(q[1]);
  Eigen::Matrix2d m;
  m(0, 0) = i1 + i2 + m1 * lc1 * lc1 + m2 * (l1 * l1 + lc2 * lc2 + 2.0 * l1 * lc2 * c2);
  m(0, 1) = i2 + m2 * (lc2 * lc2 + l1 * lc2 * c2);
  m(1, 0) = m(0, 1);
  m(1, 1) = i2 + m2 * lc2 * lc2;
  return m;
}

namespace {

std::string join_names() {
  std::string out;
  for (const auto& n : benchmark_names()) out += (out.empty() ? "" : ", ") + n;
  return out;
}

// Copies `params` over `defaults`, rejecting keys the model does not know.
ParamMap merge(std::string_view name, ParamMap defaults, const ParamMap& params) {
  for (const auto& [key, value] : params) {
    auto it = defaults.find(key);
    if (it == defaults.end()) {
      std::ostringstream os;
      os << "benchmark '" << name << "' has no parameter '" << key << "'";
      throw ConfigError(os.str());
    }
    if (!std::isfinite(value)) {
      throw ConfigError("benchmark parameter '" + key + "' must be finite");
    }
    it->second = value;
  }
  return defaults;
}

void require_positive(const ParamMap& p, std::initializer_list<const char*> keys) {
  for (const char* k : keys) {
    if (!(p.at(k) > 0.0)) throw ConfigError(std::string("benchmark parameter '") + k + "' must be positive");
  }
}

template <class Model>
SecondOrderSystem wrap(std::string name, int n_q, int n_u, int smoothness, Model model) {
  return SecondOrderSystem(std::move(name), n_q, n_u, smoothness,
                           [model](const auto& q, const auto& qd, const auto& u) { return model.accel(q, qd, u); });
}

}  // namespace

std::vector<std::string> benchmark_names() { return {"block", "cartpole", "acrobot", "quadrotor1d", "quadrotor2d"}; }

ParamMap default_params(std::string_view name) {
  if (name == "block") return {};
  if (name == "cartpole") {
    const CartPole d;
    return {{"cart_mass", d.cart_mass}, {"pole_mass", d.pole_mass}, {"pole_length", d.pole_length}, {"gravity", d.gravity}};
  }
  if (name == "acrobot") {
    const Acrobot d;
    return {{"m1", d.m1},   {"m2", d.m2},   {"l1", d.l1},   {"l2", d.l2},          {"lc1", d.lc1},
            {"lc2", d.lc2}, {"i1", d.i1},   {"i2", d.i2},   {"gravity", d.gravity}};
  }
  if (name == "quadrotor1d") {
    const Quadrotor1D d;
    return {{"mass", d.mass}, {"gravity", d.gravity}};
  }
  if (name == "quadrotor2d") {
    const Quadrotor2D d;
    return {{"mass", d.mass}, {"inertia", d.inertia}, {"arm", d.arm}, {"gravity", d.gravity}};
  }
  throw ConfigError("unknown benchmark '" + std::string(name) + "'; valid names: " + join_names());
}

SecondOrderSystem make_benchmark(std::string_view name, const ParamMap& params) {
  const ParamMap p = merge(name, default_params(name), params);
  const std::string n(name);
  // Smoothness: every model is analytic in its arguments, so with
  // zero-order-hold controls the flow is smooth between knots.
  constexpr int kSmooth = 6;
  if (name == "block") return wrap(n, 1, 1, kSmooth, Block{});
  if (name == "cartpole") {
    require_positive(p, {"cart_mass", "pole_mass", "pole_length"});
    return wrap(n, 2, 1, kSmooth, CartPole{p.at("cart_mass"), p.at("pole_mass"), p.at("pole_length"), p.at("gravity")});
  }
  if (name == "acrobot") {
    require_positive(p, {"m1", "m2", "l1", "l2", "i1", "i2"});
    return wrap(n, 2, 1, kSmooth,
                Acrobot{p.at("m1"), p.at("m2"), p.at("l1"), p.at("l2"), p.at("lc1"), p.at("lc2"), p.at("i1"),
                        p.at("i2"), p.at("gravity")});
  }
  if (name == "quadrotor1d") {
    require_positive(p, {"mass"});
    return wrap(n, 1, 1, kSmooth, Quadrotor1D{p.at("mass"), p.at("gravity")});
  }
  require_positive(p, {"mass", "inertia", "arm"});
  return wrap(n, 3, 2, kSmooth, Quadrotor2D{p.at("mass"), p.at("inertia"), p.at("arm"), p.at("gravity")});
}

}  // namespace modshoot
