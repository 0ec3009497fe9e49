#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/LU>

#include "modshoot/benchmarks.hpp"
#include "modshoot/dynamics.hpp"
#include "modshoot/errors.hpp"

using namespace modshoot;

namespace {

VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

// Manipulator form M(q) q'' + C(q, q') + G(q) = B u, written out by hand
// independently of the benchmark code.
struct ManipulatorTerms {
  Eigen::Matrix2d M;
  Eigen::Vector2d bias;  // C + G
  Eigen::Vector2d Bu;
};

ManipulatorTerms cartpole_terms(const VectorXd& q, const VectorXd& qd, double u) {
  const double mc = 1.0, mp = 0.3, l = 0.5, g = 9.81;
  const double th = q[1], w = qd[1];
  ManipulatorTerms t;
  t.M << mc + mp, mp * l * std::cos(th), mp * l * std::cos(th), mp * l * l;
  t.bias << -mp * l * w * w * std::sin(th), mp * g * l * std::sin(th);
  t.Bu << u, 0.0;
  return t;
}

ManipulatorTerms acrobot_terms(const VectorXd& q, const VectorXd& qd, double u) {
  const double m1 = 1, m2 = 1, l1 = 1, lc1 = 0.5, lc2 = 0.5, i1 = 1.0 / 12, i2 = 1.0 / 12, g = 9.81;
  const double c2 = std::cos(q[1]), s2 = std::sin(q[1]);
  ManipulatorTerms t;
  const double a = i1 + i2 + m1 * lc1 * lc1 + m2 * (l1 * l1 + lc2 * lc2 + 2 * l1 * lc2 * c2);
  const double b = i2 + m2 * (lc2 * lc2 + l1 * lc2 * c2);
  const double d = i2 + m2 * lc2 * lc2;
  t.M << a, b, b, d;
  const double hc = m2 * l1 * lc2 * s2;
  t.bias << -2 * hc * qd[0] * qd[1] - hc * qd[1] * qd[1] + (m1 * lc1 + m2 * l1) * g * std::sin(q[0]) +
                m2 * lc2 * g * std::sin(q[0] + q[1]),
      hc * qd[0] * qd[0] + m2 * lc2 * g * std::sin(q[0] + q[1]);
  t.Bu << 0.0, u;
  return t;
}

}  // namespace

TEST_CASE("block acceleration equals the input") {
  const auto block = make_benchmark("block");
  CHECK(eval_accel(block, vec({0.5}), vec({-1.0}), vec({2.0}))[0] == 2.0);
  CHECK(eval_accel(block, vec({0.0}), vec({0.0}), vec({1.0}))[0] == 1.0);
}

TEST_CASE("quadrotor1d hovers at u = m g") {
  const auto quad = make_benchmark("quadrotor1d");
  CHECK(eval_accel(quad, vec({0.3}), vec({0.0}), vec({9.81}))[0] == 0.0);
}

TEST_CASE("cartpole rests in the downward position") {
  const auto cp = make_benchmark("cartpole");
  const VectorXd a = eval_accel(cp, vec({0, 0}), vec({0, 0}), vec({0}));
  CHECK(a[0] == 0.0);
  CHECK(a[1] == 0.0);
}

TEST_CASE("quadrotor2d hover: level attitude and total thrust m g") {
  const auto quad = make_benchmark("quadrotor2d");
  const VectorXd a = eval_accel(quad, vec({0.4, -1.0, 0.0}), vec({0, 0, 0}), vec({4.905, 4.905}));
  CHECK(std::abs(a[0]) < 1e-15);
  CHECK(std::abs(a[1]) < 1e-15);
  CHECK(std::abs(a[2]) < 1e-15);
}

TEST_CASE("acrobot downward equilibrium via the manipulator oracle") {
  const auto acro = make_benchmark("acrobot");
  const VectorXd q = vec({0, 0}), qd = vec({0, 0});
  const VectorXd a = eval_accel(acro, q, qd, vec({0}));
  const auto t = acrobot_terms(q, qd, 0.0);
  CHECK((t.M * a + t.bias - t.Bu).norm() < 1e-14);
  CHECK(a.norm() < 1e-14);
}

TEST_CASE("cartpole and acrobot satisfy their manipulator equations at random points") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-3.0, 3.0);
  const auto cp = make_benchmark("cartpole");
  const auto acro = make_benchmark("acrobot");
  for (int trial = 0; trial < 50; ++trial) {
    const VectorXd q = vec({U(rng), U(rng)}), qd = vec({U(rng), U(rng)});
    const double u = U(rng);
    const auto tc = cartpole_terms(q, qd, u);
    CHECK((tc.M * eval_accel(cp, q, qd, vec({u})) + tc.bias - tc.Bu).norm() < 1e-11);
    const auto ta = acrobot_terms(q, qd, u);
    CHECK((ta.M * eval_accel(acro, q, qd, vec({u})) + ta.bias - ta.Bu).norm() < 1e-11);
  }
}

TEST_CASE("mass matrices have positive determinant") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-10.0, 10.0);
  const CartPole cp;
  const Acrobot ac;
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Vector2d q(U(rng), U(rng));
    CHECK(cp.mass_matrix(q).determinant() > 0.0);
    CHECK(ac.mass_matrix(q).determinant() > 0.0);
  }
}

TEST_CASE("augment stacks derivatives") {
  const FirstOrderSystem block = augment(make_benchmark("block"));
  const VectorXd xd = block.flow<double>(vec({1, 3}), vec({2}));
  CHECK(xd == vec({3, 2}));

  const SecondOrderSystem harmonic("harmonic", 1, 0, 100, [](const auto& q, const auto&, const auto&) {
    using V = std::decay_t<decltype(q)>;
    return V(-q);
  });
  CHECK(augment(harmonic).flow<double>(vec({1, 0}), VectorXd(0)) == vec({0, -1}));

  const HighOrderSystem triple("triple", 3, 1, 1, [](const auto&, const auto& u) { return u; });
  const FirstOrderSystem f = augment(triple);
  CHECK(f.n_x() == 3);
  CHECK(f.flow<double>(vec({0, 1, 2}), vec({5})) == vec({1, 2, 5}));
}

TEST_CASE("order-2 HighOrderSystem round-trips losslessly") {
  const auto cp = make_benchmark("cartpole");
  const HighOrderSystem high(cp);
  CHECK(high.order() == 2);
  const SecondOrderSystem back = high.to_second_order();
  const VectorXd q = vec({0.3, -1.2}), qd = vec({0.7, 2.0}), u = vec({1.5});
  CHECK(eval_accel(back, q, qd, u) == eval_accel(cp, q, qd, u));
  VectorXd x(4);
  x << q, qd;
  CHECK(high.top_deriv<double>(x, u) == eval_accel(cp, q, qd, u));
}

TEST_CASE("accel is deterministic") {
  const auto acro = make_benchmark("acrobot");
  const VectorXd q = vec({0.1, 0.2}), qd = vec({-0.3, 0.4}), u = vec({0.5});
  CHECK(eval_accel(acro, q, qd, u) == eval_accel(acro, q, qd, u));
}

TEST_CASE("dimension mismatch is a contract violation") {
  const auto cp = make_benchmark("cartpole");
  CHECK_THROWS_AS(eval_accel(cp, vec({0}), vec({0, 0}), vec({0})), ContractViolation);
  CHECK_THROWS_AS(eval_accel(cp, vec({0, 0}), vec({0, 0}), vec({0, 0})), ContractViolation);
}

TEST_CASE("non-finite output raises an evaluation error carrying the point") {
  const SecondOrderSystem bad("bad", 1, 1, 0, [](const auto& q, const auto&, const auto& u) {
    using T = typename std::decay_t<decltype(q)>::Scalar;
    Vec<T> out(1);
    out[0] = u[0] / q[0];
    return out;
  });
  try {
    eval_accel(bad, vec({0.0}), vec({1.0}), vec({1.0}));
    FAIL("expected EvaluationError");
  } catch (const EvaluationError& e) {
    CHECK(e.point().size() == 3);
    CHECK(e.point()[1] == 1.0);
  }
}

TEST_CASE("make_benchmark rejects unknown names and parameters") {
  try {
    make_benchmark("biped");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    for (const auto& name : benchmark_names()) CHECK(msg.find(name) != std::string::npos);
  }
  CHECK_THROWS_AS(make_benchmark("cartpole", {{"pole_len", 1.0}}), ConfigError);
  CHECK_THROWS_AS(make_benchmark("cartpole", {{"pole_mass", -1.0}}), ConfigError);
}

TEST_CASE("parameters override defaults") {
  const auto heavy = make_benchmark("quadrotor1d", {{"mass", 2.0}});
  CHECK(std::abs(eval_accel(heavy, vec({0}), vec({0}), vec({19.62}))[0]) < 1e-12);
  CHECK(default_params("cartpole").at("pole_mass") == 0.3);
  CHECK(default_params("acrobot").at("i1") == doctest::Approx(1.0 / 12));
}
