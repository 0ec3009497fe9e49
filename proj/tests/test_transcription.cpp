#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "modshoot/benchmarks.hpp"
#include "modshoot/errors.hpp"
#include "modshoot/transcription.hpp"

using namespace modshoot;

namespace {

VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

SecondOrderSystem harmonic() {
  return SecondOrderSystem("harmonic", 1, 1, 100, [](const auto& q, const auto&, const auto&) {
    using V = std::decay_t<decltype(q)>;
    return V(-q);
  });
}

SecondOrderSystem damped() {
  return SecondOrderSystem("damped", 1, 1, 100, [](const auto&, const auto& qd, const auto& u) {
    using V = std::decay_t<decltype(qd)>;
    return V(u - qd);
  });
}

SecondOrderSystem antidamped_position() {
  return SecondOrderSystem("q''=q", 1, 1, 100, [](const auto& q, const auto&, const auto&) {
    using V = std::decay_t<decltype(q)>;
    return V(q);
  });
}

}  // namespace

TEST_CASE("tableaus") {
  const Scheme e = Scheme::make(SchemeKind::FirstEuler);
  CHECK(e.tableau.stages == 1);
  CHECK(e.tableau.b[0] == 1.0);
  const Scheme rk = Scheme::make(SchemeKind::FirstRK4);
  CHECK(rk.tableau.stages == 4);
  CHECK(rk.tableau.b == vec({1.0 / 6, 1.0 / 3, 1.0 / 3, 1.0 / 6}));
  CHECK(rk.tableau.a(1, 0) == 0.5);
  CHECK(rk.tableau.a(2, 1) == 0.5);
  CHECK(rk.tableau.a(3, 2) == 1.0);
  CHECK(rk.tableau.a(2, 0) == 0.0);
  CHECK(rk.tableau.a(3, 0) == 0.0);
  CHECK(rk.tableau.a(3, 1) == 0.0);
  CHECK(Scheme::make(SchemeKind::SecondRK4).tableau.stages == 0);
}

TEST_CASE("scheme labels round-trip") {
  for (auto k : {SchemeKind::FirstEuler, SchemeKind::SecondEuler, SchemeKind::FirstRK4, SchemeKind::SecondRK4,
                 SchemeKind::EulerOrderN}) {
    CHECK(parse_scheme(scheme_label(k)) == k);
  }
  CHECK(scheme_label(SchemeKind::SecondRK4) == "2nd-rk4");
  CHECK_THROWS_AS(parse_scheme("3rd-euler"), ConfigError);
}

TEST_CASE("step_first_euler") {
  const FirstOrderSystem block = augment(make_benchmark("block"));
  // Example 1: the configuration ignores the control for one step.
  CHECK(step_first_euler<double>(block, vec({0, 0}), vec({1}), 0.1) == vec({0, 0.1}));
  CHECK(step_first_euler<double>(block, vec({0.7, 0}), vec({0}), 0.1) == vec({0.7, 0}));
  CHECK(step_first_euler<double>(augment(harmonic()), vec({1, 0}), vec({0}), 0.1) == vec({1.0, -0.1}));
}

TEST_CASE("step_second_euler") {
  const auto block = make_benchmark("block");
  const auto s = step_second_euler<double>(block, vec({0}), vec({0}), vec({1}), 0.1);
  CHECK(s.q[0] == doctest::Approx(0.005).epsilon(1e-15));
  CHECK(s.qdot[0] == doctest::Approx(0.1).epsilon(1e-15));

  const double q0 = -0.4, v0 = 1.3, u = 2.5, h = 0.07;
  const auto t = step_second_euler<double>(block, vec({q0}), vec({v0}), vec({u}), h);
  CHECK(t.q[0] == doctest::Approx(q0 + v0 * h + 0.5 * u * h * h).epsilon(1e-15));
  CHECK(t.qdot[0] == doctest::Approx(v0 + u * h).epsilon(1e-15));

  const auto osc = step_second_euler<double>(harmonic(), vec({1}), vec({0}), vec({0}), 0.1);
  CHECK(osc.q[0] == doctest::Approx(0.995).epsilon(1e-15));
  CHECK(osc.qdot[0] == doctest::Approx(-0.1).epsilon(1e-15));
  CHECK(std::abs(osc.q[0] - std::cos(0.1)) < 0.1 * 0.1 * 0.1);
}

TEST_CASE("step_first_rk4") {
  const FirstOrderSystem growth("x'=x", 1, 0, [](const auto& x, const auto&) {
    using V = std::decay_t<decltype(x)>;
    return V(x);
  });
  const double h = 0.1;
  const double taylor = 1 + h + h * h / 2 + h * h * h / 6 + h * h * h * h / 24;
  CHECK(step_first_rk4<double>(growth, vec({1}), VectorXd(0), h)[0] == doctest::Approx(taylor).epsilon(1e-15));
  CHECK(step_first_rk4<double>(growth, vec({0}), VectorXd(0), h)[0] == 0.0);

  const VectorXd b = step_first_rk4<double>(augment(make_benchmark("block")), vec({0, 0}), vec({1}), 0.1);
  CHECK(b[0] == doctest::Approx(0.005).epsilon(1e-15));
  CHECK(b[1] == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("step_second_rk4") {
  const auto s = step_second_rk4<double>(make_benchmark("block"), vec({0}), vec({0}), vec({1}), 0.1);
  CHECK(s.q[0] == doctest::Approx(0.005).epsilon(1e-15));
  CHECK(s.qdot[0] == doctest::Approx(0.1).epsilon(1e-15));

  const auto d = step_second_rk4<double>(damped(), vec({0}), vec({1}), vec({0}), 0.1);
  double taylor = 0.0, term = 1.0;
  for (int i = 0; i <= 4; ++i) {
    taylor += term;
    term *= -0.1 / (i + 1);
  }
  CHECK(d.qdot[0] == doctest::Approx(taylor).epsilon(1e-14));
  CHECK(d.qdot[0] == doctest::Approx(0.9048375).epsilon(1e-7));
  CHECK(std::abs(d.qdot[0] - std::exp(-0.1)) < 1e-7);
}

TEST_CASE("second-order RK4 configuration weights sum to one half") {
  // Constant acceleration makes every stage equal.
  const SecondOrderSystem constant("const", 2, 2, 100, [](const auto&, const auto&, const auto& u) {
    using V = std::decay_t<decltype(u)>;
    return V(u);
  });
  const VectorXd q = vec({0.3, -2.0}), qd = vec({1.1, 0.4}), u = vec({-3.0, 7.0});
  const double h = 0.37;
  const auto s = step_second_rk4<double>(constant, q, qd, u, h);
  const VectorXd K = h * u;
  CHECK((s.q - q - h * qd - h * K / 2).norm() < 1e-14);
}

TEST_CASE("K4 position argument carries h") {
  // q'' = q from (0, 1): exact q' = cosh h. With the printed q + q' the
  // fourth stage would be h f(1) = h and q' would be off at first order.
  const double h = 0.1;
  const auto s = step_second_rk4<double>(antidamped_position(), vec({0}), vec({1}), vec({0}), h);
  CHECK(std::abs(s.qdot[0] - std::cosh(h)) < 1e-5);
}

TEST_CASE("step_euler_order_n") {
  const auto block = make_benchmark("block");
  const HighOrderSystem block2(block);
  const double h = 0.13;
  const VectorXd x = vec({0.2, -0.9}), u = vec({1.7});
  const VectorXd n2 = step_euler_order_n<double>(block2, x, u, h);
  const auto e2 = step_second_euler<double>(block, x.head(1), x.tail(1), u, h);
  CHECK(n2[0] == e2.q[0]);
  CHECK(n2[1] == e2.qdot[0]);

  const auto cp = make_benchmark("cartpole");
  const VectorXd xc = vec({0.1, 2.0, -0.3, 0.8}), uc = vec({4.0});
  const VectorXd nc = step_euler_order_n<double>(HighOrderSystem(cp), xc, uc, 0.05);
  const auto ec = step_second_euler<double>(cp, xc.head(2), xc.tail(2), uc, 0.05);
  CHECK(nc.head(2) == ec.q);
  CHECK(nc.tail(2) == ec.qdot);

  const HighOrderSystem triple("triple", 3, 1, 1, [](const auto&, const auto& u) { return u; });
  CHECK(step_euler_order_n<double>(triple, vec({0, 0, 0}), vec({6}), 1.0) == vec({1, 3, 6}));

  const HighOrderSystem first("x'=-2x", 1, 1, 1, [](const auto& x, const auto& u) {
    using V = std::decay_t<decltype(x)>;
    return V(-2.0 * x + u);
  });
  const VectorXd x1 = vec({0.8}), u1 = vec({0.3});
  CHECK(step_euler_order_n<double>(first, x1, u1, 0.1) == step_first_euler<double>(augment(first), x1, u1, 0.1));
}

TEST_CASE("nonpositive step sizes are rejected") {
  const auto block = make_benchmark("block");
  CHECK_THROWS_AS(step_second_euler<double>(block, vec({0}), vec({0}), vec({0}), 0.0), ContractViolation);
  CHECK_THROWS_AS(step_second_rk4<double>(block, vec({0}), vec({0}), vec({0}), -0.1), ContractViolation);
  CHECK_THROWS_AS(step_first_rk4<double>(augment(block), vec({0, 0}), vec({0}), 0.0), ContractViolation);
}

TEST_CASE("defect") {
  const auto block = make_benchmark("block");
  const double q0 = 0.4, v0 = -1.0, u = 3.0, h = 0.2;
  const VectorXd x0 = vec({q0, v0});
  const VectorXd exact = vec({q0 + v0 * h + 0.5 * u * h * h, v0 + u * h});

  for (auto k : {SchemeKind::FirstEuler, SchemeKind::SecondEuler, SchemeKind::FirstRK4, SchemeKind::SecondRK4}) {
    const Scheme s = Scheme::make(k);
    const VectorXd next = propagate<double>(block, s, x0, vec({u}), h);
    CHECK(defect<double>(block, s, x0, next, vec({u}), h).norm() == 0.0);
  }
  CHECK(defect<double>(block, Scheme::make(SchemeKind::SecondEuler), x0, exact, vec({u}), h).norm() < 1e-15);
  const VectorXd r = defect<double>(block, Scheme::make(SchemeKind::FirstEuler), x0, exact, vec({u}), h);
  CHECK(r[0] == doctest::Approx(-0.5 * u * h * h).epsilon(1e-12));
  CHECK(std::abs(r[1]) < 1e-15);
}

TEST_CASE("rollout") {
  const auto block = make_benchmark("block");
  MatrixXd controls(3, 1);
  controls << 1, -2, 0.5;
  const KnotTrajectory t = rollout(block, Scheme::make(SchemeKind::SecondEuler), vec({0, 0}), controls, 0.25);
  CHECK(t.intervals() == 3);
  CHECK(t.times == vec({0, 0.25, 0.5, 0.75}));
  CHECK(t.q.rows() == 4);
  CHECK(t.qdot()(1, 0) == 0.25);
  CHECK(t.controls == controls);
  CHECK_NOTHROW(t.validate(1, 1, 2));
  CHECK_THROWS_AS(t.validate(2, 1, 2), ContractViolation);

  const SecondOrderSystem blowup("blowup", 1, 1, 0, [](const auto& q, const auto&, const auto&) {
    using V = std::decay_t<decltype(q)>;
    return V(q.cwiseSqrt());
  });
  try {
    MatrixXd c = MatrixXd::Zero(4, 1);
    rollout(blowup, Scheme::make(SchemeKind::SecondEuler), vec({1, -8}), c, 0.25);
    FAIL("expected EvaluationError");
  } catch (const EvaluationError& e) {
    CHECK(std::string(e.what()).find("rollout step") != std::string::npos);
  }
}

TEST_CASE("high-order rollout and first-order kinds on the augmented state") {
  const HighOrderSystem triple("triple", 3, 1, 1, [](const auto&, const auto& u) { return u; });
  MatrixXd controls = MatrixXd::Constant(4, 1, 6.0);
  const KnotTrajectory t = rollout(triple, Scheme::make(SchemeKind::EulerOrderN), vec({0, 0, 0}), controls, 0.5);
  CHECK(t.derivs.size() == 2);
  // Constant jerk: the order-3 Euler step is exact.
  CHECK(t.q(4, 0) == doctest::Approx(8.0).epsilon(1e-14));
  CHECK(t.derivs[0](4, 0) == doctest::Approx(12.0).epsilon(1e-14));
  CHECK(t.derivs[1](4, 0) == doctest::Approx(12.0).epsilon(1e-14));

  const KnotTrajectory r = rollout(triple, Scheme::make(SchemeKind::FirstRK4), vec({0, 0, 0}), controls, 0.5);
  CHECK(r.q(4, 0) == doctest::Approx(8.0).epsilon(1e-14));
  CHECK_THROWS_AS(rollout(triple, Scheme::make(SchemeKind::SecondRK4), vec({0, 0, 0}), controls, 0.5),
                  ContractViolation);
}
