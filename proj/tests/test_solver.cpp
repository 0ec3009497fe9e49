#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "modshoot/benchmarks.hpp"
#include "modshoot/errors.hpp"
#include "modshoot/ocp.hpp"
#include "modshoot/solver.hpp"

using namespace modshoot;

namespace {

VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

template <class T>
Vec<T> none(const Vec<T>&) {
  return Vec<T>(0);
}

OptimalControlProblem block_transfer(int N) {
  OptimalControlProblem p = make_problem(make_benchmark("block"), 1.0, N);
  p.xf = vec({1, 0});
  p.xf_fixed = {true, true};
  return p;
}

VectorXd random_point(int n, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-scale, scale);
  VectorXd z(n);
  for (auto& x : z) x = U(rng);
  return z;
}

}  // namespace

TEST_CASE("unconstrained quadratic") {
  const VectorXd target = vec({1.5, -2.0, 0.25});
  const NlpProgram nlp = make_dense_nlp(
      3, 0, 0,
      [target](const auto& z) {
        using T = typename std::decay_t<decltype(z)>::Scalar;
        T s(0.0);
        for (int i = 0; i < 3; ++i) s += (z[i] - target[i]) * (z[i] - target[i]);
        return s;
      },
      [](const auto& z) { return none(z); }, [](const auto& z) { return none(z); });
  SolverOptions opts;
  const SolveResult r = solve(nlp, opts, VectorXd::Zero(3));
  CHECK(r.report.status == SolveStatus::Optimal);
  CHECK((r.z - target).lpNorm<Eigen::Infinity>() < opts.stat_tol);
  CHECK(r.report.inner_iters <= opts.max_inner);
}

TEST_CASE("equality-constrained toy") {
  const NlpProgram nlp = make_dense_nlp(
      2, 1, 0, [](const auto& z) { return z[0] * z[0] + z[1] * z[1]; },
      [](const auto& z) {
        std::decay_t<decltype(z)> c(1);
        c[0] = z[0] + z[1] - 1.0;
        return c;
      },
      [](const auto& z) { return none(z); });
  const SolveResult r = solve(nlp, SolverOptions{}, VectorXd::Zero(2));
  CHECK(r.report.status == SolveStatus::Optimal);
  CHECK(std::abs(r.z[0] - 0.5) < 1e-6);
  CHECK(std::abs(r.z[1] - 0.5) < 1e-6);
}

TEST_CASE("active bound") {
  const NlpProgram nlp = make_dense_nlp(
      1, 0, 1, [](const auto& z) { return (z[0] - 2.0) * (z[0] - 2.0); }, [](const auto& z) { return none(z); },
      [](const auto& z) {
        std::decay_t<decltype(z)> g(1);
        g[0] = z[0] - 1.0;
        return g;
      });
  const SolveResult r = solve(nlp, SolverOptions{}, VectorXd::Zero(1));
  CHECK(r.report.status == SolveStatus::Optimal);
  CHECK(std::abs(r.z[0] - 1.0) < 1e-6);
}

TEST_CASE("evaluation failures are reported with the point") {
  const NlpProgram nlp = make_dense_nlp(
      1, 0, 0, [](const auto& z) { return sqrt(z[0]) + z[0] * z[0]; }, [](const auto& z) { return none(z); },
      [](const auto& z) { return none(z); });
  const SolveResult r = solve(nlp, SolverOptions{}, vec({-1.0}));
  CHECK(r.report.status == SolveStatus::EvaluationError);
  REQUIRE(r.report.failed_point.size() == 1);
  CHECK(r.report.failed_point[0] == -1.0);
}

TEST_CASE("bad options and initial points") {
  SolverOptions bad;
  bad.penalty_growth = 1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = SolverOptions{};
  bad.feas_tol = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  const NlpProgram nlp = build_nlp(block_transfer(2), Scheme::make(SchemeKind::SecondEuler));
  CHECK_THROWS_AS(solve(nlp, SolverOptions{}, VectorXd::Zero(3)), ContractViolation);
}

TEST_CASE("forward-mode gradient") {
  const MatrixXd j = gradient(
      [](const Vec<Dual>& z) {
        Vec<Dual> out(1);
        out[0] = z[0] * z[0];
        return out;
      },
      vec({3.0}));
  CHECK(j(0, 0) == 6.0);

  CHECK_THROWS_AS(gradient(
                      [](const Vec<Dual>& z) {
                        Vec<Dual> out(1);
                        out[0] = sqrt(z[0]);
                        return out;
                      },
                      vec({0.0})),
                  EvaluationError);
}

TEST_CASE("block defect Jacobian does not depend on the point") {
  const NlpProgram nlp = build_nlp(block_transfer(6), Scheme::make(SchemeKind::SecondRK4));
  const MatrixXd a = MatrixXd(nlp.eq_jacobian(random_point(nlp.n_vars, 1)));
  const MatrixXd b = MatrixXd(nlp.eq_jacobian(random_point(nlp.n_vars, 2, 10.0)));
  CHECK(a == b);
}

TEST_CASE("cartpole acceleration Jacobian matches central differences") {
  const auto cp = make_benchmark("cartpole");
  const VectorXd x = random_point(5, 4, 2.0);
  auto accel = [&](const auto& v) {
    using V = std::decay_t<decltype(v)>;
    return cp.accel(V(v.head(2)), V(v.segment(2, 2)), V(v.tail(1)));
  };
  const MatrixXd j = gradient(accel, x);
  for (int c = 0; c < 5; ++c) {
    VectorXd xp = x, xm = x;
    xp[c] += 1e-6;
    xm[c] -= 1e-6;
    const VectorXd fd = (accel(xp) - accel(xm)) / 2e-6;
    for (int r = 0; r < 2; ++r) CHECK(std::abs(j(r, c) - fd[r]) / std::max(1.0, std::abs(fd[r])) <= 1e-5);
  }
}

TEST_CASE("derivative checks on benchmark programs") {
  const NlpProgram block = build_nlp(block_transfer(5), Scheme::make(SchemeKind::SecondEuler));
  CHECK(check_derivatives(block, VectorXd::Zero(block.n_vars)) <= 1e-9);
  CHECK(check_derivatives(block, random_point(block.n_vars, 8)) <= 1e-9);

  std::uint64_t seed = 20;
  for (const auto& name : benchmark_names()) {
    const auto sys = make_benchmark(name);
    OptimalControlProblem p = make_problem(sys, 1.0, 5);
    p.stage.Q = MatrixXd::Identity(2 * sys.n_q(), 2 * sys.n_q());
    for (auto kind : {SchemeKind::FirstEuler, SchemeKind::SecondRK4}) {
      const NlpProgram nlp = build_nlp(p, Scheme::make(kind));
      CHECK(check_derivatives(nlp, random_point(nlp.n_vars, seed++, 0.5)) <= 1e-5);
    }
  }
}

TEST_CASE("solves are deterministic") {
  const NlpProgram nlp = build_nlp(block_transfer(20), Scheme::make(SchemeKind::SecondRK4));
  const SolveResult a = solve(nlp, SolverOptions{}, VectorXd::Zero(nlp.n_vars));
  const SolveResult b = solve(nlp, SolverOptions{}, VectorXd::Zero(nlp.n_vars));
  CHECK(a.z == b.z);
  CHECK(a.report.inner_iters == b.report.inner_iters);
  CHECK(a.report.history.size() == b.report.history.size());
  for (std::size_t i = 0; i < a.report.history.size(); ++i)
    CHECK(a.report.history[i].violation == b.report.history[i].violation);
}

TEST_CASE("outer violation does not grow unless the penalty does") {
  OptimalControlProblem p = make_problem(make_benchmark("cartpole"), 2.0, 20);
  p.xf = vec({0, M_PI, 0, 0});
  p.xf_fixed = {true, true, true, true};
  p.u_lower = vec({-20});
  p.u_upper = vec({20});
  const NlpProgram nlp = build_nlp(p, Scheme::make(SchemeKind::SecondEuler));
  const SolveResult r = solve(nlp, SolverOptions{}, VectorXd::Zero(nlp.n_vars));
  CHECK(r.report.status == SolveStatus::Optimal);
  const auto& h = r.report.history;
  // A rise in violation is always answered by a larger penalty on the next pass.
  for (std::size_t i = 1; i + 1 < h.size(); ++i)
    if (h[i].violation > h[i - 1].violation) CHECK(h[i + 1].penalty > h[i].penalty);
  for (std::size_t i = 1; i < h.size(); ++i) CHECK(h[i].penalty >= h[i - 1].penalty);
}
