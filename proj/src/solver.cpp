#include "modshoot/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

#include <Eigen/SparseCholesky>

namespace modshoot {

void SolverOptions::validate() const {
  auto require = [](bool ok, const char* msg) {
    if (!ok) throw ConfigError(std::string("solver options: ") + msg);
  };
  require(feas_tol > 0.0, "feas_tol must be positive");
  require(stat_tol > 0.0, "stat_tol must be positive");
  require(penalty_init > 0.0, "penalty_init must be positive");
  require(penalty_growth > 1.0, "penalty_growth must exceed 1");
  require(penalty_max >= penalty_init, "penalty_max must be at least penalty_init");
  require(max_outer >= 1, "max_outer must be at least 1");
  require(max_inner >= 1, "max_inner must be at least 1");
  require(armijo > 0.0 && armijo < 1.0, "armijo must lie in (0, 1)");
  require(backtrack > 0.0 && backtrack < 1.0, "backtrack must lie in (0, 1)");
  require(memory >= 0, "memory must be nonnegative");
}

std::string_view status_label(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal:
      return "Optimal";
    case SolveStatus::MaxIterations:
      return "MaxIterations";
    case SolveStatus::LineSearchFailure:
      return "LineSearchFailure";
    case SolveStatus::EvaluationError:
      return "EvaluationError";
  }
  return "?";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double inf_norm(const VectorXd& v) { return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>(); }

double violation(const VectorXd& c, const VectorXd& g) {
  double v = inf_norm(c);
  for (Eigen::Index i = 0; i < g.size(); ++i) v = std::max(v, g[i]);
  return v;
}

// Thrown out of the inner machinery so the decision vector that triggered an
// evaluation failure can be reported.
struct FailedAt {
  VectorXd z;
  std::string what;
};

class AugmentedLagrangian {
 public:
  struct Point {
    VectorXd z;
    double value = 0.0;
    VectorXd grad;
    VectorXd c;
    VectorXd g;
    SparseMatrix jac_eq;
    SparseMatrix jac_ineq;
  };

  AugmentedLagrangian(const NlpProgram& nlp, double rho)
      : nlp_(nlp), lam_(VectorXd::Zero(nlp.m_eq)), mu_(VectorXd::Zero(nlp.m_ineq)), rho_(rho) {}

  double rho() const { return rho_; }
  void set_rho(double rho) { rho_ = rho; }

  double value(const VectorXd& z) const {
    try {
      const VectorXd c = nlp_.eq_residuals(z);
      const VectorXd g = nlp_.ineq_residuals(z);
      return value_from(nlp_.objective(z), c, g);
    } catch (const EvaluationError& e) {
      throw FailedAt{z, e.what()};
    }
  }

  Point evaluate(const VectorXd& z) const {
    Point p;
    try {
      p.z = z;
      p.c = nlp_.eq_residuals(z);
      p.g = nlp_.ineq_residuals(z);
      p.value = value_from(nlp_.objective(z), p.c, p.g);
      p.jac_eq = nlp_.eq_jacobian(z);
      p.jac_ineq = nlp_.ineq_jacobian(z);
      p.grad = nlp_.objective_gradient(z);
    } catch (const EvaluationError& e) {
      throw FailedAt{z, e.what()};
    }
    if (nlp_.m_eq > 0) p.grad += p.jac_eq.transpose() * (lam_ + rho_ * p.c);
    if (nlp_.m_ineq > 0) p.grad += p.jac_ineq.transpose() * shifted(p.g);
    if (!p.grad.allFinite()) throw FailedAt{z, "non-finite augmented Lagrangian gradient"};
    return p;
  }

  /// Gauss-Newton model of the augmented Lagrangian Hessian at p.
  SparseMatrix model(const Point& p) const {
    const int n = nlp_.n_vars;
    SparseMatrix h(n, n);
    if (nlp_.objective_hessian) {
      h = nlp_.objective_hessian(p.z);
    }
    if (nlp_.m_eq > 0) {
      h += rho_ * SparseMatrix(p.jac_eq.transpose() * p.jac_eq);
      if (nlp_.eq_curvature) h += nlp_.eq_curvature(p.z, lam_ + rho_ * p.c);
    }
    if (nlp_.m_ineq > 0) {
      VectorXd active = VectorXd::Zero(nlp_.m_ineq);
      const VectorXd s = shifted(p.g);
      for (int i = 0; i < nlp_.m_ineq; ++i) active[i] = s[i] > 0.0 ? 1.0 : 0.0;
      h += rho_ * SparseMatrix(p.jac_ineq.transpose() * active.asDiagonal() * p.jac_ineq);
    }
    return h;
  }

  void update_multipliers(const Point& p) {
    lam_ += rho_ * p.c;
    mu_ = shifted(p.g);
  }

 private:
  VectorXd shifted(const VectorXd& g) const { return (mu_ + rho_ * g).cwiseMax(0.0); }

  double value_from(double f, const VectorXd& c, const VectorXd& g) const {
    double v = f;
    if (c.size() > 0) v += lam_.dot(c) + 0.5 * rho_ * c.squaredNorm();
    if (g.size() > 0) v += (shifted(g).squaredNorm() - mu_.squaredNorm()) / (2.0 * rho_);
    return v;
  }

  const NlpProgram& nlp_;
  VectorXd lam_;
  VectorXd mu_;
  double rho_;
};

// Factorizes the seed curvature model, adding a diagonal shift until the
// factorization is positive definite.
class SeedSolver {
 public:
  explicit SeedSolver(SparseMatrix h) : h_(std::move(h)) {
    const int n = static_cast<int>(h_.rows());
    double scale = 1.0;
    for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(h_.coeff(i, i)));
    double shift = 1e-10 * scale;
    SparseMatrix id(n, n);
    id.setIdentity();
    for (int attempt = 0; attempt < 12; ++attempt) {
      ldlt_.compute(h_ + shift * id);
      if (ldlt_.info() == Eigen::Success && (n == 0 || ldlt_.vectorD().minCoeff() > 0.0)) return;
      shift *= 100.0;
    }
    ok_ = false;
  }

  bool ok() const { return ok_; }
  VectorXd solve(const VectorXd& v) const { return ldlt_.solve(v); }

 private:
  SparseMatrix h_;
  Eigen::SimplicialLDLT<SparseMatrix> ldlt_;
  bool ok_ = true;
};

struct SecantPair {
  VectorXd s;
  VectorXd y;
  double rho;
};

VectorXd two_loop(const std::deque<SecantPair>& memory, const SeedSolver& seed, const VectorXd& grad) {
  VectorXd q = grad;
  std::vector<double> alpha(memory.size());
  for (std::size_t i = memory.size(); i-- > 0;) {
    alpha[i] = memory[i].rho * memory[i].s.dot(q);
    q -= alpha[i] * memory[i].y;
  }
  VectorXd r = seed.solve(q);
  for (std::size_t i = 0; i < memory.size(); ++i) {
    const double beta = memory[i].rho * memory[i].y.dot(r);
    r += (alpha[i] - beta) * memory[i].s;
  }
  return -r;
}

enum class InnerOutcome { Converged, MaxIterations, LineSearchFailure };

struct InnerResult {
  InnerOutcome outcome;
  AugmentedLagrangian::Point point;
  int iterations;
};

InnerResult minimize_inner(const AugmentedLagrangian& al, const VectorXd& start, double tol,
                           const SolverOptions& opts) {
  AugmentedLagrangian::Point p = al.evaluate(start);
  std::deque<SecantPair> memory;
  int iters = 0;
  while (iters < opts.max_inner) {
    if (inf_norm(p.grad) <= tol) return {InnerOutcome::Converged, std::move(p), iters};

    const SeedSolver seed(al.model(p));
    if (!seed.ok()) return {InnerOutcome::LineSearchFailure, std::move(p), iters};
    VectorXd d = two_loop(memory, seed, p.grad);
    double slope = p.grad.dot(d);
    if (!(slope < 0.0) || !d.allFinite()) {
      memory.clear();
      d = -seed.solve(p.grad);
      slope = p.grad.dot(d);
      if (!(slope < 0.0)) return {InnerOutcome::LineSearchFailure, std::move(p), iters};
    }

    // Values within a few ulps of the current one are indistinguishable; the
    // slack lets the search make progress once the gradient is near noise.
    const double slack = 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(p.value));
    double step = 1.0;
    bool accepted = false;
    VectorXd trial;
    for (int ls = 0; ls < 60; ++ls) {
      trial = p.z + step * d;
      const double v = al.value(trial);
      if (std::isfinite(v) && v <= p.value + opts.armijo * step * slope + slack) {
        accepted = true;
        break;
      }
      step *= opts.backtrack;
    }
    if (!accepted) {
      if (!memory.empty()) {
        memory.clear();
        continue;
      }
      return {InnerOutcome::LineSearchFailure, std::move(p), iters};
    }

    AugmentedLagrangian::Point next = al.evaluate(trial);
    VectorXd s = next.z - p.z;
    VectorXd y = next.grad - p.grad;
    const double sy = s.dot(y);
    if (opts.memory > 0 && sy > 1e-12 * s.norm() * y.norm()) {
      memory.push_back({std::move(s), std::move(y), 1.0 / sy});
      if (static_cast<int>(memory.size()) > opts.memory) memory.pop_front();
    }
    p = std::move(next);
    ++iters;
  }
  const InnerOutcome out = inf_norm(p.grad) <= tol ? InnerOutcome::Converged : InnerOutcome::MaxIterations;
  return {out, std::move(p), iters};
}

}  // namespace

SolveResult solve(const NlpProgram& nlp, const SolverOptions& opts, const VectorXd& initial) {
  opts.validate();
  if (initial.size() != nlp.n_vars) {
    std::ostringstream os;
    os << "solve: initial point has length " << initial.size() << ", expected " << nlp.n_vars;
    throw ContractViolation(os.str());
  }
  const auto start = std::chrono::steady_clock::now();
  SolveResult result{initial, {}};
  SolveReport& rep = result.report;
  auto finish = [&](SolveStatus status) {
    rep.status = status;
    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
  };

  AugmentedLagrangian al(nlp, opts.penalty_init);
  double inner_tol = std::max(opts.stat_tol, 1e-2);
  double previous_violation = kInf;
  int line_search_failures = 0;
  try {
    for (int outer = 0; outer < opts.max_outer; ++outer) {
      InnerResult inner = minimize_inner(al, result.z, inner_tol, opts);
      const auto& p = inner.point;
      result.z = p.z;
      rep.outer_iters = outer + 1;
      rep.inner_iters += inner.iterations;
      rep.final_feasibility = violation(p.c, p.g);
      rep.final_stationarity = inf_norm(p.grad);
      rep.history.push_back({al.rho(), rep.final_feasibility, rep.final_stationarity, inner.iterations});

      if (rep.final_feasibility <= opts.feas_tol && rep.final_stationarity <= opts.stat_tol) {
        return finish(SolveStatus::Optimal);
      }
      if (inner.outcome == InnerOutcome::LineSearchFailure) {
        if (++line_search_failures >= 3) {
          rep.message = "line search failed in three outer iterations";
          return finish(SolveStatus::LineSearchFailure);
        }
      }

      al.update_multipliers(p);
      if (rep.final_feasibility > 0.25 * previous_violation) {
        al.set_rho(std::min(al.rho() * opts.penalty_growth, opts.penalty_max));
      }
      previous_violation = rep.final_feasibility;
      inner_tol = std::max(opts.stat_tol, 0.1 * inner_tol);
    }
  } catch (const FailedAt& failure) {
    rep.message = failure.what;
    rep.failed_point.assign(failure.z.data(), failure.z.data() + failure.z.size());
    return finish(SolveStatus::EvaluationError);
  }
  rep.message = "outer iteration limit reached";
  return finish(SolveStatus::MaxIterations);
}

double check_derivatives(const NlpProgram& nlp, const VectorXd& point) {
  const Eigen::Index n = point.size();
  double worst = 0.0;
  auto compare = [&](const MatrixXd& analytic, const MatrixXd& numeric) {
    for (Eigen::Index i = 0; i < analytic.rows(); ++i) {
      for (Eigen::Index j = 0; j < analytic.cols(); ++j) {
        const double err = std::abs(analytic(i, j) - numeric(i, j)) / std::max(1.0, std::abs(numeric(i, j)));
        worst = std::max(worst, std::isfinite(err) ? err : kInf);
      }
    }
  };

  MatrixXd fd_grad(1, n);
  MatrixXd fd_eq(nlp.m_eq, n);
  MatrixXd fd_ineq(nlp.m_ineq, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double step = 1e-6 * std::max(1.0, std::abs(point[j]));
    VectorXd zp = point, zm = point;
    zp[j] += step;
    zm[j] -= step;
    const double width = zp[j] - zm[j];
    fd_grad(0, j) = (nlp.objective(zp) - nlp.objective(zm)) / width;
    if (nlp.m_eq > 0) fd_eq.col(j) = (nlp.eq_residuals(zp) - nlp.eq_residuals(zm)) / width;
    if (nlp.m_ineq > 0) fd_ineq.col(j) = (nlp.ineq_residuals(zp) - nlp.ineq_residuals(zm)) / width;
  }
  compare(nlp.objective_gradient(point).transpose(), fd_grad);
  if (nlp.m_eq > 0) compare(MatrixXd(nlp.eq_jacobian(point)), fd_eq);
  if (nlp.m_ineq > 0) compare(MatrixXd(nlp.ineq_jacobian(point)), fd_ineq);
  return worst;
}

}  // namespace modshoot
