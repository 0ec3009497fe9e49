#include "modshoot/ocp.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

namespace modshoot {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

void require_shape(const MatrixXd& m, Eigen::Index rows, Eigen::Index cols, const char* name) {
  std::ostringstream os;
  os << name << " must be " << rows << "x" << cols << ", got " << m.rows() << "x" << m.cols();
  require(m.rows() == rows && m.cols() == cols, os.str());
}

void require_size(const VectorXd& v, Eigen::Index n, const char* name) {
  std::ostringstream os;
  os << name << " must have " << n << " entries, got " << v.size();
  require(v.size() == n, os.str());
}

bool is_psd(const MatrixXd& m, bool strict) {
  const MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  const double scale = std::max(1.0, sym.cwiseAbs().maxCoeff());
  const double smallest = es.eigenvalues().minCoeff();
  return strict ? smallest > 1e-12 * scale : smallest >= -1e-12 * scale;
}

}  // namespace

void OptimalControlProblem::validate() const {
  const int nq = system.n_q();
  const int nu = system.n_u();
  const int nx = 2 * nq;
  require(nq > 0 && nu > 0, "problem has no system");
  require(std::isfinite(tf) && tf > 0.0, "tf must be positive");
  require(N >= 1, "N must be at least 1");
  require_shape(stage.Q, nx, nx, "Q");
  require_shape(stage.R, nu, nu, "R");
  require_size(stage.x_ref, nx, "stage x_ref");
  require_size(stage.u_ref, nu, "stage u_ref");
  require_shape(terminal.Qf, nx, nx, "Qf");
  require_size(terminal.x_ref, nx, "terminal x_ref");
  require(is_psd(stage.Q, false), "Q must be positive semidefinite");
  require(is_psd(stage.R, true), "R must be positive definite");
  require(is_psd(terminal.Qf, false), "Qf must be positive semidefinite");
  require_size(u_lower, nu, "control lower bound");
  require_size(u_upper, nu, "control upper bound");
  for (int i = 0; i < nu; ++i) require(u_lower[i] <= u_upper[i], "control bounds must satisfy lower <= upper");
  require((x_lower.size() == 0) == (x_upper.size() == 0), "state bounds need both lower and upper");
  if (x_lower.size() != 0) {
    require_size(x_lower, nx, "state lower bound");
    require_size(x_upper, nx, "state upper bound");
    for (int i = 0; i < nx; ++i) require(x_lower[i] <= x_upper[i], "state bounds must satisfy lower <= upper");
  }
  require_size(x0, nx, "initial state");
  require(x0.allFinite(), "initial state must be finite");
  require_size(xf, nx, "terminal state");
  require(static_cast<int>(xf_fixed.size()) == nx, "terminal_fixed must have one flag per state component");
  for (int i = 0; i < nx; ++i) require(!xf_fixed[i] || std::isfinite(xf[i]), "fixed terminal components must be finite");
}

OptimalControlProblem make_problem(SecondOrderSystem sys, double tf, int N) {
  OptimalControlProblem p;
  const int nx = 2 * sys.n_q();
  const int nu = sys.n_u();
  p.system = std::move(sys);
  p.tf = tf;
  p.N = N;
  p.stage = {MatrixXd::Zero(nx, nx), MatrixXd::Identity(nu, nu), VectorXd::Zero(nx), VectorXd::Zero(nu)};
  p.terminal = {MatrixXd::Zero(nx, nx), VectorXd::Zero(nx)};
  const double inf = std::numeric_limits<double>::infinity();
  p.u_lower = VectorXd::Constant(nu, -inf);
  p.u_upper = VectorXd::Constant(nu, inf);
  p.x0 = VectorXd::Zero(nx);
  p.xf = VectorXd::Zero(nx);
  p.xf_fixed.assign(nx, false);
  return p;
}

VectorXd DecisionLayout::pack(const MatrixXd& states, const MatrixXd& controls) const {
  if (states.rows() != N_ + 1 || states.cols() != 2 * n_q_) {
    throw ContractViolation("pack: states must be (N+1) x 2 n_q");
  }
  if (controls.rows() != N_ || controls.cols() != n_u_) throw ContractViolation("pack: controls must be N x n_u");
  VectorXd z(n_vars());
  for (int k = 0; k <= N_; ++k) {
    z.segment(state_index(k), 2 * n_q_) = states.row(k).transpose();
    if (k < N_) z.segment(control_index(k), n_u_) = controls.row(k).transpose();
  }
  return z;
}

VectorXd DecisionLayout::pack(const KnotTrajectory& traj) const {
  traj.validate(n_q_, n_u_, 2);
  if (traj.intervals() != N_) throw ContractViolation("pack: trajectory has the wrong number of intervals");
  MatrixXd states(N_ + 1, 2 * n_q_);
  states << traj.q, traj.qdot();
  return pack(states, traj.controls);
}

KnotTrajectory DecisionLayout::unpack(const VectorXd& z, double h) const {
  if (z.size() != n_vars()) {
    std::ostringstream os;
    os << "unpack: expected " << n_vars() << " decision variables, got " << z.size();
    throw ContractViolation(os.str());
  }
  KnotTrajectory traj;
  traj.times.resize(N_ + 1);
  traj.q.resize(N_ + 1, n_q_);
  traj.derivs.assign(1, MatrixXd(N_ + 1, n_q_));
  traj.controls.resize(N_, n_u_);
  for (int k = 0; k <= N_; ++k) {
    traj.times[k] = k * h;
    traj.q.row(k) = z.segment(state_index(k), n_q_).transpose();
    traj.derivs[0].row(k) = z.segment(qdot_index(k), n_q_).transpose();
    if (k < N_) traj.controls.row(k) = z.segment(control_index(k), n_u_).transpose();
  }
  return traj;
}

namespace {

// One linear inequality: sign * z[index] - sign * bound <= 0.
struct BoundRow {
  int index;
  double sign;
  double bound;
};

struct Transcription {
  OptimalControlProblem problem;
  Scheme scheme;
  DecisionLayout layout;
  double h;
  std::vector<BoundRow> bounds;
  std::vector<int> terminal_rows;  // state component indices fixed at N
  MatrixXd q_sym, r_sym, qf_sym;   // Q + Q' etc.

  Transcription(const OptimalControlProblem& p, const Scheme& s)
      : problem(p), scheme(s), layout(p.N, p.system.n_q(), p.system.n_u()), h(p.step()) {
    const int nx = p.n_x();
    auto add_bounds = [&](int base, const VectorXd& lo, const VectorXd& hi) {
      for (Eigen::Index i = 0; i < hi.size(); ++i) {
        if (std::isfinite(hi[i])) bounds.push_back({base + static_cast<int>(i), 1.0, hi[i]});
        if (std::isfinite(lo[i])) bounds.push_back({base + static_cast<int>(i), -1.0, lo[i]});
      }
    };
    for (int k = 0; k <= p.N; ++k) {
      if (p.x_lower.size() != 0) add_bounds(layout.state_index(k), p.x_lower, p.x_upper);
      if (k < p.N) add_bounds(layout.control_index(k), p.u_lower, p.u_upper);
    }
    for (int i = 0; i < nx; ++i) {
      if (p.xf_fixed[i]) terminal_rows.push_back(i);
    }
    q_sym = p.stage.Q + p.stage.Q.transpose();
    r_sym = p.stage.R + p.stage.R.transpose();
    qf_sym = p.terminal.Qf + p.terminal.Qf.transpose();
  }

  int m_eq() const { return problem.N * problem.n_x() + problem.n_x() + static_cast<int>(terminal_rows.size()); }

  double objective(const VectorXd& z) const {
    const int nx = problem.n_x();
    const int nu = problem.system.n_u();
    double running = 0.0;
    for (int k = 0; k < problem.N; ++k) {
      const VectorXd dx = z.segment(layout.state_index(k), nx) - problem.stage.x_ref;
      const VectorXd du = z.segment(layout.control_index(k), nu) - problem.stage.u_ref;
      running += dx.dot(problem.stage.Q * dx) + du.dot(problem.stage.R * du);
    }
    const VectorXd dxf = z.segment(layout.state_index(problem.N), nx) - problem.terminal.x_ref;
    return running * h + dxf.dot(problem.terminal.Qf * dxf);
  }

  VectorXd objective_gradient(const VectorXd& z) const {
    const int nx = problem.n_x();
    const int nu = problem.system.n_u();
    VectorXd g = VectorXd::Zero(z.size());
    for (int k = 0; k < problem.N; ++k) {
      const int xi = layout.state_index(k);
      const int ui = layout.control_index(k);
      g.segment(xi, nx) = h * q_sym * (z.segment(xi, nx) - problem.stage.x_ref);
      g.segment(ui, nu) = h * r_sym * (z.segment(ui, nu) - problem.stage.u_ref);
    }
    const int xn = layout.state_index(problem.N);
    g.segment(xn, nx) = qf_sym * (z.segment(xn, nx) - problem.terminal.x_ref);
    return g;
  }

  SparseMatrix objective_hessian() const {
    std::vector<Eigen::Triplet<double>> t;
    auto add_block = [&](int base, const MatrixXd& m, double scale) {
      for (int r = 0; r < m.rows(); ++r) {
        for (int c = 0; c < m.cols(); ++c) {
          if (m(r, c) != 0.0) t.emplace_back(base + r, base + c, scale * m(r, c));
        }
      }
    };
    for (int k = 0; k < problem.N; ++k) {
      add_block(layout.state_index(k), q_sym, h);
      add_block(layout.control_index(k), r_sym, h);
    }
    add_block(layout.state_index(problem.N), qf_sym, 1.0);
    SparseMatrix hess(layout.n_vars(), layout.n_vars());
    hess.setFromTriplets(t.begin(), t.end());
    return hess;
  }

  VectorXd eq_residuals(const VectorXd& z) const {
    const int nx = problem.n_x();
    const int nu = problem.system.n_u();
    VectorXd c(m_eq());
    for (int k = 0; k < problem.N; ++k) {
      const VectorXd xk = z.segment(layout.state_index(k), nx);
      const VectorXd uk = z.segment(layout.control_index(k), nu);
      const VectorXd xn = z.segment(layout.state_index(k + 1), nx);
      c.segment(k * nx, nx) = defect<double>(problem.system, scheme, xk, xn, uk, h);
    }
    int row = problem.N * nx;
    c.segment(row, nx) = z.segment(layout.state_index(0), nx) - problem.x0;
    row += nx;
    const int xn = layout.state_index(problem.N);
    for (int i : terminal_rows) c[row++] = z[xn + i] - problem.xf[i];
    return c;
  }

  SparseMatrix eq_jacobian(const VectorXd& z) const {
    const int nx = problem.n_x();
    const int nu = problem.system.n_u();
    const int local = nx + nu;  // x_k and u_k; x_{k+1} enters with -I
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<std::size_t>(problem.N) * nx * (local + 1) + 2 * nx);
    Vec<Dual> xk(nx), uk(nu);
    for (int k = 0; k < problem.N; ++k) {
      const int base = layout.state_index(k);
      for (int i = 0; i < nx; ++i) xk[i] = Dual(z[base + i]);
      for (int i = 0; i < nu; ++i) uk[i] = Dual(z[base + nx + i]);
      for (int j = 0; j < local; ++j) {
        Dual& seed = j < nx ? xk[j] : uk[j - nx];
        seed.der = 1.0;
        const Vec<Dual> next = propagate<Dual>(problem.system, scheme, xk, uk, h);
        seed.der = 0.0;
        for (int r = 0; r < nx; ++r) {
          if (next[r].der != 0.0) t.emplace_back(k * nx + r, base + j, next[r].der);
        }
      }
      const int next_base = layout.state_index(k + 1);
      for (int r = 0; r < nx; ++r) t.emplace_back(k * nx + r, next_base + r, -1.0);
    }
    int row = problem.N * nx;
    for (int i = 0; i < nx; ++i) t.emplace_back(row + i, layout.state_index(0) + i, 1.0);
    row += nx;
    const int xn = layout.state_index(problem.N);
    for (int i : terminal_rows) t.emplace_back(row++, xn + i, 1.0);
    SparseMatrix jac(m_eq(), layout.n_vars());
    jac.setFromTriplets(t.begin(), t.end());
    return jac;
  }

  // Gradient of w' defect_k with respect to the local (x_k, u_k).
  VectorXd local_gradient(const VectorXd& v, const VectorXd& w) const {
    const int nx = problem.n_x();
    const int local = static_cast<int>(v.size());
    Vec<Dual> xk(nx), uk(local - nx);
    for (int i = 0; i < nx; ++i) xk[i] = Dual(v[i]);
    for (int i = nx; i < local; ++i) uk[i - nx] = Dual(v[i]);
    VectorXd g(local);
    for (int j = 0; j < local; ++j) {
      Dual& seed = j < nx ? xk[j] : uk[j - nx];
      seed.der = 1.0;
      const Vec<Dual> next = propagate<Dual>(problem.system, scheme, xk, uk, h);
      seed.der = 0.0;
      double acc = 0.0;
      for (int r = 0; r < nx; ++r) acc += w[r] * next[r].der;
      g[j] = acc;
    }
    return g;
  }

  // Block-diagonal Hessian of w' c: the boundary rows and the -I coupling to
  // x_{k+1} are linear, so only the (x_k, u_k) blocks of the defects carry
  // curvature. Each block is a central difference of exact local gradients.
  SparseMatrix eq_curvature(const VectorXd& z, const VectorXd& w) const {
    const int nx = problem.n_x();
    const int local = nx + problem.system.n_u();
    std::vector<Eigen::Triplet<double>> t;
    MatrixXd block(local, local);
    for (int k = 0; k < problem.N; ++k) {
      const VectorXd wk = w.segment(k * nx, nx);
      if (wk.isZero(0.0)) continue;
      const int base = layout.state_index(k);
      const VectorXd v = z.segment(base, local);
      for (int j = 0; j < local; ++j) {
        const double step = 1e-5 * std::max(1.0, std::abs(v[j]));
        VectorXd vp = v, vm = v;
        vp[j] += step;
        vm[j] -= step;
        block.col(j) = (local_gradient(vp, wk) - local_gradient(vm, wk)) / (vp[j] - vm[j]);
      }
      const MatrixXd sym = 0.5 * (block + block.transpose());
      for (int r = 0; r < local; ++r) {
        for (int c = 0; c < local; ++c) {
          if (sym(r, c) != 0.0) t.emplace_back(base + r, base + c, sym(r, c));
        }
      }
    }
    SparseMatrix hess(layout.n_vars(), layout.n_vars());
    hess.setFromTriplets(t.begin(), t.end());
    return hess;
  }

  VectorXd ineq_residuals(const VectorXd& z) const {
    VectorXd g(bounds.size());
    for (std::size_t r = 0; r < bounds.size(); ++r) {
      const auto& b = bounds[r];
      g[static_cast<Eigen::Index>(r)] = b.sign * (z[b.index] - b.bound);
    }
    return g;
  }

  SparseMatrix ineq_jacobian() const {
    std::vector<Eigen::Triplet<double>> t;
    for (std::size_t r = 0; r < bounds.size(); ++r) {
      t.emplace_back(static_cast<int>(r), bounds[r].index, bounds[r].sign);
    }
    SparseMatrix jac(static_cast<Eigen::Index>(bounds.size()), layout.n_vars());
    jac.setFromTriplets(t.begin(), t.end());
    return jac;
  }
};

void check_length(const VectorXd& z, int n) {
  if (z.size() != n) {
    std::ostringstream os;
    os << "decision vector has length " << z.size() << ", expected " << n;
    throw ContractViolation(os.str());
  }
}

}  // namespace

NlpProgram build_nlp(const OptimalControlProblem& problem, const Scheme& scheme) {
  problem.validate();
  auto tr = std::make_shared<const Transcription>(problem, scheme);
  const int n = tr->layout.n_vars();

  NlpProgram nlp;
  nlp.n_vars = n;
  nlp.m_eq = tr->m_eq();
  nlp.m_ineq = static_cast<int>(tr->bounds.size());
  nlp.objective = [tr, n](const VectorXd& z) {
    check_length(z, n);
    return tr->objective(z);
  };
  nlp.objective_gradient = [tr, n](const VectorXd& z) {
    check_length(z, n);
    return tr->objective_gradient(z);
  };
  const SparseMatrix hess = tr->objective_hessian();
  nlp.objective_hessian = [hess](const VectorXd&) { return hess; };
  nlp.eq_residuals = [tr, n](const VectorXd& z) {
    check_length(z, n);
    return tr->eq_residuals(z);
  };
  nlp.eq_jacobian = [tr, n](const VectorXd& z) {
    check_length(z, n);
    return tr->eq_jacobian(z);
  };
  nlp.eq_curvature = [tr, n](const VectorXd& z, const VectorXd& w) {
    check_length(z, n);
    return tr->eq_curvature(z, w);
  };
  nlp.ineq_residuals = [tr, n](const VectorXd& z) {
    check_length(z, n);
    return tr->ineq_residuals(z);
  };
  const SparseMatrix ineq_jac = tr->ineq_jacobian();
  nlp.ineq_jacobian = [ineq_jac](const VectorXd&) { return ineq_jac; };
  return nlp;
}

}  // namespace modshoot
