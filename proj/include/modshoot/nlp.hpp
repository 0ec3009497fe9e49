#pragma once

// Nonlinear program interface shared by the transcription builder and the
// solver, plus forward-mode Jacobians for small hand-written programs.
//
//   min f(z)  s.t.  c(z) = 0,  g(z) <= 0

#include <functional>
#include <sstream>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "modshoot/dual.hpp"
#include "modshoot/dynamics.hpp"
#include "modshoot/errors.hpp"

namespace modshoot {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct NlpProgram {
  int n_vars = 0;
  int m_eq = 0;
  int m_ineq = 0;

  std::function<double(const VectorXd&)> objective;
  std::function<VectorXd(const VectorXd&)> objective_gradient;
  /// Optional. When set, the solver uses it to seed its curvature model.
  std::function<SparseMatrix(const VectorXd&)> objective_hessian;

  std::function<VectorXd(const VectorXd&)> eq_residuals;
  std::function<SparseMatrix(const VectorXd&)> eq_jacobian;
  /// Optional. Hessian of w'c at z for equality weights w; added to the
  /// solver's curvature model when set.
  std::function<SparseMatrix(const VectorXd&, const VectorXd&)> eq_curvature;
  std::function<VectorXd(const VectorXd&)> ineq_residuals;
  std::function<SparseMatrix(const VectorXd&)> ineq_jacobian;
};

/// Dense Jacobian of f: R^n -> R^m at x by forward-mode dual numbers, one pass
/// per input direction. `f` maps Vec<Dual> to Vec<Dual>.
template <class F>
MatrixXd gradient(F&& f, const VectorXd& x) {
  const Eigen::Index n = x.size();
  Vec<Dual> xd(n);
  for (Eigen::Index i = 0; i < n; ++i) xd[i] = Dual(x[i]);
  MatrixXd jac;
  for (Eigen::Index j = 0; j < n; ++j) {
    xd[j].der = 1.0;
    const Vec<Dual> y = f(xd);
    xd[j].der = 0.0;
    if (j == 0) jac.resize(y.size(), n);
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      if (!isfinite(y[i])) {
        std::ostringstream os;
        os << "non-finite Jacobian entry (" << i << ", " << j << ")";
        throw EvaluationError(os.str(), std::vector<double>(x.data(), x.data() + n));
      }
      jac(i, j) = y[i].der;
    }
  }
  if (n == 0) jac.resize(0, 0);
  return jac;
}

/// Builds an NlpProgram from generic callables over the scalar type:
///   objective(z) -> T,  eq(z) -> Vec<T>,  ineq(z) -> Vec<T>.
/// All derivatives are dense forward-mode; the objective Hessian seed is a
/// symmetrized central difference of the exact gradient. Intended for small
/// programs and tests.
template <class Obj, class Eq, class Ineq>
NlpProgram make_dense_nlp(int n_vars, int m_eq, int m_ineq, Obj obj, Eq eq, Ineq ineq) {
  NlpProgram nlp;
  nlp.n_vars = n_vars;
  nlp.m_eq = m_eq;
  nlp.m_ineq = m_ineq;
  nlp.objective = [obj](const VectorXd& z) { return obj(Vec<double>(z)); };
  auto grad = [obj](const VectorXd& z) -> VectorXd {
    MatrixXd j = gradient(
        [&](const Vec<Dual>& zd) {
          Vec<Dual> out(1);
          out[0] = obj(zd);
          return out;
        },
        z);
    return j.row(0).transpose();
  };
  nlp.objective_gradient = grad;
  nlp.objective_hessian = [grad](const VectorXd& z) -> SparseMatrix {
    const Eigen::Index n = z.size();
    MatrixXd hess(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double step = 1e-6 * std::max(1.0, std::abs(z[j]));
      VectorXd zp = z, zm = z;
      zp[j] += step;
      zm[j] -= step;
      hess.col(j) = (grad(zp) - grad(zm)) / (2.0 * step);
    }
    MatrixXd sym = 0.5 * (hess + hess.transpose());
    return sym.sparseView();
  };
  nlp.eq_residuals = [eq](const VectorXd& z) -> VectorXd { return eq(Vec<double>(z)); };
  nlp.eq_jacobian = [eq, n_vars, m_eq](const VectorXd& z) -> SparseMatrix {
    if (m_eq == 0) return SparseMatrix(0, n_vars);
    return gradient([&](const Vec<Dual>& zd) { return eq(zd); }, z).sparseView();
  };
  nlp.ineq_residuals = [ineq](const VectorXd& z) -> VectorXd { return ineq(Vec<double>(z)); };
  nlp.ineq_jacobian = [ineq, n_vars, m_ineq](const VectorXd& z) -> SparseMatrix {
    if (m_ineq == 0) return SparseMatrix(0, n_vars);
    return gradient([&](const Vec<Dual>& zd) { return ineq(zd); }, z).sparseView();
  };
  return nlp;
}

}  // namespace modshoot
