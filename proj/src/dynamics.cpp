#include "modshoot/dynamics.hpp"

#include <sstream>

namespace modshoot {

namespace detail {

void throw_non_finite(const std::string& who, std::initializer_list<const VectorXd*> parts) {
  std::vector<double> point;
  std::ostringstream os;
  os << who << ": non-finite dynamics output at (";
  bool first = true;
  for (const VectorXd* p : parts) {
    for (Eigen::Index i = 0; i < p->size(); ++i) {
      point.push_back((*p)[i]);
      os << (first ? "" : ", ") << (*p)[i];
      first = false;
    }
  }
  os << ")";
  throw EvaluationError(os.str(), std::move(point));
}

void check_dim(const std::string& who, const char* what, Eigen::Index got, Eigen::Index want) {
  if (got != want) {
    std::ostringstream os;
    os << who << ": " << what << " has dimension " << got << ", expected " << want;
    throw ContractViolation(os.str());
  }
}

}  // namespace detail

HighOrderSystem::HighOrderSystem(const SecondOrderSystem& sys)
    : HighOrderSystem(sys.name(), 2, sys.n_q(), sys.n_u(), [sys](const auto& x, const auto& u) {
        const auto n = sys.n_q();
        using V = std::decay_t<decltype(x)>;
        const V q = x.head(n);
        const V qd = x.tail(n);
        return sys.accel(q, qd, u);
      }) {}

SecondOrderSystem HighOrderSystem::to_second_order() const {
  if (order_ != 2) {
    throw ContractViolation(name_ + ": to_second_order requires order 2, got " + std::to_string(order_));
  }
  // Smoothness metadata does not survive the round trip; 2 is the minimum that
  // makes q'' well-defined.
  return SecondOrderSystem(name_, n_q_, n_u_, 2, [self = *this](const auto& q, const auto& qd, const auto& u) {
    using V = std::decay_t<decltype(q)>;
    V x(q.size() + qd.size());
    x << q, qd;
    return self.top_deriv(x, u);
  });
}

FirstOrderSystem augment(const HighOrderSystem& sys) {
  const int n_q = sys.n_q();
  const int order = sys.order();
  return FirstOrderSystem(sys.name(), order * n_q, sys.n_u(), [sys, n_q, order](const auto& x, const auto& u) {
    using V = std::decay_t<decltype(x)>;
    V xdot(x.size());
    const Eigen::Index lower = Eigen::Index{order - 1} * n_q;
    xdot.head(lower) = x.tail(lower);
    xdot.tail(n_q) = sys.top_deriv(x, u);
    return xdot;
  });
}

FirstOrderSystem augment(const SecondOrderSystem& sys) {
  const int n_q = sys.n_q();
  return FirstOrderSystem(sys.name(), 2 * n_q, sys.n_u(), [sys, n_q](const auto& x, const auto& u) {
    using V = std::decay_t<decltype(x)>;
    const V q = x.head(n_q);
    const V qd = x.tail(n_q);
    V xdot(2 * n_q);
    xdot << qd, sys.accel(q, qd, u);
    return xdot;
  });
}

}  // namespace modshoot
