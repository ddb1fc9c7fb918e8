#include "ecodrive/nn/adam.hpp"

#include <cmath>
#include <sstream>

namespace ecodrive::nn {

AdamState::AdamState(Eigen::Index size, double learning_rate)
    : m(Eigen::VectorXd::Zero(size)), v(Eigen::VectorXd::Zero(size)), lr(learning_rate) {}

bool AdamState::operator==(const AdamState& o) const {
  return m.size() == o.m.size() && v.size() == o.v.size() && m == o.m && v == o.v && step == o.step && lr == o.lr &&
         beta1 == o.beta1 && beta2 == o.beta2 && epsilon == o.epsilon;
}

Eigen::Index first_non_finite(const Eigen::VectorXd& x) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) return i;
  }
  return -1;
}

void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& grads, AdamState& s) {
  if (grads.size() != params.size() || s.m.size() != params.size() || s.v.size() != params.size()) {
    throw std::invalid_argument("adam_step: size mismatch");
  }
  if (const Eigen::Index bad = first_non_finite(grads); bad >= 0) {
    std::ostringstream msg;
    msg << "adam_step: non-finite gradient at index " << bad << " of " << grads.size() << " (value " << grads[bad]
        << ", step " << s.step << ")";
    throw NonFiniteError(msg.str());
  }
  ++s.step;
  s.m = s.beta1 * s.m + (1.0 - s.beta1) * grads;
  s.v = s.beta2 * s.v + (1.0 - s.beta2) * grads.cwiseAbs2();
  const double c1 = 1.0 - std::pow(s.beta1, static_cast<double>(s.step));
  const double c2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.step));
  params.array() -= s.lr * (s.m.array() / c1) / ((s.v.array() / c2).sqrt() + s.epsilon);
}

}  // namespace ecodrive::nn
