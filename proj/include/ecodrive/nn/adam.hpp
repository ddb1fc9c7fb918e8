#pragma once

#include <stdexcept>

#include <Eigen/Dense>

namespace ecodrive::nn {

class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AdamState {
  Eigen::VectorXd m;  // first moment
  Eigen::VectorXd v;  // second moment
  long step = 0;
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  AdamState() = default;
  AdamState(Eigen::Index size, double learning_rate);

  bool operator==(const AdamState& o) const;
};

/// One bias-corrected Adam update, in place. Throws NonFiniteError naming the
/// first offending gradient entry; nothing is modified in that case.
void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& grads, AdamState& state);

/// Index of the first non-finite entry, or -1.
Eigen::Index first_non_finite(const Eigen::VectorXd& x);

}  // namespace ecodrive::nn
