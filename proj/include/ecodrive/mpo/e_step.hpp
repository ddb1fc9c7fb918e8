#pragma once

#include <stdexcept>

#include <Eigen/Dense>

namespace ecodrive::mpo {

class DualSolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TemperatureBracket {
  double lo = 1e-6;
  double hi = 1e3;
  double tolerance = 1e-6;  // relative width of the golden-section bracket
};

struct EStepResult {
  Eigen::MatrixXd weights;  // states x samples, rows sum to 1
  double eta = 0.0;
  double kl = 0.0;          // mean over states of KL(q || uniform over samples)
};

/// g(eta) = eta * eps + eta * mean_s log mean_j exp(Q_sj / eta).
double temperature_dual(const Eigen::MatrixXd& q, double eta, double eps);

/// dg/deta = eps - mean_s KL(q_eta(s) || uniform).
double temperature_dual_slope(const Eigen::MatrixXd& q, double eta, double eps);

/// Row-wise softmax of Q / eta.
Eigen::MatrixXd sample_weights(const Eigen::MatrixXd& q, double eta);

double mean_kl_to_uniform(const Eigen::MatrixXd& weights);

/// Minimizes the temperature dual over the bracket: golden-section search in
/// log(eta), then bisection on the slope inside the final bracket.
EStepResult e_step(const Eigen::MatrixXd& q, double eps, const TemperatureBracket& bracket = {});

}  // namespace ecodrive::mpo
