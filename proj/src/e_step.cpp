#include "ecodrive/mpo/e_step.hpp"

#include <cmath>
#include <sstream>

namespace ecodrive::mpo {
namespace {

// Per-row log mean exp(Q/eta) and E_q[Q]/eta.
void row_statistics(const Eigen::MatrixXd& q, double eta, double& lme_mean, double& kl_mean) {
  const double m = static_cast<double>(q.cols());
  double lme_sum = 0.0;
  double kl_sum = 0.0;
  for (Eigen::Index s = 0; s < q.rows(); ++s) {
    const double top = q.row(s).maxCoeff() / eta;
    double z = 0.0;
    double zq = 0.0;
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
      const double x = q(s, j) / eta;
      const double e = std::exp(x - top);
      z += e;
      zq += e * x;
    }
    const double lme = top + std::log(z / m);
    lme_sum += lme;
    kl_sum += zq / z - lme;
  }
  lme_mean = lme_sum / static_cast<double>(q.rows());
  kl_mean = kl_sum / static_cast<double>(q.rows());
}

std::string describe(double lo, double hi, double eta, double g) {
  std::ostringstream msg;
  msg << "temperature dual failed: bracket [" << lo << ", " << hi << "], eta " << eta << ", g " << g;
  return msg.str();
}

}  // namespace

double temperature_dual(const Eigen::MatrixXd& q, double eta, double eps) {
  double lme = 0.0;
  double kl = 0.0;
  row_statistics(q, eta, lme, kl);
  return eta * eps + eta * lme;
}

double temperature_dual_slope(const Eigen::MatrixXd& q, double eta, double eps) {
  double lme = 0.0;
  double kl = 0.0;
  row_statistics(q, eta, lme, kl);
  return eps - kl;
}

Eigen::MatrixXd sample_weights(const Eigen::MatrixXd& q, double eta) {
  Eigen::MatrixXd w(q.rows(), q.cols());
  for (Eigen::Index s = 0; s < q.rows(); ++s) {
    const double top = q.row(s).maxCoeff();
    for (Eigen::Index j = 0; j < q.cols(); ++j) w(s, j) = std::exp((q(s, j) - top) / eta);
    w.row(s) /= w.row(s).sum();
  }
  return w;
}

double mean_kl_to_uniform(const Eigen::MatrixXd& w) {
  const double m = static_cast<double>(w.cols());
  double total = 0.0;
  for (Eigen::Index s = 0; s < w.rows(); ++s) {
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      if (w(s, j) > 0) total += w(s, j) * std::log(w(s, j) * m);
    }
  }
  return total / static_cast<double>(w.rows());
}

EStepResult e_step(const Eigen::MatrixXd& q, double eps, const TemperatureBracket& br) {
  if (q.rows() == 0 || q.cols() < 2) throw std::invalid_argument("e_step: need at least one state and two samples");
  if (!(eps > 0)) throw std::invalid_argument("e_step: KL bound must be positive");
  if (!q.allFinite()) throw DualSolveError(describe(br.lo, br.hi, std::nan(""), std::nan("")));

  auto g = [&](double log_eta) {
    const double eta = std::exp(log_eta);
    const double v = temperature_dual(q, eta, eps);
    if (!std::isfinite(v)) throw DualSolveError(describe(br.lo, br.hi, eta, v));
    return v;
  };

  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = std::log(br.lo);
  double b = std::log(br.hi);
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double gc = g(c);
  double gd = g(d);
  while (b - a > br.tolerance) {
    if (gc <= gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - invphi * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + invphi * (b - a);
      gd = g(d);
    }
  }

  // The slope is monotone in eta, so a sign change pins the minimizer to
  // machine precision.
  auto slope = [&](double log_eta) { return temperature_dual_slope(q, std::exp(log_eta), eps); };
  double lo = std::max(std::log(br.lo), a - br.tolerance);
  double hi = std::min(std::log(br.hi), b + br.tolerance);
  double log_eta;
  if (slope(lo) >= 0) {
    log_eta = lo;
  } else if (slope(hi) <= 0) {
    log_eta = hi;
  } else {
    for (int it = 0; it < 200 && hi - lo > 0; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (slope(mid) < 0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    log_eta = 0.5 * (lo + hi);
  }

  EStepResult out;
  out.eta = std::exp(log_eta);
  out.weights = sample_weights(q, out.eta);
  out.kl = mean_kl_to_uniform(out.weights);
  if (!out.weights.allFinite()) throw DualSolveError(describe(br.lo, br.hi, out.eta, std::nan("")));
  return out;
}

}  // namespace ecodrive::mpo
