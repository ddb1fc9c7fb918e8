#include "ecodrive/mpo/retrace.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ecodrive::mpo {

double truncated_trace(double log_ratio, double lambda) { return lambda * std::exp(std::min(0.0, log_ratio)); }

std::vector<double> retrace_targets(const RetraceInputs& in, double gamma) {
  const std::size_t n = in.q_taken.size();
  if (n == 0) throw std::invalid_argument("retrace_targets: empty segment");
  if (in.v_next.size() != n || in.rewards.size() != n || in.done.size() != n || in.traces.size() != n) {
    throw std::invalid_argument("retrace_targets: inconsistent segment arrays");
  }
  std::vector<double> target(n);
  double carry = 0.0;  // Q_ret(t+1) - Q'(t+1)
  for (std::size_t k = n; k-- > 0;) {
    const double bootstrap = in.done[k] ? 0.0 : gamma * in.v_next[k];
    const double delta = in.rewards[k] + bootstrap - in.q_taken[k];
    const double next = (k + 1 < n && !in.done[k]) ? gamma * in.traces[k + 1] * carry : 0.0;
    carry = delta + next;
    target[k] = in.q_taken[k] + carry;
  }
  return target;
}

}  // namespace ecodrive::mpo
