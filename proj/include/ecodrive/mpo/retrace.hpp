#pragma once

#include <vector>

namespace ecodrive::mpo {

/// Inputs of the Retrace recursion for one segment of n steps.
struct RetraceInputs {
  std::vector<double> q_taken;   // Q'(s_t, a_t)
  std::vector<double> v_next;    // E_pi Q'(s_{t+1}, .), ignored where done
  std::vector<double> rewards;
  std::vector<char> done;
  std::vector<double> traces;    // c_t = lambda * min(1, pi/b); traces[0] unused
};

/// Q_ret(t) = Q'(t) + sum_{j>=t} gamma^{j-t} (prod_{i=t+1..j} c_i) delta_j,
/// delta_j = r_j + gamma V'(s_{j+1}) - Q'(s_j, a_j), evaluated backwards.
std::vector<double> retrace_targets(const RetraceInputs& in, double gamma);

/// lambda * min(1, exp(log_ratio)).
double truncated_trace(double log_ratio, double lambda);

}  // namespace ecodrive::mpo
