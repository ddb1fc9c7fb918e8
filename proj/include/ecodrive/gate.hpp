#pragma once

#include "ecodrive/hybrid_policy.hpp"
#include "ecodrive/source_policy.hpp"

namespace ecodrive {

/// Latching switch on an exponential moving average of the critic loss.
struct GateState {
  double threshold = 0.1;  // beta
  double decay = 0.99;
  double ema = 0.0;
  bool has_ema = false;  // the first loss seeds the average
  bool active = false;

  bool operator==(const GateState&) const = default;
};

/// ema <- decay * ema + (1 - decay) * loss; activates (for good) once ema < threshold.
GateState gate_update(GateState gate, double critic_loss);

/// Source action while the gate is closed; otherwise the torque sum and the
/// gear sum clamped to one step.
HybridAction mix_actions(const SourceAction& source, const HybridAction& residual, const GateState& gate);

}  // namespace ecodrive
