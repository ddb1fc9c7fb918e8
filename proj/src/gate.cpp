#include "ecodrive/gate.hpp"

#include <algorithm>
#include <stdexcept>

namespace ecodrive {

GateState gate_update(GateState gate, double critic_loss) {
  if (!(critic_loss >= 0)) throw std::invalid_argument("gate_update: critic loss must be >= 0");
  if (gate.has_ema) {
    gate.ema = gate.decay * gate.ema + (1.0 - gate.decay) * critic_loss;
  } else {
    gate.ema = critic_loss;
    gate.has_ema = true;
  }
  if (gate.ema < gate.threshold) gate.active = true;
  return gate;
}

HybridAction mix_actions(const SourceAction& source, const HybridAction& residual, const GateState& gate) {
  if (!gate.active) return {source.torque, source.gear_cmd};
  return {source.torque + residual.torque, std::clamp(source.gear_cmd + residual.gear_cmd, -1, 1)};
}

}  // namespace ecodrive
