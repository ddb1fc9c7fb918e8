#pragma once

#include "ecodrive/vehicle_plant.hpp"

namespace ecodrive {

struct RewardWeights {
  double accel = 1.0;    // W_A
  double torque = 0.1;   // W_T
  double fuel = 0.5;     // W_fr
  double gear = 0.05;    // W_g
  double reserve = 0.1;  // W_pr
};

struct RewardNorms {
  double max_accel_error = 2.0;  // m/s^2
  double max_torque = 1.0;       // N*m, wheel level
  double max_fuel_rate = 1.0;    // g/s

  void validate() const;
};

/// Signals of one transition t -> t+1.
struct RewardInputs {
  double desired_accel = 0.0;     // A_des at t
  double next_accel = 0.0;        // A_e at t+1
  double torque = 0.0;            // wheel torque at t
  double next_fuel_rate = 0.0;    // g/s over the step
  int prev_gear = 1;
  int next_gear = 1;
  double next_reserve = 0.0;      // P_r at t+1, W
  double next_max_reserve = 1.0;  // P_r,max at t+1, W
};

/// Per-term contributions; each is <= 0 and `total` is their sum.
struct RewardTerms {
  double accel = 0.0;
  double torque = 0.0;
  double fuel = 0.0;
  double gear = 0.0;
  double reserve = 0.0;
  double total = 0.0;
};

RewardTerms reward_terms(const RewardInputs& in, const RewardWeights& w, const RewardNorms& norms);

/// Multi-objective reward, always <= 0:
///   -W_A |A_des - A'|/dA_max - W_T |T|/T_max - W_fr mf'/mf_max
///   - W_g |n_g' - n_g| - W_pr (P_r,max' - P_r')/P_r,max'
double reward(const RewardInputs& in, const RewardWeights& w, const RewardNorms& norms);

/// T_max: peak engine torque reflected to the wheels in gear 1.
double max_wheel_torque(const VehiclePlant& plant);

/// Norms for a plant: T_max as above, mf_max the fuel-map maximum.
RewardNorms reward_norms(const VehiclePlant& plant, double max_accel_error);

}  // namespace ecodrive
