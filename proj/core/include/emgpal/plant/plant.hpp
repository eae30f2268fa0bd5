#pragma once

#include <cstdint>
#include <deque>
#include <limits>
#include <random>

namespace emgpal::plant {

/// First-order-plus-dead-time stand-in for the pump and jamming chamber.
struct PlantConfig {
  double tau_s = 0.050;
  double delay_s = 0.010;
  /// Actuator rate limit; +infinity disables it.
  double slew_kpa_per_s = 400.0;
  double noise_sigma_kpa = 0.05;
  double p_floor_kpa = 0.0;
  double p_ceil_kpa = 90.0;
  std::uint64_t seed = 1;

  void validate() const;
};

struct PressureReading {
  std::int64_t t_us = 0;
  double p_h_kpa = 0.0;
};

struct PendingCommand {
  std::int64_t release_us = 0;
  double u = 0.0;
};

struct PlantState {
  std::int64_t t_us = 0;
  double p_true_kpa = 0.0;
  double drive_kpa = 0.0;   // slew-limited actuator output
  double applied_u = 0.0;   // most recent command out of the delay line
  std::deque<PendingCommand> delay_line;
};

/// Single-owner simulation state. Identical config (seed included) and inputs
/// give bit-identical readings.
class VacuumPlant {
 public:
  explicit VacuumPlant(PlantConfig cfg);

  /// Advances by dt_s under command u and returns the noisy reading at the
  /// new time. Throws ArgumentError for dt_s <= 0.
  PressureReading step(double u, double dt_s);

  /// Noisy reading at the current time without advancing.
  PressureReading read();

  const PlantState& state() const { return state_; }
  const PlantConfig& config() const { return cfg_; }

 private:
  double noisy(double p);

  PlantConfig cfg_;
  PlantState state_;
  std::int64_t delay_us_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> noise_{0.0, 1.0};
};

}  // namespace emgpal::plant
