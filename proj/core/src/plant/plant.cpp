#include "emgpal/plant/plant.hpp"

#include <algorithm>
#include <cmath>

#include "emgpal/errors.hpp"

namespace emgpal::plant {

void PlantConfig::validate() const {
  if (!(tau_s > 0.0)) throw ConfigError("plant tau_s must be positive");
  if (!(delay_s >= 0.0) || !std::isfinite(delay_s)) {
    throw ConfigError("plant delay_s must be nonnegative");
  }
  if (!(slew_kpa_per_s > 0.0)) throw ConfigError("plant slew_kpa_per_s must be positive");
  if (!(noise_sigma_kpa >= 0.0)) throw ConfigError("plant noise_sigma_kpa must be nonnegative");
  if (!(p_floor_kpa < p_ceil_kpa)) throw ConfigError("plant p_floor_kpa must be below p_ceil_kpa");
}

VacuumPlant::VacuumPlant(PlantConfig cfg)
    : cfg_((cfg.validate(), cfg)),
      delay_us_(std::llround(cfg_.delay_s * 1e6)),
      rng_(cfg_.seed) {
  state_.p_true_kpa = std::clamp(0.0, cfg_.p_floor_kpa, cfg_.p_ceil_kpa);
}

double VacuumPlant::noisy(double p) {
  if (cfg_.noise_sigma_kpa == 0.0) return p;
  return p + cfg_.noise_sigma_kpa * noise_(rng_);
}

PressureReading VacuumPlant::read() { return {state_.t_us, noisy(state_.p_true_kpa)}; }

PressureReading VacuumPlant::step(double u, double dt_s) {
  if (!(dt_s > 0.0)) throw ArgumentError("plant step: dt must be positive");

  state_.delay_line.push_back({state_.t_us + delay_us_, u});
  while (!state_.delay_line.empty() && state_.delay_line.front().release_us <= state_.t_us) {
    state_.applied_u = state_.delay_line.front().u;
    state_.delay_line.pop_front();
  }

  const double wanted = state_.applied_u - state_.drive_kpa;
  if (std::isinf(cfg_.slew_kpa_per_s)) {
    state_.drive_kpa = state_.applied_u;
  } else {
    const double max_delta = cfg_.slew_kpa_per_s * dt_s;
    state_.drive_kpa += std::clamp(wanted, -max_delta, max_delta);
  }

  // Exact zero-order-hold discretization of dp/dt = (drive - p) / tau.
  const double alpha = -std::expm1(-dt_s / cfg_.tau_s);
  const double p = state_.p_true_kpa + alpha * (state_.drive_kpa - state_.p_true_kpa);
  state_.p_true_kpa = std::clamp(p, cfg_.p_floor_kpa, cfg_.p_ceil_kpa);
  state_.t_us += std::llround(dt_s * 1e6);

  return {state_.t_us, noisy(state_.p_true_kpa)};
}

}  // namespace emgpal::plant
