#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "emgpal/control/pid.hpp"
#include "emgpal/plant/plant.hpp"
#include "emgpal/render/render.hpp"

namespace emgpal::control {

struct LoopSample {
  std::int64_t t_us = 0;
  double p_d_kpa = 0.0;
  double p_h_kpa = 0.0;
  double u = 0.0;
};

/// Fixed-step closed loop. Commands are held (zero-order hold) between their
/// timestamps; the loop runs from the first command time through the last.
/// Each row pairs the command in force at t with the reading taken at t and
/// the drive computed from them.
///
/// Throws ArgumentError for an empty or unsorted command list or rate_hz <= 0.
std::vector<LoopSample> run_loop(const PidGains& gains, plant::VacuumPlant& plant,
                                 std::span<const render::PressureCommand> commands,
                                 double rate_hz);

/// Closed-loop response to a reference step from rest.
struct StepResponse {
  double overshoot = 0.0;   // (peak - level) / level, 0 if never above level
  double settling_s = 0.0;  // from the step until the reading stays within the band
  bool meets(double max_overshoot, double max_settling_s) const {
    return overshoot <= max_overshoot && settling_s <= max_settling_s;
  }
};

/// Runs a step from 0 to `level_kpa` for `duration_s` and measures it on the
/// plant readings. `band` is the settling tolerance as a fraction of the level.
StepResponse step_response(const PidGains& gains, const plant::PlantConfig& plant_cfg,
                           double rate_hz, double level_kpa = 20.0, double duration_s = 3.0,
                           double band = 0.02);

}  // namespace emgpal::control
