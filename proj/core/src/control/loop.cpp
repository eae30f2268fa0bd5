#include "emgpal/control/loop.hpp"

#include <algorithm>
#include <cmath>

#include "emgpal/errors.hpp"

namespace emgpal::control {

std::vector<LoopSample> run_loop(const PidGains& gains, plant::VacuumPlant& plant,
                                 std::span<const render::PressureCommand> commands,
                                 double rate_hz) {
  if (commands.empty()) throw ArgumentError("run_loop: no commands");
  if (!(rate_hz > 0.0)) throw ArgumentError("run_loop: rate must be positive");
  const bool sorted = std::is_sorted(commands.begin(), commands.end(),
                                     [](const auto& a, const auto& b) { return a.t_us < b.t_us; });
  if (!sorted) throw ArgumentError("run_loop: commands must be sorted by time");

  const double dt_s = 1.0 / rate_hz;
  const std::int64_t t0 = commands.front().t_us;
  const std::int64_t span_us = commands.back().t_us - t0;
  const auto ticks =
      static_cast<std::size_t>(std::floor(static_cast<double>(span_us) * rate_hz / 1e6 + 1e-9)) + 1;

  PidController pid(gains);
  std::vector<LoopSample> trace;
  trace.reserve(ticks);

  std::size_t cmd = 0;
  double p_h = plant.read().p_h_kpa;
  for (std::size_t k = 0; k < ticks; ++k) {
    const std::int64_t t = t0 + std::llround(static_cast<double>(k) * 1e6 / rate_hz);
    while (cmd + 1 < commands.size() && commands[cmd + 1].t_us <= t) ++cmd;
    const double p_d = commands[cmd].p_d_kpa;
    const double u = pid.update(p_d, p_h, dt_s);
    trace.push_back({t, p_d, p_h, u});
    p_h = plant.step(u, dt_s).p_h_kpa;
  }
  return trace;
}

StepResponse step_response(const PidGains& gains, const plant::PlantConfig& plant_cfg,
                           double rate_hz, double level_kpa, double duration_s, double band) {
  if (!(level_kpa > 0.0) || !(duration_s > 0.0) || !(band > 0.0)) {
    throw ArgumentError("step_response: level, duration and band must be positive");
  }
  plant::VacuumPlant plant(plant_cfg);
  const std::vector<render::PressureCommand> cmds = {
      {0, level_kpa}, {static_cast<std::int64_t>(std::llround(duration_s * 1e6)), level_kpa}};
  const auto trace = run_loop(gains, plant, cmds, rate_hz);

  const std::int64_t period_us = std::llround(1e6 / rate_hz);
  double peak = 0.0;
  std::int64_t settled_at = 0;
  for (const auto& s : trace) {
    peak = std::max(peak, s.p_h_kpa);
    if (std::abs(s.p_h_kpa - level_kpa) > band * level_kpa) settled_at = s.t_us + period_us;
  }
  return {std::max(0.0, (peak - level_kpa) / level_kpa), static_cast<double>(settled_at) * 1e-6};
}

}  // namespace emgpal::control
