#include "emgpal/control/pid.hpp"

#include <algorithm>
#include <cmath>

#include "emgpal/errors.hpp"

namespace emgpal::control {

void PidGains::validate() const {
  if (!(kp >= 0.0) || !(ki >= 0.0) || !(kd >= 0.0)) {
    throw ConfigError("PID gains must be nonnegative");
  }
  if (!(u_min < u_max)) throw ConfigError("PID u_min must be below u_max");
  if (!(integrator_limit >= 0.0) || integrator_limit > u_max - u_min) {
    throw ConfigError("PID integrator_limit must lie in [0, u_max - u_min]");
  }
}

PidStep pid_step(const PidGains& g, const PidState& s, double p_d_kpa, double p_h_kpa,
                 double dt_s) {
  if (!(dt_s > 0.0)) throw ArgumentError("pid_step: dt must be positive");

  const double e = p_d_kpa - p_h_kpa;
  const double d = s.initialized ? -g.kd * (p_h_kpa - s.prev_measurement) / dt_s : 0.0;

  double integrator =
      std::clamp(s.integrator + g.ki * e * dt_s, -g.integrator_limit, g.integrator_limit);
  double raw = g.kp * e + integrator + d;
  const bool pushing_high = raw > g.u_max && e > 0.0;
  const bool pushing_low = raw < g.u_min && e < 0.0;
  if (pushing_high || pushing_low) {
    integrator = std::clamp(s.integrator, -g.integrator_limit, g.integrator_limit);
    raw = g.kp * e + integrator + d;
  }

  PidStep out;
  out.u = std::clamp(raw, g.u_min, g.u_max);
  out.state.integrator = integrator;
  out.state.prev_measurement = p_h_kpa;
  out.state.initialized = true;
  return out;
}

}  // namespace emgpal::control
