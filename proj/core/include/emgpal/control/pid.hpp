#pragma once

namespace emgpal::control {

/// Gains for the vacuum pressure loop. The defaults come from an offline grid
/// search against the default plant (see `emgpal tune`) and are frozen here.
struct PidGains {
  double kp = 2.5;
  double ki = 20.0;
  double kd = 0.03;
  double u_min = 0.0;
  double u_max = 90.0;
  double integrator_limit = 60.0;

  void validate() const;
};

struct PidState {
  double integrator = 0.0;
  double prev_measurement = 0.0;
  bool initialized = false;
};

struct PidStep {
  double u = 0.0;
  PidState state;
};

/// One controller update. Derivative acts on the measurement (no kick on
/// setpoint steps) and is zero on the first call. The integrator is clamped to
/// +/- integrator_limit and is frozen whenever the output saturates with the
/// error pushing further into the limit.
///
/// Throws ArgumentError for dt_s <= 0.
PidStep pid_step(const PidGains& gains, const PidState& state, double p_d_kpa, double p_h_kpa,
                 double dt_s);

class PidController {
 public:
  explicit PidController(PidGains gains) : gains_((gains.validate(), gains)) {}

  double update(double p_d_kpa, double p_h_kpa, double dt_s) {
    auto r = pid_step(gains_, state_, p_d_kpa, p_h_kpa, dt_s);
    state_ = r.state;
    return r.u;
  }

  void reset() { state_ = {}; }
  const PidState& state() const { return state_; }
  const PidGains& gains() const { return gains_; }

 private:
  PidGains gains_;
  PidState state_;
};

}  // namespace emgpal::control
