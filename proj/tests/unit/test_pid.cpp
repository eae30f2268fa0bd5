#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "emgpal/control/loop.hpp"
#include "emgpal/control/pid.hpp"
#include "emgpal/errors.hpp"
#include "emgpal/plant/plant.hpp"

using namespace emgpal;
using namespace emgpal::control;

TEST(Pid, EquilibriumStaysAtZero) {
  PidController c{PidGains{}};
  for (int i = 0; i < 100; ++i) EXPECT_EQ(c.update(12.0, 12.0, 0.01), 0.0);
}

TEST(Pid, PureProportional) {
  PidGains g;
  g.kp = 1;
  g.ki = 0;
  g.kd = 0;
  EXPECT_EQ(pid_step(g, {}, 10.0, 0.0, 0.01).u, 10.0);
}

TEST(Pid, DerivativeOnMeasurement) {
  PidGains g;
  g.kp = 0;
  g.ki = 0;
  g.kd = 0.1;
  g.u_min = -100;
  auto r = pid_step(g, {}, 10.0, 3.0, 0.01);
  EXPECT_EQ(r.u, 0.0);  // no derivative on the first call
  r = pid_step(g, r.state, 50.0, 3.0, 0.01);
  EXPECT_EQ(r.u, 0.0);  // setpoint step, no kick
  r = pid_step(g, r.state, 50.0, 4.0, 0.01);
  EXPECT_NEAR(r.u, -10.0, 1e-12);
}

TEST(Pid, IntegratorAccumulatesAndClamps) {
  PidGains g;
  g.kp = 0;
  g.ki = 10;
  g.u_max = 1000;
  g.integrator_limit = 5;
  PidState s;
  auto r = pid_step(g, s, 1.0, 0.0, 0.1);
  EXPECT_DOUBLE_EQ(r.state.integrator, 1.0);
  for (int i = 0; i < 100; ++i) r = pid_step(g, r.state, 1.0, 0.0, 0.1);
  EXPECT_EQ(r.state.integrator, 5.0);
  EXPECT_EQ(r.u, 5.0);
}

TEST(Pid, OutputSaturates) {
  PidGains g;
  g.kp = 100;
  EXPECT_EQ(pid_step(g, {}, 50.0, 0.0, 0.01).u, g.u_max);
  EXPECT_EQ(pid_step(g, {}, 0.0, 50.0, 0.01).u, g.u_min);
}

TEST(Pid, AntiWindupFreezesIntegratorInSaturation) {
  PidGains g;
  g.kp = 10;
  g.ki = 40;
  g.integrator_limit = 60;
  PidState s;
  // Unreachable setpoint: output pinned at u_max the whole time.
  for (int i = 0; i < 500; ++i) s = pid_step(g, s, 200.0, 0.0, 0.01).state;
  EXPECT_LT(s.integrator, 60.0);
  EXPECT_LE(s.integrator, g.u_max);
  // When the error reverses, the output leaves saturation right away.
  const auto r = pid_step(g, s, 0.0, 20.0, 0.01);
  EXPECT_LT(r.u, g.u_max);
}

TEST(Pid, BoundsHoldForRandomInputs) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> p(-20.0, 120.0);
  const PidGains g{3.0, 50.0, 0.02, 0.0, 90.0, 60.0};
  PidState s;
  for (int i = 0; i < 10000; ++i) {
    const auto r = pid_step(g, s, p(rng), p(rng), 0.01);
    EXPECT_GE(r.u, g.u_min);
    EXPECT_LE(r.u, g.u_max);
    EXPECT_LE(std::abs(r.state.integrator), g.integrator_limit);
    s = r.state;
  }
}

TEST(Pid, RejectsBadInput) {
  EXPECT_THROW(pid_step(PidGains{}, {}, 1, 0, 0.0), ArgumentError);
  EXPECT_THROW(pid_step(PidGains{}, {}, 1, 0, -0.01), ArgumentError);
  PidGains g;
  g.u_min = 100;
  EXPECT_THROW(g.validate(), ConfigError);
}

namespace {

std::vector<render::PressureCommand> step_profile(double level, double seconds) {
  return {{0, level}, {static_cast<std::int64_t>(seconds * 1e6), level}};
}

}  // namespace

TEST(Loop, ZeroCommandKeepsPlantAtRest) {
  plant::PlantConfig pc;
  pc.noise_sigma_kpa = 0;
  plant::VacuumPlant plant(pc);
  for (const auto& s : run_loop(PidGains{}, plant, step_profile(0.0, 2.0), 100)) {
    EXPECT_EQ(s.p_h_kpa, 0.0);
    EXPECT_EQ(s.u, 0.0);
  }
}

TEST(Loop, StepSettlesWithinHalfSecondWithSmallOvershoot) {
  plant::VacuumPlant plant{plant::PlantConfig{}};
  const auto trace = run_loop(PidGains{}, plant, step_profile(20.0, 3.0), 100);
  double peak = 0;
  std::int64_t last_outside = 0;
  for (const auto& s : trace) {
    peak = std::max(peak, s.p_h_kpa);
    if (std::abs(s.p_h_kpa - 20.0) > 0.02 * 20.0) last_outside = s.t_us;
  }
  EXPECT_LE(peak, 22.0);                   // overshoot <= 10 %
  EXPECT_LE(last_outside + 10000, 500000);  // inside the band from 0.5 s on
}

TEST(Loop, StepResponseMeasurement) {
  const auto r = step_response(PidGains{}, plant::PlantConfig{}, 100);
  EXPECT_LE(r.overshoot, 0.10);
  EXPECT_LE(r.settling_s, 0.5);
  EXPECT_GT(r.settling_s, 0.0);
  EXPECT_TRUE(r.meets(0.10, 0.5));
  EXPECT_FALSE(r.meets(0.0, 0.5));
  PidGains slow;
  slow.kp = 0.2;
  slow.ki = 1.0;
  slow.kd = 0.0;
  EXPECT_GT(step_response(slow, plant::PlantConfig{}, 100).settling_s, 0.5);
  EXPECT_THROW(step_response(PidGains{}, plant::PlantConfig{}, 100, 0.0), ArgumentError);
}

TEST(Loop, ZeroSteadyStateError) {
  for (double c : {5.0, 20.0, 37.5}) {
    plant::PlantConfig pc;
    pc.noise_sigma_kpa = 0;
    plant::VacuumPlant plant(pc);
    for (const auto& s : run_loop(PidGains{}, plant, step_profile(c, 4.0), 100)) {
      if (s.t_us >= 2000000) {
        EXPECT_LE(std::abs(s.p_h_kpa - c), 0.1);
      }
    }
  }
}

TEST(Loop, ZeroOrderHoldAndTiming) {
  plant::VacuumPlant plant{plant::PlantConfig{}};
  const std::vector<render::PressureCommand> cmds = {{0, 1.0}, {25000, 2.0}, {50000, 3.0}};
  const auto trace = run_loop(PidGains{}, plant, cmds, 100);
  ASSERT_EQ(trace.size(), 6u);
  const double want[] = {1, 1, 1, 2, 2, 3};
  for (std::size_t i = 0; i < trace.size(); ++i) {
    EXPECT_EQ(trace[i].t_us, static_cast<std::int64_t>(i) * 10000);
    EXPECT_EQ(trace[i].p_d_kpa, want[i]);
  }
}

TEST(Loop, RejectsBadInput) {
  plant::VacuumPlant plant{plant::PlantConfig{}};
  EXPECT_THROW(run_loop(PidGains{}, plant, {}, 100), ArgumentError);
  const std::vector<render::PressureCommand> unsorted = {{10, 1.0}, {0, 1.0}};
  EXPECT_THROW(run_loop(PidGains{}, plant, unsorted, 100), ArgumentError);
  EXPECT_THROW(run_loop(PidGains{}, plant, step_profile(1, 1), 0), ArgumentError);
}

TEST(Loop, Deterministic) {
  plant::VacuumPlant a{plant::PlantConfig{}};
  plant::VacuumPlant b{plant::PlantConfig{}};
  const auto ta = run_loop(PidGains{}, a, step_profile(20, 1), 100);
  const auto tb = run_loop(PidGains{}, b, step_profile(20, 1), 100);
  ASSERT_EQ(ta.size(), tb.size());
  for (std::size_t i = 0; i < ta.size(); ++i) {
    EXPECT_EQ(ta[i].p_h_kpa, tb[i].p_h_kpa);
    EXPECT_EQ(ta[i].u, tb[i].u);
  }
}
