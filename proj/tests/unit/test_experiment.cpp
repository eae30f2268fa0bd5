#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "emgpal/errors.hpp"
#include "emgpal/harness/experiment.hpp"

using namespace emgpal;
using namespace emgpal::harness;

namespace {

std::string report_text(const EvalReport& r) {
  std::ostringstream out;
  write_report(out, r);
  return out.str();
}

std::string trace_text(const std::vector<TraceRow>& t) {
  std::ostringstream out;
  write_trace_csv(out, t);
  return out.str();
}

}  // namespace

TEST(Experiment, DefaultScenarioMeetsThresholds) {
  const ExperimentConfig cfg;
  const auto r = run_experiment(cfg);
  ASSERT_EQ(r.report.per_cycle.size(), 5u);
  EXPECT_LE(r.report.aggregate.rmse_mean, 1.5);
  EXPECT_GE(r.report.aggregate.r_mean, 0.96);
  for (const auto& c : r.report.per_cycle) {
    EXPECT_GT(c.pearson_r, 0.9);
    EXPECT_TRUE(c.significant);
  }
  EXPECT_TRUE(check_report(r.report, cfg).passed);
}

TEST(Experiment, SlowEnvelopeIdealPlantTracksClosely) {
  ExperimentConfig cfg;
  cfg.plant.noise_sigma_kpa = 0;
  cfg.plant.delay_s = 0;
  cfg.signal.envelope_window_s = 0.8;
  cfg.protocol.ramp_s = 4.0;
  cfg.gains.kp = 8;
  cfg.gains.ki = 160;
  cfg.gains.kd = 0;
  const auto r = run_experiment(cfg);
  ASSERT_EQ(r.report.per_cycle.size(), 5u);
  EXPECT_LE(r.report.aggregate.rmse_mean, 0.2);
  EXPECT_GE(r.report.aggregate.r_mean, 0.999);
}

TEST(Experiment, AggregatesRecomputableFromCycles) {
  const auto r = run_experiment(ExperimentConfig{});
  const auto& cyc = r.report.per_cycle;
  std::vector<double> e, rr;
  for (const auto& c : cyc) {
    e.push_back(c.rmse_kpa);
    rr.push_back(c.pearson_r);
  }
  auto mean = [](const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); };
  auto sd = [&](const std::vector<double>& v) {
    const double m = mean(v);
    double s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / (v.size() - 1));
  };
  EXPECT_NEAR(r.report.aggregate.rmse_mean, mean(e), 1e-12);
  EXPECT_NEAR(r.report.aggregate.rmse_std, sd(e), 1e-12);
  EXPECT_NEAR(r.report.aggregate.r_mean, mean(rr), 1e-12);
  EXPECT_NEAR(r.report.aggregate.r_std, sd(rr), 1e-12);

  // Per-cycle numbers recomputed from the trace rows.
  std::ostringstream dump;
  write_trace_csv(dump, r.trace);
  std::istringstream back(dump.str());
  const auto again = evaluate_trace(read_trace_csv(back), ExperimentConfig{}.segment_threshold);
  ASSERT_EQ(again.per_cycle.size(), cyc.size());
  for (std::size_t i = 0; i < cyc.size(); ++i) {
    EXPECT_NEAR(again.per_cycle[i].rmse_kpa, cyc[i].rmse_kpa, 1e-9);
    EXPECT_NEAR(again.per_cycle[i].pearson_r, cyc[i].pearson_r, 1e-9);
  }
}

TEST(Experiment, SingleCycleHasUndefinedSpread) {
  ExperimentConfig cfg;
  cfg.protocol.n_cycles = 1;
  const auto r = run_experiment(cfg);
  ASSERT_EQ(r.report.per_cycle.size(), 1u);
  EXPECT_TRUE(std::isnan(r.report.aggregate.rmse_std));
}

TEST(Experiment, ZeroActivationDegenerates) {
  ExperimentConfig cfg;
  cfg.protocol.peak_activation = 0;
  cfg.protocol.rest_activation = 0;
  const auto r = run_experiment(cfg);
  EXPECT_TRUE(r.report.per_cycle.empty());
  for (const auto& row : r.trace) {
    EXPECT_EQ(row.p_d_kpa, 0.0);
  }
  EXPECT_FALSE(check_report(r.report, cfg).passed);
}

TEST(Experiment, ByteIdenticalReruns) {
  const ExperimentConfig cfg;
  const auto a = run_experiment(cfg);
  const auto b = run_experiment(cfg);
  EXPECT_EQ(report_text(a.report), report_text(b.report));
  EXPECT_EQ(trace_text(a.trace), trace_text(b.trace));
  auto other = cfg;
  other.seed = 8;
  EXPECT_NE(trace_text(run_experiment(other).trace), trace_text(a.trace));
}

TEST(Experiment, TrackingDegradesWithSensorNoise) {
  const double sigmas[] = {0.0, 1.0, 3.0};
  double prev = -1.0;
  for (double sigma : sigmas) {
    double sum = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      ExperimentConfig cfg;
      cfg.seed = seed;
      cfg.protocol.n_cycles = 2;
      cfg.plant.noise_sigma_kpa = sigma;
      sum += run_experiment(cfg).report.aggregate.rmse_mean;
    }
    EXPECT_GT(sum / 10.0, prev) << "sigma " << sigma;
    prev = sum / 10.0;
  }
}

TEST(Experiment, TransportImpairmentIsReportedAndSurvivable) {
  ExperimentConfig cfg;
  cfg.use_transport = true;
  cfg.impairment.delay_ms = 40;
  cfg.impairment.jitter_ms = 15;
  cfg.impairment.drop_prob = 0.05;
  cfg.impairment.reorder = true;
  const auto r = run_experiment(cfg);
  ASSERT_TRUE(r.report.link.has_value());
  EXPECT_GT(r.report.link->frames_dropped, 0u);
  EXPECT_EQ(r.report.per_cycle.size(), 5u);
  EXPECT_NE(report_text(r.report).find("link.frames_dropped"), std::string::npos);
}

TEST(Experiment, StageErrorsNameTheStage) {
  ExperimentConfig cfg;
  cfg.input_csv = "/nonexistent/recording.csv";
  try {
    run_experiment(cfg);
    FAIL();
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "ingest");
  }
}

TEST(Experiment, DerivedSeedsDiffer) {
  EXPECT_NE(derive_seed(7, SeedStream::plant), derive_seed(7, SeedStream::transport));
  EXPECT_NE(derive_seed(7, SeedStream::plant), derive_seed(8, SeedStream::plant));
  EXPECT_EQ(derive_seed(7, SeedStream::protocol), derive_seed(7, SeedStream::protocol));
}

TEST(Tune, SingletonGridReturnsThatTriple) {
  ExperimentConfig cfg;
  cfg.protocol.n_cycles = 2;
  const auto r = tune_pid({{3.0}, {30.0}, {0.0}}, cfg);
  EXPECT_EQ(r.best.kp, 3.0);
  EXPECT_EQ(r.best.ki, 30.0);
  EXPECT_EQ(r.best.kd, 0.0);
  EXPECT_EQ(r.points.size(), 1u);
}

TEST(Tune, FrozenDefaultsAreTheGridMinimum) {
  const ExperimentConfig cfg;
  const auto r = tune_pid({{2.0, 2.5, 3.0}, {18.0, 20.0, 22.0}, {0.02, 0.03, 0.04}}, cfg);
  const control::PidGains frozen;
  EXPECT_TRUE(r.feasible);
  EXPECT_EQ(r.best.kp, frozen.kp);
  EXPECT_EQ(r.best.ki, frozen.ki);
  EXPECT_EQ(r.best.kd, frozen.kd);
  EXPECT_LE(r.best_step.overshoot, 0.10);
  EXPECT_LE(r.best_step.settling_s, 0.5);
  for (const auto& p : r.points) {
    if (p.feasible) {
      EXPECT_GE(p.objective, r.best_objective);
    }
  }
  // objective of the frozen point recomputed independently
  EXPECT_DOUBLE_EQ(r.best_objective, run_experiment(cfg).report.aggregate.rmse_mean);
}

TEST(Tune, AllZeroGainsGiveZerosAndPoorObjective) {
  ExperimentConfig cfg;
  cfg.protocol.n_cycles = 2;
  const auto r = tune_pid({{0.0}, {0.0}, {0.0}}, cfg);
  EXPECT_EQ(r.best.kp, 0.0);
  EXPECT_EQ(r.best.ki, 0.0);
  EXPECT_GT(r.best_objective, 5.0);  // plant never moves off zero
  EXPECT_FALSE(r.feasible);
}

TEST(Tune, StepConstraintExcludesAggressiveIntegralGain) {
  ExperimentConfig cfg;
  cfg.protocol.n_cycles = 2;
  TuneGrid grid{{2.0}, {15.0, 40.0}, {0.01}};
  const auto constrained = tune_pid(grid, cfg);
  EXPECT_TRUE(constrained.feasible);
  EXPECT_EQ(constrained.best.ki, 15.0);
  grid.constrain_step = false;
  const auto free = tune_pid(grid, cfg);
  EXPECT_EQ(free.best.ki, 40.0);  // better tracking, but overshoots a step by far
  EXPECT_GT(free.best_step.overshoot, 0.10);
}

TEST(Tune, EmptyGridIsArgumentError) {
  EXPECT_THROW(tune_pid({{}, {1.0}, {0.0}}, ExperimentConfig{}), ArgumentError);
}

TEST(Trace, CsvRoundTrip) {
  const std::vector<TraceRow> rows = {{0, 0.1, 4.0, 3.9, 5.5, 0.17}, {10000, 0.123456789, 4.9, 4.5, 6.0, 0.2}};
  std::stringstream io;
  write_trace_csv(io, rows);
  const auto back = read_trace_csv(io);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].t_us, 10000);
  EXPECT_EQ(back[1].activation, 0.123456789);
  std::istringstream bad("t_us,nope\n1,2\n");
  EXPECT_THROW(read_trace_csv(bad), ArgumentError);
}
