#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "emgpal/control/loop.hpp"
#include "emgpal/control/pid.hpp"
#include "emgpal/dsp/signal_config.hpp"
#include "emgpal/frame.hpp"
#include "emgpal/harness/generator.hpp"
#include "emgpal/plant/plant.hpp"
#include "emgpal/render/render.hpp"
#include "emgpal/transport/impairment.hpp"

namespace emgpal::harness {

/// Pass/fail thresholds applied by `--check`.
struct AcceptanceThresholds {
  double rmse_max_kpa = 1.5;
  double r_mean_min = 0.96;
  double cycle_r_min = 0.9;
  double p_value_max = 1e-4;
};

/// Everything a closed-loop run needs. Sub-seeds for the generator, plant
/// noise and link impairment are derived from `seed`.
struct ExperimentConfig {
  dsp::SignalConfig signal;
  render::RenderConfig render;
  control::PidGains gains;
  double control_rate_hz = 100.0;
  plant::PlantConfig plant;
  ProtocolSpec protocol;
  bool use_transport = false;
  transport::ImpairmentConfig impairment;
  std::size_t frame_samples = 20;
  double indentation_mm = 2.0;
  double segment_threshold = 0.1;
  /// Take mvc_value from the synthetic protocol instead of `signal.mvc_value`.
  bool mvc_from_protocol = true;
  /// Empty: synthesize EMG from `protocol`. Otherwise a CSV recording.
  std::string input_csv;
  int input_channel = 0;
  AcceptanceThresholds check;
  std::uint64_t seed = 7;

  void validate() const;
};

enum class SeedStream : std::uint64_t { protocol = 1, plant = 2, transport = 3 };

/// SplitMix64-derived seed for one random stream of a run.
std::uint64_t derive_seed(std::uint64_t master, SeedStream stream);

struct CycleStats {
  std::size_t index = 0;
  std::int64_t t_begin_us = 0;
  std::int64_t t_end_us = 0;
  std::size_t samples = 0;
  double rmse_kpa = 0.0;
  double pearson_r = 0.0;  // NaN when undefined (constant trace)
  double p_value = 1.0;
  bool significant = false;
};

struct Aggregate {
  double rmse_mean = 0.0;
  double rmse_std = 0.0;  // sample (n - 1); NaN for fewer than two cycles
  double r_mean = 0.0;
  double r_std = 0.0;
};

struct EvalReport {
  std::vector<CycleStats> per_cycle;
  Aggregate aggregate;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string git_describe;
  std::vector<std::pair<std::string, std::string>> effective_config;
  std::optional<transport::ReceiveReport> link;
  std::size_t trace_rows = 0;
};

struct TraceRow {
  std::int64_t t_us = 0;
  double activation = 0.0;
  double p_d_kpa = 0.0;
  double p_h_kpa = 0.0;
  double u = 0.0;
  double force_n = 0.0;
};

struct ExperimentResult {
  EvalReport report;
  std::vector<TraceRow> trace;
};

/// Mean and sample standard deviation over the cycle rows.
Aggregate aggregate_cycles(const std::vector<CycleStats>& cycles);

/// Per-cycle statistics of (p_d, p_h) on cycles segmented from p_d.
EvalReport evaluate_trace(const std::vector<TraceRow>& trace, double segment_threshold);

/// Runs source -> (link) -> envelope -> pressure map -> PID + plant -> metrics.
/// Errors are rethrown as StageError naming the failing stage.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Pressure command stream the loop would track, i.e. everything upstream of
/// the controller. Also returns the activation samples and link report.
struct CommandStream {
  std::vector<dsp::ActivationSample> activation;
  std::vector<render::PressureCommand> commands;
  std::optional<transport::ReceiveReport> link;
};
CommandStream build_commands(const ExperimentConfig& cfg);

/// Closes the loop over an existing command stream.
ExperimentResult close_loop(const ExperimentConfig& cfg, const CommandStream& stream);

struct AcceptanceVerdict {
  bool passed = true;
  std::vector<std::string> failures;
};
AcceptanceVerdict check_report(const EvalReport& report, const ExperimentConfig& cfg);

void write_report(std::ostream& out, const EvalReport& report);
void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace);
std::vector<TraceRow> read_trace_csv(std::istream& in);

/// Grid search over (kp, ki, kd) minimizing aggregate rmse_mean among the
/// triples whose 0 -> 20 kPa step response on the configured plant stays
/// within the overshoot and settling limits. If no triple qualifies the
/// unconstrained minimum is returned with `feasible` false. Ties go to the
/// lexicographically smallest triple. Throws ArgumentError on an empty grid.
struct TuneGrid {
  std::vector<double> kp;
  std::vector<double> ki;
  std::vector<double> kd;
  bool constrain_step = true;
  double step_level_kpa = 20.0;
  double max_overshoot = 0.10;
  double max_settling_s = 0.5;
};
struct TunePoint {
  control::PidGains gains;
  double objective = 0.0;
  control::StepResponse step;
  bool feasible = true;
};
struct TuneResult {
  control::PidGains best;
  double best_objective = 0.0;
  control::StepResponse best_step;
  bool feasible = true;
  std::vector<TunePoint> points;
};
TuneResult tune_pid(const TuneGrid& grid, const ExperimentConfig& base);

/// Objective used by the tuner (rmse_mean; +inf when no cycle is found).
double tracking_objective(const ExperimentConfig& cfg, const CommandStream& stream);

}  // namespace emgpal::harness
