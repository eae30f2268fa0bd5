// emgpal: command line front end for the EMG-to-stiffness pipeline.
//
// Exit codes: 0 success, 1 acceptance check failed, 2 usage/config/data
// error, 3 transport error. Diagnostics go to stderr; data goes to files under
// --out-dir or to stdout.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "emgpal/dsp/butterworth.hpp"
#include "emgpal/dsp/pipeline.hpp"
#include "emgpal/errors.hpp"
#include "emgpal/harness/config_file.hpp"
#include "emgpal/harness/experiment.hpp"
#include "emgpal/harness/generator.hpp"
#include "emgpal/io/emg_csv.hpp"
#include "emgpal/log.hpp"
#include "emgpal/transport/link.hpp"

namespace fs = std::filesystem;
using namespace emgpal;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitTransport = 3;

constexpr const char* kDefaultListen = "127.0.0.1:7400";

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  bool verbose = false;
};

harness::ExperimentConfig effective_config(const Common& c) {
  auto overrides = c.overrides;
  if (c.seed) overrides.push_back("seed=" + std::to_string(*c.seed));
  const fs::path path(c.config_path);
  return harness::load_config(c.config_path.empty() ? nullptr : &path, overrides);
}

fs::path output_path(const Common& c, const std::string& name) {
  fs::create_directories(c.out_dir);
  return fs::path(c.out_dir) / name;
}

std::ofstream open_output(const Common& c, const std::string& name) {
  const auto path = output_path(c, name);
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot write " + path.string());
  return out;
}

void echo_config(const Common& c, const harness::ExperimentConfig& cfg) {
  auto out = open_output(c, "effective.cfg");
  const auto kv = harness::describe_config(cfg);
  out << "# config_hash " << harness::config_hash(kv) << '\n';
  for (const auto& [k, v] : kv) out << k << " = " << v << '\n';
}

double db(double mag) { return 20.0 * std::log10(mag); }

std::pair<double, double> parse_band(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ConfigError("--band must be LOW:HIGH");
  try {
    return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
  } catch (const std::exception&) {
    throw ConfigError("--band must be LOW:HIGH in Hz");
  }
}

double mvc_for(const harness::ExperimentConfig& cfg) {
  return cfg.mvc_from_protocol ? cfg.protocol.expected_mvc() : cfg.signal.mvc_value;
}

std::map<std::uint8_t, std::vector<EmgFrame>> load_recording(const std::string& path,
                                                             const harness::ExperimentConfig& cfg) {
  const auto rows = io::read_emg_csv(fs::path(path));
  return io::frames_from_samples(rows, cfg.signal.sample_rate_hz, cfg.frame_samples);
}

// --- subcommands -----------------------------------------------------------

int cmd_filter_design(const Common& common, std::optional<double> fs_hz,
                      const std::string& band, std::optional<int> order) {
  auto cfg = effective_config(common);
  if (fs_hz) cfg.signal.sample_rate_hz = *fs_hz;
  if (!band.empty()) std::tie(cfg.signal.band_low_hz, cfg.signal.band_high_hz) = parse_band(band);
  if (order) cfg.signal.prototype_order = *order;
  const auto cascade = dsp::design_bandpass(cfg.signal);

  std::printf("# Butterworth bandpass %g-%g Hz, fs %g Hz, prototype order %d, %zu sections\n",
              cfg.signal.band_low_hz, cfg.signal.band_high_hz, cfg.signal.sample_rate_hz,
              cfg.signal.prototype_order, cascade.size());
  std::printf("section,b0,b1,b2,a1,a2\n");
  std::size_t i = 0;
  for (const auto& s : cascade.sections()) {
    std::printf("%zu,%.17g,%.17g,%.17g,%.17g,%.17g\n", i++, s.b0, s.b1, s.b2, s.a1, s.a2);
  }
  const double f_lo = cfg.signal.band_low_hz;
  const double f_hi = cfg.signal.band_high_hz;
  const double nyq = cfg.signal.sample_rate_hz / 2.0;
  const std::vector<std::pair<const char*, double>> probes = {
      {"1 Hz", 1.0},
      {"band_low", f_lo},
      {"center", std::sqrt(f_lo * f_hi)},
      {"band_high", f_hi},
      {"0.99 nyquist", 0.99 * nyq},
  };
  std::printf("\nprobe,freq_hz,gain_db\n");
  for (const auto& [name, f] : probes) {
    std::printf("%s,%.4f,%.4f\n", name, f, db(std::abs(cascade.response(f, cfg.signal.sample_rate_hz))));
  }
  return kExitOk;
}

int cmd_gen(const Common& common) {
  const auto cfg = effective_config(common);
  auto protocol = cfg.protocol;
  protocol.seed = harness::derive_seed(cfg.seed, harness::SeedStream::protocol);
  const auto rec = harness::generate_emg(protocol, cfg.signal.sample_rate_hz, cfg.frame_samples);
  {
    auto out = open_output(common, "emg.csv");
    io::write_emg_csv(out, io::samples_from_frames(rec.frames));
  }
  {
    auto out = open_output(common, "envelope.csv");
    out << "t_us,activation\n";
    for (std::size_t i = 0; i < rec.envelope.size(); ++i) {
      out << std::llround(static_cast<double>(i) * 1e6 / rec.sample_rate_hz) << ','
          << harness::format_double(rec.envelope[i]) << '\n';
    }
  }
  echo_config(common, cfg);
  std::cerr << "wrote " << rec.envelope.size() << " samples in " << rec.frames.size()
            << " frames to " << output_path(common, "emg.csv").string() << '\n';
  return kExitOk;
}

int cmd_process(const Common& common, const std::string& in_path, const std::string& calibration) {
  const auto cfg = effective_config(common);
  auto signal = cfg.signal;
  signal.mvc_value = mvc_for(cfg);
  if (!calibration.empty()) {
    const auto cal = load_recording(calibration, cfg);
    const auto it = cal.find(static_cast<std::uint8_t>(cfg.input_channel));
    if (it == cal.end()) throw ArgumentError("calibration file has no data for the input channel");
    signal.mvc_value = dsp::calibrate_mvc(it->second, signal);
    std::cerr << "calibrated mvc_value = " << harness::format_double(signal.mvc_value) << '\n';
  }

  const auto recording = load_recording(in_path, cfg);
  auto out = open_output(common, "activation.csv");
  out << "t_us,channel,activation\n";
  for (const auto& [channel, frames] : recording) {
    for (const auto& a : dsp::process_pipeline(frames, signal)) {
      out << a.t_us << ',' << static_cast<unsigned>(channel) << ','
          << harness::format_double(a.value) << '\n';
    }
  }
  auto effective = cfg;
  effective.signal.mvc_value = signal.mvc_value;
  effective.mvc_from_protocol = false;
  echo_config(common, effective);
  return kExitOk;
}

int cmd_simulate(const Common& common, bool check) {
  const auto cfg = effective_config(common);
  const auto result = harness::run_experiment(cfg);
  {
    auto out = open_output(common, "report.txt");
    harness::write_report(out, result.report);
  }
  {
    auto out = open_output(common, "trace.csv");
    harness::write_trace_csv(out, result.trace);
  }
  harness::write_report(std::cout, result.report);
  if (!check) return kExitOk;
  const auto verdict = harness::check_report(result.report, cfg);
  for (const auto& f : verdict.failures) std::cerr << "check failed: " << f << '\n';
  std::cerr << (verdict.passed ? "check passed\n" : "check FAILED\n");
  return verdict.passed ? kExitOk : kExitCheckFailed;
}

int cmd_evaluate(const Common& common, const std::string& trace_path, bool check) {
  const auto cfg = effective_config(common);
  std::ifstream in(trace_path);
  if (!in) throw ArgumentError("cannot open " + trace_path);
  const auto trace = harness::read_trace_csv(in);
  auto report = harness::evaluate_trace(trace, cfg.segment_threshold);
  report.effective_config = harness::describe_config(cfg);
  report.config_hash = harness::config_hash(report.effective_config);
  report.seed = cfg.seed;
  {
    auto out = open_output(common, "report.txt");
    harness::write_report(out, report);
  }
  harness::write_report(std::cout, report);
  if (!check) return kExitOk;
  auto check_cfg = cfg;
  check_cfg.input_csv = trace_path;  // cycle count is not known for external traces
  const auto verdict = harness::check_report(report, check_cfg);
  for (const auto& f : verdict.failures) std::cerr << "check failed: " << f << '\n';
  return verdict.passed ? kExitOk : kExitCheckFailed;
}

int cmd_tune(const Common& common, const std::vector<double>& kp, const std::vector<double>& ki,
             const std::vector<double>& kd, bool unconstrained) {
  const auto cfg = effective_config(common);
  harness::TuneGrid grid{kp, ki, kd};
  grid.constrain_step = !unconstrained;
  const auto result = harness::tune_pid(grid, cfg);
  auto out = open_output(common, "tune.csv");
  out << "kp,ki,kd,rmse_mean,step_overshoot,step_settling_s,feasible\n";
  for (const auto& p : result.points) {
    out << harness::format_double(p.gains.kp) << ',' << harness::format_double(p.gains.ki) << ','
        << harness::format_double(p.gains.kd) << ',' << harness::format_double(p.objective) << ','
        << harness::format_double(p.step.overshoot) << ',' << harness::format_double(p.step.settling_s)
        << ',' << (p.feasible ? 1 : 0) << '\n';
  }
  if (!result.feasible) {
    std::cerr << "no grid point meets the step limits; reporting the unconstrained minimum\n";
  }
  echo_config(common, cfg);
  std::cout << "pid.kp = " << harness::format_double(result.best.kp) << '\n'
            << "pid.ki = " << harness::format_double(result.best.ki) << '\n'
            << "pid.kd = " << harness::format_double(result.best.kd) << '\n'
            << "# rmse_mean = " << harness::format_double(result.best_objective) << " kPa over "
            << result.points.size() << " grid points\n"
            << "# step overshoot = " << harness::format_double(100.0 * result.best_step.overshoot)
            << " %, settling = " << harness::format_double(result.best_step.settling_s) << " s\n";
  return kExitOk;
}

int cmd_send(const Common& common, const std::string& in_path, const std::string& to,
             const std::string& pacing) {
  const auto cfg = effective_config(common);
  const auto endpoint = transport::Endpoint::parse(to);
  if (pacing != "realtime" && pacing != "fast") throw ConfigError("--pacing must be realtime or fast");

  std::vector<EmgFrame> frames;
  if (!in_path.empty()) {
    for (auto& [channel, fr] : load_recording(in_path, cfg)) {
      frames.insert(frames.end(), fr.begin(), fr.end());
    }
    std::stable_sort(frames.begin(), frames.end(), [](const EmgFrame& a, const EmgFrame& b) {
      return a.t_start_us < b.t_start_us;
    });
  }
  const auto report = transport::run_sender(
      frames, endpoint,
      pacing == "realtime" ? transport::Pacing::realtime : transport::Pacing::as_fast_as_possible);
  std::cout << "frames_sent = " << report.frames_sent << '\n'
            << "bytes_sent = " << report.bytes_sent << '\n';
  return kExitOk;
}

int cmd_receive(const Common& common, const std::string& listen_flag, const std::string& clock) {
  const auto cfg = effective_config(common);
  std::string listen = kDefaultListen;
  if (const char* env = std::getenv(transport::kListenEnvVar); env != nullptr && *env) listen = env;
  if (!listen_flag.empty()) listen = listen_flag;
  if (clock != "simulated" && clock != "wall") throw ConfigError("--clock must be simulated or wall");

  transport::ReceiverOptions options;
  options.impairment = cfg.impairment;
  options.impairment.seed = harness::derive_seed(cfg.seed, harness::SeedStream::transport);
  options.clock = clock == "wall" ? transport::ClockMode::wall : transport::ClockMode::simulated;

  transport::TcpListener listener(transport::Endpoint::parse(listen));
  std::cerr << "listening on port " << listener.port() << '\n';

  std::vector<EmgFrame> captured;
  const auto report = transport::run_receiver(
      listener, options, [&](const EmgFrame& f, std::int64_t) { captured.push_back(f); });

  {
    auto out = open_output(common, "capture.csv");
    io::write_emg_csv(out, io::samples_from_frames(captured));
  }
  echo_config(common, cfg);
  const auto& l = report.latency;
  std::cout << "frames_received = " << report.frames_received << '\n'
            << "frames_delivered = " << report.frames_delivered << '\n'
            << "frames_dropped = " << report.frames_dropped << '\n'
            << "frames_malformed = " << report.frames_malformed << '\n'
            << "frames_reordered = " << report.frames_reordered << '\n'
            << "gap_count = " << report.gap_count << '\n'
            << "bytes_received = " << report.bytes_received << '\n'
            << "latency_mean_ms = " << harness::format_double(l.mean_ms) << '\n'
            << "latency_std_ms = " << harness::format_double(l.stddev_ms) << '\n'
            << "latency_min_ms = " << harness::format_double(l.min_ms) << '\n'
            << "latency_max_ms = " << harness::format_double(l.max_ms) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EMG-driven stiffness rendering: filter design, envelope processing, "
               "closed-loop simulation, transport and evaluation"};
  app.require_subcommand(1);

  Common common;
  auto add_common = [&common](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "Key-value config file")
        ->check(CLI::ExistingFile);
    sub->add_option("--set", common.overrides, "Override a config key (key=value), repeatable");
    sub->add_option("--seed", common.seed, "Master seed for every random stream");
    sub->add_option("--out-dir", common.out_dir, "Directory for all output files")
        ->capture_default_str();
    sub->add_flag("-v,--verbose", common.verbose, "Log debug messages");
  };

  std::optional<double> fd_fs;
  std::string fd_band;
  std::optional<int> fd_order;
  auto* filter_design = app.add_subcommand("filter-design", "Print bandpass coefficients and gains");
  add_common(filter_design);
  filter_design->add_option("--fs", fd_fs, "Sample rate in Hz");
  filter_design->add_option("--band", fd_band, "Passband LOW:HIGH in Hz");
  filter_design->add_option("--order", fd_order, "Lowpass prototype order (even)");

  auto* gen = app.add_subcommand("gen", "Write a synthetic EMG recording (emg.csv, envelope.csv)");
  add_common(gen);

  std::string process_in;
  std::string process_cal;
  auto* process = app.add_subcommand("process", "Raw EMG CSV to activation CSV");
  add_common(process);
  process->add_option("--in", process_in, "EMG CSV (t_us,channel,value_mv)")
      ->required()
      ->check(CLI::ExistingFile);
  process->add_option("--calibration", process_cal, "MVC calibration recording")
      ->check(CLI::ExistingFile);

  bool simulate_check = false;
  auto* simulate = app.add_subcommand("simulate", "Closed-loop run with report and trace");
  add_common(simulate);
  simulate->add_flag("--check", simulate_check, "Exit 1 unless acceptance thresholds hold");

  std::string evaluate_trace;
  bool evaluate_check = false;
  auto* evaluate = app.add_subcommand("evaluate", "Report for an existing trace CSV");
  add_common(evaluate);
  evaluate->add_option("--trace", evaluate_trace, "Trace CSV")->required()->check(CLI::ExistingFile);
  evaluate->add_flag("--check", evaluate_check, "Exit 1 unless acceptance thresholds hold");

  std::vector<double> tune_kp{1.0, 1.5, 2.0, 2.5, 3.0, 4.0};
  std::vector<double> tune_ki{10.0, 15.0, 18.0, 20.0, 22.0, 25.0, 30.0, 40.0};
  std::vector<double> tune_kd{0.0, 0.01, 0.02, 0.03, 0.04};
  bool tune_unconstrained = false;
  auto* tune = app.add_subcommand("tune", "Grid-search PID gains on the configured scenario");
  add_common(tune);
  tune->add_option("--kp", tune_kp, "Proportional gains")->delimiter(',')->capture_default_str();
  tune->add_option("--ki", tune_ki, "Integral gains (1/s)")->delimiter(',')->capture_default_str();
  tune->add_option("--kd", tune_kd, "Derivative gains (s)")->delimiter(',')->capture_default_str();
  tune->add_flag("--unconstrained", tune_unconstrained,
                 "Ignore the step limits (10 % overshoot, 0.5 s settling)");

  std::string send_in;
  std::string send_to;
  std::string send_pacing = "fast";
  auto* send = app.add_subcommand("send", "Stream an EMG CSV to a receiver");
  add_common(send);
  send->add_option("--in", send_in, "EMG CSV to send")->check(CLI::ExistingFile);
  send->add_option("--to", send_to, "Receiver host:port")->required();
  send->add_option("--pacing", send_pacing, "realtime or fast")->capture_default_str();

  std::string receive_listen;
  std::string receive_clock = "simulated";
  auto* receive = app.add_subcommand(
      "receive", "Accept one sender, apply transport.* impairment, write capture.csv");
  add_common(receive);
  receive->add_option("--listen", receive_listen,
                      std::string("host:port (default ") + kDefaultListen + ", or $" +
                          transport::kListenEnvVar + ")");
  receive->add_option("--clock", receive_clock, "simulated or wall")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }
  if (common.verbose) set_log_level(LogLevel::debug);

  try {
    if (*filter_design) return cmd_filter_design(common, fd_fs, fd_band, fd_order);
    if (*gen) return cmd_gen(common);
    if (*process) return cmd_process(common, process_in, process_cal);
    if (*simulate) return cmd_simulate(common, simulate_check);
    if (*evaluate) return cmd_evaluate(common, evaluate_trace, evaluate_check);
    if (*tune) return cmd_tune(common, tune_kp, tune_ki, tune_kd, tune_unconstrained);
    if (*send) return cmd_send(common, send_in, send_to, send_pacing);
    if (*receive) return cmd_receive(common, receive_listen, receive_clock);
  } catch (const TransportError& e) {
    std::cerr << "emgpal: transport error: " << e.what() << '\n';
    return kExitTransport;
  } catch (const std::exception& e) {
    std::cerr << "emgpal: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
