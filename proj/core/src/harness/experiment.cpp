#include "emgpal/harness/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <thread>

#include "emgpal/dsp/pipeline.hpp"
#include "emgpal/errors.hpp"
#include "emgpal/harness/config_file.hpp"
#include "emgpal/harness/metrics.hpp"
#include "emgpal/io/emg_csv.hpp"

#ifndef EMGPAL_GIT_DESCRIBE
#define EMGPAL_GIT_DESCRIBE "unknown"
#endif

namespace emgpal::harness {
namespace {

constexpr double kSignificanceLevel = 1e-4;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <typename F>
auto in_stage(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

double sample_std(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return kNaN;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

std::string fixed(double v, int digits) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

// The envelope pipeline wants a gap-free, in-order stream. After the lossy
// link, frames that arrive behind a later seq are discarded (the report counts
// them as reordered) and every missing frame is replaced by silence with the
// timing of the frame that was sent.
std::vector<EmgFrame> conceal_losses(const std::vector<EmgFrame>& sent,
                                     const std::vector<EmgFrame>& delivered) {
  std::vector<EmgFrame> out;
  if (sent.empty()) return out;
  out.reserve(sent.size());
  const std::uint64_t first = sent.front().seq;
  std::uint64_t next = first;
  auto fill_until = [&](std::uint64_t seq) {
    for (; next < seq; ++next) {
      EmgFrame blank = sent[next - first];
      std::fill(blank.samples.begin(), blank.samples.end(), 0.0f);
      out.push_back(std::move(blank));
    }
  };
  for (const auto& f : delivered) {
    if (f.seq < next) continue;
    fill_until(f.seq);
    out.push_back(f);
    next = f.seq + 1;
  }
  fill_until(first + sent.size());
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  signal.validate();
  render.validate();
  gains.validate();
  plant.validate();
  impairment.validate();
  if (!(control_rate_hz > 0.0)) throw ConfigError("control.rate_hz must be positive");
  if (control_rate_hz > signal.sample_rate_hz) {
    throw ConfigError("control.rate_hz must not exceed the EMG sample rate");
  }
  if (frame_samples == 0 || frame_samples > 65535) {
    throw ConfigError("transport.frame_samples must lie in [1, 65535]");
  }
  if (!(indentation_mm >= 0.0)) throw ConfigError("render.indentation_mm must be nonnegative");
  if (!(segment_threshold > 0.0 && segment_threshold < 1.0)) {
    throw ConfigError("harness.segment_threshold must lie in (0, 1)");
  }
  if (input_channel < 0 || input_channel > 255) {
    throw ConfigError("harness.input_channel must lie in [0, 255]");
  }
  if (input_csv.empty()) protocol.validate(signal.sample_rate_hz);
}

std::uint64_t derive_seed(std::uint64_t master, SeedStream stream) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(stream);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

Aggregate aggregate_cycles(const std::vector<CycleStats>& cycles) {
  Aggregate a;
  if (cycles.empty()) {
    a.rmse_mean = a.rmse_std = a.r_mean = a.r_std = kNaN;
    return a;
  }
  std::vector<double> rm;
  std::vector<double> rs;
  for (const auto& c : cycles) {
    rm.push_back(c.rmse_kpa);
    rs.push_back(c.pearson_r);
  }
  const auto n = static_cast<double>(cycles.size());
  a.rmse_mean = std::accumulate(rm.begin(), rm.end(), 0.0) / n;
  a.r_mean = std::accumulate(rs.begin(), rs.end(), 0.0) / n;
  a.rmse_std = sample_std(rm, a.rmse_mean);
  a.r_std = sample_std(rs, a.r_mean);
  return a;
}

EvalReport evaluate_trace(const std::vector<TraceRow>& trace, double segment_threshold) {
  std::vector<double> p_d(trace.size());
  std::vector<double> p_h(trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) {
    p_d[i] = trace[i].p_d_kpa;
    p_h[i] = trace[i].p_h_kpa;
  }

  EvalReport report;
  report.trace_rows = trace.size();
  const auto cycles = segment_cycles(p_d, segment_threshold);
  for (std::size_t k = 0; k < cycles.size(); ++k) {
    const auto& c = cycles[k];
    const std::span<const double> d(p_d.data() + c.begin, c.size());
    const std::span<const double> h(p_h.data() + c.begin, c.size());
    CycleStats s;
    s.index = k;
    s.t_begin_us = trace[c.begin].t_us;
    s.t_end_us = trace[c.end - 1].t_us;
    s.samples = c.size();
    s.rmse_kpa = rmse(d, h);
    try {
      s.pearson_r = pearson(d, h);
    } catch (const UndefinedCorrelationError&) {
      s.pearson_r = kNaN;
    } catch (const ArgumentError&) {
      s.pearson_r = kNaN;  // single-sample cycle
    }
    s.p_value = pearson_p_value(s.pearson_r, s.samples);
    s.significant = s.p_value < kSignificanceLevel;
    report.per_cycle.push_back(s);
  }
  report.aggregate = aggregate_cycles(report.per_cycle);
  return report;
}

CommandStream build_commands(const ExperimentConfig& cfg) {
  cfg.validate();
  CommandStream out;

  std::vector<EmgFrame> frames;
  double mvc = cfg.signal.mvc_value;
  if (cfg.input_csv.empty()) {
    frames = in_stage("generate", [&] {
      auto protocol = cfg.protocol;
      protocol.seed = derive_seed(cfg.seed, SeedStream::protocol);
      if (cfg.mvc_from_protocol) mvc = protocol.expected_mvc();
      return generate_emg(protocol, cfg.signal.sample_rate_hz, cfg.frame_samples).frames;
    });
  } else {
    frames = in_stage("ingest", [&] {
      const auto rows = io::read_emg_csv(std::filesystem::path(cfg.input_csv));
      auto by_channel = io::frames_from_samples(rows, cfg.signal.sample_rate_hz, cfg.frame_samples);
      const auto it = by_channel.find(static_cast<std::uint8_t>(cfg.input_channel));
      if (it == by_channel.end()) {
        throw ArgumentError("no samples for channel " + std::to_string(cfg.input_channel));
      }
      return std::move(it->second);
    });
  }

  if (cfg.use_transport) {
    frames = in_stage("transport", [&] {
      auto impairment = cfg.impairment;
      impairment.seed = derive_seed(cfg.seed, SeedStream::transport);
      std::vector<EmgFrame> delivered;
      delivered.reserve(frames.size());
      out.link = transport::simulate_link(
          frames, impairment, [&](const EmgFrame& f, std::int64_t) { delivered.push_back(f); });
      return conceal_losses(frames, delivered);
    });
  }

  out.activation = in_stage("dsp", [&] {
    auto signal = cfg.signal;
    signal.mvc_value = mvc;
    return dsp::process_pipeline(frames, signal);
  });
  if (out.activation.empty()) throw StageError("dsp", "no samples to process");

  out.commands = in_stage("render", [&] {
    std::vector<render::PressureCommand> cmds;
    cmds.reserve(out.activation.size());
    for (const auto& a : out.activation) cmds.push_back(render::map_activation(a, cfg.render));
    return cmds;
  });
  return out;
}

ExperimentResult close_loop(const ExperimentConfig& cfg, const CommandStream& stream) {
  ExperimentResult result;
  const auto loop = in_stage("control", [&] {
    auto plant_cfg = cfg.plant;
    plant_cfg.seed = derive_seed(cfg.seed, SeedStream::plant);
    plant::VacuumPlant plant(plant_cfg);
    return control::run_loop(cfg.gains, plant, stream.commands, cfg.control_rate_hz);
  });

  result.trace = in_stage("render", [&] {
    std::vector<TraceRow> rows;
    rows.reserve(loop.size());
    std::size_t a = 0;
    for (const auto& s : loop) {
      while (a + 1 < stream.activation.size() && stream.activation[a + 1].t_us <= s.t_us) ++a;
      const double p = std::clamp(s.p_h_kpa, cfg.render.p_min_kpa, cfg.render.p_max_kpa);
      const auto f = render::render_force(p, cfg.indentation_mm, cfg.render, s.t_us);
      rows.push_back({s.t_us, stream.activation[a].value, s.p_d_kpa, s.p_h_kpa, s.u, f.force_n});
    }
    return rows;
  });

  result.report = in_stage("evaluate", [&] { return evaluate_trace(result.trace, cfg.segment_threshold); });
  result.report.effective_config = describe_config(cfg);
  result.report.config_hash = config_hash(result.report.effective_config);
  result.report.seed = cfg.seed;
  result.report.git_describe = EMGPAL_GIT_DESCRIBE;
  result.report.link = stream.link;
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  return close_loop(cfg, build_commands(cfg));
}

AcceptanceVerdict check_report(const EvalReport& report, const ExperimentConfig& cfg) {
  AcceptanceVerdict v;
  auto fail = [&v](std::string msg) {
    v.passed = false;
    v.failures.push_back(std::move(msg));
  };
  if (report.per_cycle.empty()) {
    fail("no cycles found");
    return v;
  }
  if (cfg.input_csv.empty() &&
      report.per_cycle.size() != static_cast<std::size_t>(cfg.protocol.n_cycles)) {
    fail("found " + std::to_string(report.per_cycle.size()) + " cycles, expected " +
         std::to_string(cfg.protocol.n_cycles));
  }
  const auto& a = report.aggregate;
  if (!(a.rmse_mean <= cfg.check.rmse_max_kpa)) {
    fail("rmse_mean " + fixed(a.rmse_mean, 4) + " kPa exceeds " + fixed(cfg.check.rmse_max_kpa, 4));
  }
  if (!(a.r_mean >= cfg.check.r_mean_min)) {
    fail("r_mean " + fixed(a.r_mean, 5) + " below " + fixed(cfg.check.r_mean_min, 5));
  }
  for (const auto& c : report.per_cycle) {
    if (!(c.pearson_r > cfg.check.cycle_r_min)) {
      fail("cycle " + std::to_string(c.index) + " r " + fixed(c.pearson_r, 5) + " not above " +
           fixed(cfg.check.cycle_r_min, 5));
    }
    if (!(c.p_value < cfg.check.p_value_max)) {
      fail("cycle " + std::to_string(c.index) + " not significant (p = " +
           format_double(c.p_value) + ")");
    }
  }
  return v;
}

void write_report(std::ostream& out, const EvalReport& r) {
  out << "emgpal pressure tracking report\n\n";
  out << "cycle  t_begin_s  t_end_s  samples  rmse_kpa  pearson_r  p<1e-4\n";
  for (const auto& c : r.per_cycle) {
    char line[160];
    std::snprintf(line, sizeof(line), "%5zu  %9.3f  %7.3f  %7zu  %8.4f  %9s  %6s\n", c.index,
                  static_cast<double>(c.t_begin_us) / 1e6, static_cast<double>(c.t_end_us) / 1e6,
                  c.samples, c.rmse_kpa, fixed(c.pearson_r, 5).c_str(),
                  c.significant ? "yes" : "no");
    out << line;
  }
  const auto& a = r.aggregate;
  out << "\nRMSE " << fixed(a.rmse_mean, 3) << " +/- " << fixed(a.rmse_std, 3) << " kPa, r "
      << fixed(a.r_mean, 4) << " +/- " << fixed(a.r_std, 4) << " over " << r.per_cycle.size()
      << " cycles\n";
  if (r.link) {
    out << "link: " << r.link->frames_delivered << " frames delivered, "
        << r.link->frames_dropped << " dropped, mean latency "
        << fixed(r.link->latency.mean_ms, 3) << " ms\n";
  }

  out << "\n[report]\n";
  out << "cycles = " << r.per_cycle.size() << '\n';
  out << "trace_rows = " << r.trace_rows << '\n';
  for (const auto& c : r.per_cycle) {
    const std::string p = "cycle." + std::to_string(c.index) + ".";
    out << p << "t_begin_us = " << c.t_begin_us << '\n';
    out << p << "t_end_us = " << c.t_end_us << '\n';
    out << p << "samples = " << c.samples << '\n';
    out << p << "rmse_kpa = " << format_double(c.rmse_kpa) << '\n';
    out << p << "pearson_r = " << format_double(c.pearson_r) << '\n';
    out << p << "p_value = " << format_double(c.p_value) << '\n';
    out << p << "significant = " << (c.significant ? "true" : "false") << '\n';
  }
  out << "aggregate.rmse_mean = " << format_double(a.rmse_mean) << '\n';
  out << "aggregate.rmse_std = " << format_double(a.rmse_std) << '\n';
  out << "aggregate.r_mean = " << format_double(a.r_mean) << '\n';
  out << "aggregate.r_std = " << format_double(a.r_std) << '\n';
  if (r.link) {
    const auto& l = *r.link;
    out << "link.frames_received = " << l.frames_received << '\n';
    out << "link.frames_delivered = " << l.frames_delivered << '\n';
    out << "link.frames_dropped = " << l.frames_dropped << '\n';
    out << "link.frames_malformed = " << l.frames_malformed << '\n';
    out << "link.frames_reordered = " << l.frames_reordered << '\n';
    out << "link.gap_count = " << l.gap_count << '\n';
    out << "link.latency_mean_ms = " << format_double(l.latency.mean_ms) << '\n';
    out << "link.latency_std_ms = " << format_double(l.latency.stddev_ms) << '\n';
  }
  out << "meta.seed = " << r.seed << '\n';
  out << "meta.config_hash = " << r.config_hash << '\n';
  out << "meta.git_describe = " << r.git_describe << '\n';

  if (!r.effective_config.empty()) {
    out << "\n[config]\n";
    for (const auto& [k, v] : r.effective_config) out << k << " = " << v << '\n';
  }
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace) {
  out << "t_us,activation,p_d_kpa,p_h_kpa,u,force_n\n";
  for (const auto& r : trace) {
    out << r.t_us << ',' << format_double(r.activation) << ',' << format_double(r.p_d_kpa) << ','
        << format_double(r.p_h_kpa) << ',' << format_double(r.u) << ','
        << format_double(r.force_n) << '\n';
  }
}

std::vector<TraceRow> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ArgumentError("trace CSV: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t_us,activation,p_d_kpa,p_h_kpa,u,force_n") {
    throw ArgumentError("trace CSV: unexpected header '" + line + "'");
  }
  std::vector<TraceRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string_view> f;
    std::string_view v(line);
    for (std::size_t pos = 0;;) {
      const auto comma = v.find(',', pos);
      f.push_back(v.substr(pos, comma == v.npos ? v.npos : comma - pos));
      if (comma == v.npos) break;
      pos = comma + 1;
    }
    if (f.size() != 6) throw ArgumentError("trace CSV line " + std::to_string(lineno) + ": expected 6 fields");
    TraceRow r;
    double* targets[] = {&r.activation, &r.p_d_kpa, &r.p_h_kpa, &r.u, &r.force_n};
    bool ok = std::from_chars(f[0].data(), f[0].data() + f[0].size(), r.t_us).ec == std::errc{};
    for (int i = 0; i < 5 && ok; ++i) {
      const auto s = f[static_cast<std::size_t>(i) + 1];
      ok = std::from_chars(s.data(), s.data() + s.size(), *targets[i]).ec == std::errc{};
    }
    if (!ok) throw ArgumentError("trace CSV line " + std::to_string(lineno) + ": malformed number");
    rows.push_back(r);
  }
  return rows;
}

double tracking_objective(const ExperimentConfig& cfg, const CommandStream& stream) {
  const auto result = close_loop(cfg, stream);
  const double v = result.report.aggregate.rmse_mean;
  return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
}

TuneResult tune_pid(const TuneGrid& grid, const ExperimentConfig& base) {
  if (grid.kp.empty() || grid.ki.empty() || grid.kd.empty()) {
    throw ArgumentError("tune_pid: empty grid");
  }
  auto sorted = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  };
  const auto kps = sorted(grid.kp);
  const auto kis = sorted(grid.ki);
  const auto kds = sorted(grid.kd);

  TuneResult result;
  for (double kp : kps) {
    for (double ki : kis) {
      for (double kd : kds) {
        auto g = base.gains;
        g.kp = kp;
        g.ki = ki;
        g.kd = kd;
        g.validate();
        TunePoint pt;
        pt.gains = g;
        result.points.push_back(pt);
      }
    }
  }

  const auto stream = build_commands(base);
  auto plant_cfg = base.plant;
  plant_cfg.seed = derive_seed(base.seed, SeedStream::plant);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < result.points.size(); i = next++) {
      auto cfg = base;
      cfg.gains = result.points[i].gains;
      auto& pt = result.points[i];
      pt.objective = tracking_objective(cfg, stream);
      pt.step = control::step_response(pt.gains, plant_cfg, base.control_rate_hz, grid.step_level_kpa);
      pt.feasible = !grid.constrain_step || pt.step.meets(grid.max_overshoot, grid.max_settling_s);
    }
  };
  const unsigned n_threads = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                                            static_cast<unsigned>(result.points.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  auto pick = [&](bool feasible_only) -> std::optional<std::size_t> {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < result.points.size(); ++i) {
      const auto& p = result.points[i];
      if (feasible_only && !p.feasible) continue;
      if (!best || p.objective < result.points[*best].objective) best = i;
    }
    return best;
  };
  auto best = pick(true);
  result.feasible = best.has_value();
  if (!best) best = pick(false);
  result.best = result.points[*best].gains;
  result.best_objective = result.points[*best].objective;
  result.best_step = result.points[*best].step;
  return result;
}

}  // namespace emgpal::harness
