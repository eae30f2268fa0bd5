#include "emgpal/dsp/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "emgpal/dsp/butterworth.hpp"
#include "emgpal/errors.hpp"

namespace emgpal::dsp {

EnvelopePipeline::EnvelopePipeline(SignalConfig cfg)
    : cfg_((cfg.validate(), cfg)),
      cascade_(design_bandpass(cfg_)),
      smoother_(cfg_.envelope_window_samples()) {}

double EnvelopePipeline::envelope_sample(double x) {
  double y;
  if (cfg_.detrend_before_filter) {
    y = cascade_.process(detrend_.push(x));
  } else {
    y = detrend_.push(cascade_.process(x));
  }
  return smoother_.push(std::abs(y));
}

std::vector<double> EnvelopePipeline::envelope(std::span<const double> samples) {
  std::vector<double> out(samples.size());
  std::transform(samples.begin(), samples.end(), out.begin(),
                 [this](double x) { return envelope_sample(x); });
  return out;
}

std::vector<ActivationSample> EnvelopePipeline::push(const EmgFrame& frame) {
  if (channel_ && *channel_ != frame.channel_id) {
    throw ArgumentError("pipeline handles one channel; got channel " +
                        std::to_string(frame.channel_id) + " after " +
                        std::to_string(*channel_));
  }
  if (frame.sample_rate_hz != cfg_.sample_rate_hz) {
    throw ConfigError("frame rate " + std::to_string(frame.sample_rate_hz) +
                      " Hz does not match configured " + std::to_string(cfg_.sample_rate_hz) +
                      " Hz");
  }
  if (next_seq_) {
    if (frame.seq > *next_seq_) throw StreamIntegrityError(frame.channel_id, *next_seq_);
    if (frame.seq < *next_seq_) {
      throw ArgumentError("frames out of order: seq " + std::to_string(frame.seq) +
                          " after " + std::to_string(*next_seq_ - 1));
    }
  } else {
    channel_ = frame.channel_id;
    t0_us_ = static_cast<std::int64_t>(frame.t_start_us);
  }
  next_seq_ = frame.seq + 1;

  std::vector<ActivationSample> out;
  out.reserve(frame.samples.size());
  for (float raw : frame.samples) {
    const double env = envelope_sample(static_cast<double>(raw));
    double a = env / cfg_.mvc_value;
    if (cfg_.activation_clamp) a = std::min(a, 1.0);
    const auto dt = std::llround(static_cast<double>(sample_index_) * 1e6 / cfg_.sample_rate_hz);
    out.push_back({t0_us_ + static_cast<std::int64_t>(dt), a});
    ++sample_index_;
  }
  return out;
}

void EnvelopePipeline::reset() {
  cascade_.reset();
  detrend_.reset();
  smoother_.reset();
  channel_.reset();
  next_seq_.reset();
  t0_us_ = 0;
  sample_index_ = 0;
}

std::vector<ActivationSample> process_pipeline(std::span<const EmgFrame> frames,
                                               const SignalConfig& cfg) {
  EnvelopePipeline pipeline(cfg);
  std::vector<ActivationSample> out;
  for (const auto& f : frames) {
    auto chunk = pipeline.push(f);
    out.insert(out.end(), chunk.begin(), chunk.end());
  }
  return out;
}

double calibrate_mvc(std::span<const EmgFrame> frames, const SignalConfig& cfg) {
  SignalConfig probe = cfg;
  probe.mvc_value = 1.0;
  probe.activation_clamp = false;
  const auto env = process_pipeline(frames, probe);
  if (env.empty()) throw ArgumentError("calibrate_mvc: empty calibration recording");
  const auto peak = std::max_element(env.begin(), env.end(), [](const auto& a, const auto& b) {
    return a.value < b.value;
  });
  if (!(peak->value > 0.0)) throw ArgumentError("calibrate_mvc: calibration envelope is zero");
  return peak->value;
}

}  // namespace emgpal::dsp
