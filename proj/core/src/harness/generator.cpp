#include "emgpal/harness/generator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "emgpal/dsp/butterworth.hpp"
#include "emgpal/errors.hpp"

namespace emgpal::harness {
namespace {

// Samples discarded at the start of the carrier so the shaping filter has settled.
constexpr double kCarrierPrerollS = 0.5;

}  // namespace

double ProtocolSpec::peak_of(int cycle) const {
  if (!cycle_peaks.empty()) return cycle_peaks.at(static_cast<std::size_t>(cycle));
  return peak_activation;
}

double ProtocolSpec::expected_mvc() const {
  return emg_scale_mv * std::sqrt(2.0 / std::numbers::pi);
}

void ProtocolSpec::validate(double rate_hz) const {
  if (n_cycles <= 0) throw ConfigError("protocol n_cycles must be positive");
  if (!(ramp_s > 0.0) || !(hold_s > 0.0) || !(rest_s > 0.0)) {
    throw ConfigError("protocol ramp_s, hold_s and rest_s must be positive");
  }
  if (!(peak_activation >= 0.0 && peak_activation <= 1.0)) {
    throw ConfigError("protocol peak_activation must lie in [0, 1]");
  }
  if (!cycle_peaks.empty()) {
    if (cycle_peaks.size() != static_cast<std::size_t>(n_cycles)) {
      throw ConfigError("protocol cycle_peaks needs one entry per cycle");
    }
    for (double p : cycle_peaks) {
      if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("protocol cycle peaks must lie in [0, 1]");
    }
  }
  if (!(rest_activation >= 0.0 && rest_activation < 1.0)) {
    throw ConfigError("protocol rest_activation must lie in [0, 1)");
  }
  if (!(emg_scale_mv > 0.0)) throw ConfigError("protocol emg_scale_mv must be positive");
  if (!(rate_hz > 0.0)) throw ConfigError("sample rate must be positive");
  if (!(carrier_low_hz > 0.0 && carrier_low_hz < carrier_high_hz &&
        carrier_high_hz < rate_hz / 2.0)) {
    throw ConfigError("carrier band " + std::to_string(carrier_low_hz) + "-" +
                      std::to_string(carrier_high_hz) + " Hz must lie inside (0, " +
                      std::to_string(rate_hz / 2.0) + ") Hz");
  }
}

double envelope_at(const ProtocolSpec& spec, double t_s) {
  if (t_s < 0.0 || t_s >= spec.duration_s()) return spec.rest_activation;
  const int cycle = static_cast<int>(std::floor(t_s / spec.cycle_s()));
  const double tc = t_s - cycle * spec.cycle_s();
  const double peak = spec.peak_of(std::min(cycle, spec.n_cycles - 1));
  double shape;
  if (tc < spec.ramp_s) {
    shape = tc / spec.ramp_s;
  } else if (tc < spec.ramp_s + spec.hold_s) {
    shape = 1.0;
  } else if (tc < 2.0 * spec.ramp_s + spec.hold_s) {
    shape = 1.0 - (tc - spec.ramp_s - spec.hold_s) / spec.ramp_s;
  } else {
    shape = 0.0;
  }
  const double lift = std::max(peak - spec.rest_activation, 0.0);
  return spec.rest_activation + lift * std::max(shape, 0.0);
}

std::vector<EmgFrame> frame_samples(const std::vector<float>& samples, double rate_hz,
                                    std::size_t frame_size, std::uint8_t channel,
                                    std::uint64_t t0_us) {
  if (frame_size == 0) throw ArgumentError("frame size must be positive");
  std::vector<EmgFrame> frames;
  frames.reserve(samples.size() / frame_size + 1);
  for (std::size_t start = 0, seq = 0; start < samples.size(); start += frame_size, ++seq) {
    EmgFrame f;
    f.channel_id = channel;
    f.seq = seq;
    f.t_start_us =
        t0_us + static_cast<std::uint64_t>(std::llround(static_cast<double>(start) * 1e6 / rate_hz));
    f.sample_rate_hz = rate_hz;
    const auto end = std::min(samples.size(), start + frame_size);
    f.samples.assign(samples.begin() + static_cast<std::ptrdiff_t>(start),
                     samples.begin() + static_cast<std::ptrdiff_t>(end));
    frames.push_back(std::move(f));
  }
  return frames;
}

SyntheticRecording generate_emg(const ProtocolSpec& spec, double rate_hz, std::size_t frame_size,
                                std::uint8_t channel) {
  spec.validate(rate_hz);
  const auto n = static_cast<std::size_t>(std::llround(spec.duration_s() * rate_hz));
  const auto preroll = static_cast<std::size_t>(std::llround(kCarrierPrerollS * rate_hz));

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> white(0.0, 1.0);
  auto shaping = dsp::design_bandpass(rate_hz, spec.carrier_low_hz, spec.carrier_high_hz, 4);
  for (std::size_t i = 0; i < preroll; ++i) shaping.process(white(rng));
  std::vector<double> carrier(n);
  double power = 0.0;
  for (auto& c : carrier) {
    c = shaping.process(white(rng));
    power += c * c;
  }
  const double rms = n > 0 ? std::sqrt(power / static_cast<double>(n)) : 1.0;

  SyntheticRecording rec;
  rec.sample_rate_hz = rate_hz;
  rec.envelope.resize(n);
  std::vector<float> emg(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double env = envelope_at(spec, static_cast<double>(i) / rate_hz);
    rec.envelope[i] = env;
    emg[i] = static_cast<float>(carrier[i] / rms * env * spec.emg_scale_mv);
  }
  rec.frames = frame_samples(emg, rate_hz, frame_size, channel);
  return rec;
}

}  // namespace emgpal::harness
