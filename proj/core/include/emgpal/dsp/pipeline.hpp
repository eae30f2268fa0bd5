#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "emgpal/dsp/biquad.hpp"
#include "emgpal/dsp/envelope.hpp"
#include "emgpal/dsp/signal_config.hpp"
#include "emgpal/frame.hpp"

namespace emgpal::dsp {

/// Single-channel envelope extractor: detrend, bandpass, rectify, moving mean,
/// MVC normalization. Feed frames in seq order; output is identical no matter
/// how the samples are split into frames.
///
/// One instance per channel. Not safe for concurrent mutation, but it may be
/// handed to another thread between calls.
class EnvelopePipeline {
 public:
  explicit EnvelopePipeline(SignalConfig cfg);

  /// Throws StreamIntegrityError when `frame.seq` skips ahead, ArgumentError
  /// for a replayed/backwards seq or a channel change, ConfigError when the
  /// frame rate disagrees with the configured rate.
  std::vector<ActivationSample> push(const EmgFrame& frame);

  /// Unnormalized envelope (rectified, smoothed millivolts) for raw samples,
  /// bypassing frame bookkeeping. Shares state with `push`.
  std::vector<double> envelope(std::span<const double> samples);

  void reset();

  const SignalConfig& config() const { return cfg_; }

 private:
  double envelope_sample(double x);

  SignalConfig cfg_;
  BiquadCascade cascade_;
  RunningDetrend detrend_;
  MovingMean smoother_;
  std::optional<std::uint8_t> channel_;
  std::optional<std::uint64_t> next_seq_;
  std::int64_t t0_us_ = 0;
  std::uint64_t sample_index_ = 0;
};

/// Batch form of the pipeline over a sorted single-channel frame sequence.
std::vector<ActivationSample> process_pipeline(std::span<const EmgFrame> frames,
                                               const SignalConfig& cfg);

/// MVC from a calibration recording: maximum of the processed (unnormalized)
/// envelope. Throws ArgumentError when the recording is empty.
double calibrate_mvc(std::span<const EmgFrame> frames, const SignalConfig& cfg);

}  // namespace emgpal::dsp
