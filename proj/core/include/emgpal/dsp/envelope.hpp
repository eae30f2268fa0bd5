#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include "emgpal/dsp/signal_config.hpp"

namespace emgpal::dsp {

/// Normalized muscle activation (fraction of MVC) at one instant.
struct ActivationSample {
  std::int64_t t_us = 0;
  double value = 0.0;

  friend bool operator==(const ActivationSample&, const ActivationSample&) = default;
};

/// Constant detrend: subtracts the arithmetic mean of `x`.
/// Throws ArgumentError on empty input.
std::vector<double> detrend(std::span<const double> x);

/// Full-wave rectification.
std::vector<double> rectify(std::span<const double> x);

/// Causal trailing-window mean. For the first `window - 1` samples the mean
/// runs over the samples available so far. Throws ArgumentError if window == 0.
std::vector<double> moving_mean(std::span<const double> x, std::size_t window_samples);

/// Divides by the MVC level and clamps to [0, 1] when configured. Timestamps
/// come from the sample index and the configured rate.
/// Throws ConfigError for a non-positive MVC, ArgumentError for a negative sample.
std::vector<ActivationSample> normalize_mvc(std::span<const double> x, const SignalConfig& cfg);

/// Streaming moving mean with the same warm-up rule as `moving_mean`.
/// Output is clamped to the extrema of the current window, so a constant
/// input comes back exactly and rounding never leaves the input range.
class MovingMean {
 public:
  explicit MovingMean(std::size_t window_samples);

  double push(double x);
  void reset();
  std::size_t window() const { return window_; }

 private:
  std::size_t window_;
  std::deque<double> buf_;
};

/// Streaming DC remover: subtracts the running mean of every sample seen so
/// far. Its output is independent of how the input is chunked.
class RunningDetrend {
 public:
  double push(double x);
  void reset();

 private:
  double sum_ = 0.0;
  std::uint64_t count_ = 0;
};

}  // namespace emgpal::dsp
