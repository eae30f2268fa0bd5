#pragma once

#include <cstddef>

namespace emgpal::dsp {

struct SignalConfig {
  double sample_rate_hz = 2000.0;
  double band_low_hz = 10.0;
  double band_high_hz = 500.0;
  /// Order of the lowpass prototype. The bandpass built from it has twice
  /// this order and one biquad per prototype pole.
  int prototype_order = 4;
  double envelope_window_s = 0.100;
  /// Envelope level (rectified millivolts) that corresponds to activation 1.0.
  double mvc_value = 1.0;
  bool activation_clamp = true;
  /// When false the literal chain (filter, then detrend) is used instead.
  bool detrend_before_filter = true;

  /// Throws ConfigError if any invariant is broken.
  void validate() const;

  std::size_t envelope_window_samples() const;
};

}  // namespace emgpal::dsp
