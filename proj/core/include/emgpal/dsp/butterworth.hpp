#pragma once

#include "emgpal/dsp/biquad.hpp"
#include "emgpal/dsp/signal_config.hpp"

namespace emgpal::dsp {

/// Butterworth bandpass from an analog lowpass prototype of order
/// `prototype_order`: lowpass-to-bandpass transform on pre-warped band edges,
/// then the bilinear transform. Returns `prototype_order` biquads, with the
/// overall gain normalized to unity at the band center.
///
/// Throws ConfigError for edges at or above Nyquist, inverted edges, or an
/// odd / non-positive order.
BiquadCascade design_bandpass(double sample_rate_hz, double band_low_hz, double band_high_hz,
                              int prototype_order);

inline BiquadCascade design_bandpass(const SignalConfig& cfg) {
  return design_bandpass(cfg.sample_rate_hz, cfg.band_low_hz, cfg.band_high_hz,
                         cfg.prototype_order);
}

}  // namespace emgpal::dsp
