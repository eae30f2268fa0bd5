#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "emgpal/frame.hpp"

namespace emgpal::harness {

/// Timing and shape of the synthetic supination protocol. Each cycle is
/// ramp up, hold, ramp down, rest.
struct ProtocolSpec {
  int n_cycles = 5;
  double ramp_s = 1.5;
  double hold_s = 1.0;
  double rest_s = 2.0;
  double peak_activation = 0.8;
  /// Optional per-cycle peaks; when non-empty it must have n_cycles entries
  /// and overrides peak_activation.
  std::vector<double> cycle_peaks;
  /// Baseline activation between contractions (noise floor).
  double rest_activation = 0.02;
  double carrier_low_hz = 20.0;
  double carrier_high_hz = 450.0;
  /// EMG amplitude (RMS, mV) of a contraction at activation 1.0.
  double emg_scale_mv = 0.5;
  std::uint64_t seed = 7;

  double cycle_s() const { return 2.0 * ramp_s + hold_s + rest_s; }
  double duration_s() const { return n_cycles * cycle_s(); }
  double peak_of(int cycle) const;

  /// Envelope level of the rectified, smoothed EMG at activation 1.0 for a
  /// Gaussian carrier: emg_scale_mv * sqrt(2 / pi).
  double expected_mvc() const;

  /// Throws ConfigError; the carrier band must fit below Nyquist of `rate_hz`.
  void validate(double rate_hz) const;
};

/// Ground-truth activation of the protocol at time t (seconds from start).
double envelope_at(const ProtocolSpec& spec, double t_s);

struct SyntheticRecording {
  std::vector<EmgFrame> frames;
  /// Ground-truth activation per sample, aligned with the concatenated frames.
  std::vector<double> envelope;
  double sample_rate_hz = 0.0;
};

/// Seeded Gaussian noise, bandpassed to the carrier band and scaled to unit
/// RMS, amplitude-modulated by the protocol envelope. Identical inputs give
/// bit-identical frames.
SyntheticRecording generate_emg(const ProtocolSpec& spec, double rate_hz,
                                std::size_t frame_samples = 20, std::uint8_t channel = 0);

/// Splits a sample vector into consecutive frames starting at seq 0.
std::vector<EmgFrame> frame_samples(const std::vector<float>& samples, double rate_hz,
                                    std::size_t frame_samples, std::uint8_t channel,
                                    std::uint64_t t0_us = 0);

}  // namespace emgpal::harness
