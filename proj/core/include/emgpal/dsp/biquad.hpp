#pragma once

#include <array>
#include <complex>
#include <span>
#include <vector>

namespace emgpal::dsp {

/// One second-order section, H(z) = (b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2).
struct BiquadSection {
  double b0 = 1.0;
  double b1 = 0.0;
  double b2 = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;

  /// Both poles strictly inside the unit circle.
  bool is_stable() const;
};

/// Cascade of second-order sections with persistent per-section state
/// (transposed direct form II). Single owner; not safe for concurrent use.
class BiquadCascade {
 public:
  BiquadCascade() = default;
  explicit BiquadCascade(std::vector<BiquadSection> sections);

  std::span<const BiquadSection> sections() const { return sections_; }
  std::size_t size() const { return sections_.size(); }

  double process(double x);
  void reset();

  bool is_stable() const;
  bool state_is_zero() const;

  /// Transfer function evaluated at e^{j 2 pi f / fs}.
  std::complex<double> response(double freq_hz, double sample_rate_hz) const;

 private:
  std::vector<BiquadSection> sections_;
  std::vector<std::array<double, 2>> state_;
};

/// Causal sample-by-sample evaluation. The cascade keeps its state between
/// calls, so consecutive chunks behave like one long signal.
std::vector<double> filter_stream(BiquadCascade& cascade, std::span<const double> x);

}  // namespace emgpal::dsp
