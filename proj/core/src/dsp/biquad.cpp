#include "emgpal/dsp/biquad.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace emgpal::dsp {

bool BiquadSection::is_stable() const {
  // Jury conditions for z^2 + a1 z + a2.
  return std::abs(a2) < 1.0 && std::abs(a1) < 1.0 + a2;
}

BiquadCascade::BiquadCascade(std::vector<BiquadSection> sections)
    : sections_(std::move(sections)), state_(sections_.size(), {0.0, 0.0}) {}

double BiquadCascade::process(double x) {
  for (std::size_t i = 0; i < sections_.size(); ++i) {
    const auto& s = sections_[i];
    auto& w = state_[i];
    const double y = s.b0 * x + w[0];
    w[0] = s.b1 * x - s.a1 * y + w[1];
    w[1] = s.b2 * x - s.a2 * y;
    x = y;
  }
  return x;
}

void BiquadCascade::reset() {
  std::fill(state_.begin(), state_.end(), std::array<double, 2>{0.0, 0.0});
}

bool BiquadCascade::is_stable() const {
  return std::all_of(sections_.begin(), sections_.end(),
                     [](const BiquadSection& s) { return s.is_stable(); });
}

bool BiquadCascade::state_is_zero() const {
  return std::all_of(state_.begin(), state_.end(),
                     [](const auto& w) { return w[0] == 0.0 && w[1] == 0.0; });
}

std::complex<double> BiquadCascade::response(double freq_hz, double sample_rate_hz) const {
  const double omega = 2.0 * std::numbers::pi * freq_hz / sample_rate_hz;
  const std::complex<double> zinv = std::polar(1.0, -omega);
  const std::complex<double> zinv2 = zinv * zinv;
  std::complex<double> h{1.0, 0.0};
  for (const auto& s : sections_) {
    h *= (s.b0 + s.b1 * zinv + s.b2 * zinv2) / (1.0 + s.a1 * zinv + s.a2 * zinv2);
  }
  return h;
}

std::vector<double> filter_stream(BiquadCascade& cascade, std::span<const double> x) {
  std::vector<double> y(x.size());
  std::transform(x.begin(), x.end(), y.begin(), [&](double v) { return cascade.process(v); });
  return y;
}

}  // namespace emgpal::dsp
