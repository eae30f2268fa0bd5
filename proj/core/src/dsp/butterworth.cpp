#include "emgpal/dsp/butterworth.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "emgpal/errors.hpp"

namespace emgpal::dsp {
namespace {

using cplx = std::complex<double>;

BiquadSection section_from_pole(cplx s_pole, double two_fs) {
  // Bilinear map s -> z, numerator zeros at z = +1 and z = -1.
  const cplx z = (two_fs + s_pole) / (two_fs - s_pole);
  BiquadSection sec;
  sec.b0 = 1.0;
  sec.b1 = 0.0;
  sec.b2 = -1.0;
  sec.a1 = -2.0 * z.real();
  sec.a2 = std::norm(z);
  return sec;
}

}  // namespace

BiquadCascade design_bandpass(double sample_rate_hz, double band_low_hz, double band_high_hz,
                              int prototype_order) {
  SignalConfig probe;
  probe.sample_rate_hz = sample_rate_hz;
  probe.band_low_hz = band_low_hz;
  probe.band_high_hz = band_high_hz;
  probe.prototype_order = prototype_order;
  probe.validate();

  const double two_fs = 2.0 * sample_rate_hz;
  const double w_low = two_fs * std::tan(std::numbers::pi * band_low_hz / sample_rate_hz);
  const double w_high = two_fs * std::tan(std::numbers::pi * band_high_hz / sample_rate_hz);
  const double w0_sq = w_low * w_high;
  const double bw = w_high - w_low;

  std::vector<BiquadSection> sections;
  sections.reserve(static_cast<std::size_t>(prototype_order));
  const int n = prototype_order;
  for (int k = 0; k < n / 2; ++k) {
    // Upper half-plane prototype pole; its conjugate is covered by the
    // conjugate-pair biquads below.
    const double theta = std::numbers::pi * (2.0 * k + n + 1.0) / (2.0 * n);
    const cplx p = std::polar(1.0, theta) * bw;
    const cplx disc = std::sqrt(p * p - 4.0 * w0_sq);
    sections.push_back(section_from_pole((p + disc) / 2.0, two_fs));
    sections.push_back(section_from_pole((p - disc) / 2.0, two_fs));
  }

  BiquadCascade unit(sections);
  const double w0_digital_hz =
      sample_rate_hz / std::numbers::pi * std::atan(std::sqrt(w0_sq) / two_fs);
  const double gain = std::abs(unit.response(w0_digital_hz, sample_rate_hz));
  const double per_section = std::pow(1.0 / gain, 1.0 / static_cast<double>(n));
  for (auto& s : sections) {
    s.b0 *= per_section;
    s.b1 *= per_section;
    s.b2 *= per_section;
  }
  return BiquadCascade(std::move(sections));
}

}  // namespace emgpal::dsp
