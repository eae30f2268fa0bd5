#include "emgpal/dsp/signal_config.hpp"

#include <cmath>
#include <string>

#include "emgpal/errors.hpp"

namespace emgpal::dsp {

void SignalConfig::validate() const {
  if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz)) {
    throw ConfigError("sample_rate_hz must be positive");
  }
  if (!(band_low_hz > 0.0)) throw ConfigError("band_low_hz must be positive");
  if (!(band_low_hz < band_high_hz)) throw ConfigError("band_low_hz must be below band_high_hz");
  if (!(band_high_hz < sample_rate_hz / 2.0)) {
    throw ConfigError("band_high_hz " + std::to_string(band_high_hz) +
                      " must be below Nyquist " + std::to_string(sample_rate_hz / 2.0));
  }
  if (prototype_order <= 0 || prototype_order % 2 != 0) {
    throw ConfigError("prototype_order must be a positive even integer");
  }
  if (!(envelope_window_s > 0.0) || envelope_window_s * sample_rate_hz < 1.0) {
    throw ConfigError("envelope window must cover at least one sample");
  }
  if (!(mvc_value > 0.0) || !std::isfinite(mvc_value)) {
    throw ConfigError("mvc_value must be positive");
  }
}

std::size_t SignalConfig::envelope_window_samples() const {
  const auto n = std::llround(envelope_window_s * sample_rate_hz);
  return n < 1 ? std::size_t{1} : static_cast<std::size_t>(n);
}

}  // namespace emgpal::dsp
