#pragma once

#include <cstdint>
#include <vector>

namespace emgpal {

/// Timestamped batch of raw EMG samples from one channel. This is the unit
/// that goes over the wire and in and out of capture files.
struct EmgFrame {
  std::uint8_t channel_id = 0;
  std::uint16_t flags = 0;
  std::uint64_t seq = 0;
  std::uint64_t t_start_us = 0;
  double sample_rate_hz = 0.0;
  std::vector<float> samples;  // millivolts

  /// Duration covered by the samples, in microseconds (rounded).
  std::uint64_t duration_us() const;

  friend bool operator==(const EmgFrame&, const EmgFrame&) = default;
};

}  // namespace emgpal
