#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include "emgpal/frame.hpp"

namespace emgpal::io {

/// One row of `t_us,channel,value_mv`.
struct EmgSample {
  std::int64_t t_us = 0;
  std::uint8_t channel = 0;
  float value_mv = 0.0f;
};

/// Reads the CSV recording format. The header must be exactly
/// `t_us,channel,value_mv`; timestamps must strictly increase within each
/// channel. Throws ArgumentError naming the offending line.
std::vector<EmgSample> read_emg_csv(std::istream& in);
std::vector<EmgSample> read_emg_csv(const std::filesystem::path& path);

void write_emg_csv(std::ostream& out, std::span<const EmgSample> samples);

/// Groups samples by channel and cuts each channel into frames of
/// `frame_samples`. Every sample's timestamp must sit within one sample period
/// of the time implied by its index at `sample_rate_hz`.
std::map<std::uint8_t, std::vector<EmgFrame>> frames_from_samples(
    std::span<const EmgSample> samples, double sample_rate_hz, std::size_t frame_samples);

/// Flattens frames back into rows; per-sample times are derived from
/// t_start_us and the frame rate.
std::vector<EmgSample> samples_from_frames(std::span<const EmgFrame> frames);

}  // namespace emgpal::io
