#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <variant>
#include <vector>

#include "emgpal/frame.hpp"

namespace emgpal::transport {

// Wire layout of one frame (header integers big-endian, payload little-endian):
//
//   off  size  field
//     0     4  magic "EMGP"
//     4     1  version (1)
//     5     1  channel_id
//     6     2  flags
//     8     8  seq
//    16     8  t_start_us
//    24     4  sample rate in millihertz
//    28     2  n_samples
//    30   4*n  samples, IEEE-754 binary32
//  30+4n    4  CRC-32 (IEEE) over every preceding byte

inline constexpr std::uint8_t kWireVersion = 1;
inline constexpr std::size_t kHeaderBytes = 30;
inline constexpr std::size_t kCrcBytes = 4;
inline constexpr std::size_t kMinFrameBytes = kHeaderBytes + kCrcBytes;
inline constexpr std::size_t kMaxSamples = 65535;
inline constexpr std::size_t kMaxFrameBytes = kMinFrameBytes + 4 * kMaxSamples;

constexpr std::size_t encoded_size(std::size_t n_samples) {
  return kMinFrameBytes + 4 * n_samples;
}

enum class DecodeFailure {
  truncated,
  bad_magic,
  unsupported_version,
  trailing_bytes,
  crc_mismatch,
  invalid_field,
};

std::string_view to_string(DecodeFailure f);

/// Throws ArgumentError for more than 65535 samples or a sample rate that is
/// not a positive whole number of millihertz within 32 bits.
std::vector<std::uint8_t> encode_frame(const EmgFrame& frame);

/// Never throws on malformed input; every buffer yields a frame or exactly
/// one failure.
std::variant<EmgFrame, DecodeFailure> try_decode_frame(std::span<const std::uint8_t> bytes);

/// Throwing form of `try_decode_frame`.
EmgFrame decode_frame(std::span<const std::uint8_t> bytes);

/// CRC-32 (IEEE 802.3, reflected, as used by zlib and Ethernet).
std::uint32_t crc32(std::span<const std::uint8_t> bytes);

class DecodeError : public std::runtime_error {
 public:
  explicit DecodeError(DecodeFailure f);
  DecodeFailure failure() const noexcept { return failure_; }

 private:
  DecodeFailure failure_;
};

// Stream framing: each frame travels behind a 4-byte big-endian length prefix.

std::vector<std::uint8_t> length_prefixed(std::span<const std::uint8_t> frame_bytes);

/// Incremental splitter for a length-prefixed byte stream.
class StreamParser {
 public:
  void feed(std::span<const std::uint8_t> bytes);

  /// Next complete frame body, or nullopt if more bytes are needed.
  /// Throws DecodeError(invalid_field) if a length prefix is outside the
  /// possible frame sizes; the stream cannot be resynchronized after that.
  std::optional<std::vector<std::uint8_t>> next();

  std::size_t buffered() const { return buf_.size() - pos_; }

 private:
  std::vector<std::uint8_t> buf_;
  std::size_t pos_ = 0;
};

}  // namespace emgpal::transport
