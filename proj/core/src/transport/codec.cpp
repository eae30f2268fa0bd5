#include "emgpal/transport/codec.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <string>

#include "emgpal/errors.hpp"

namespace emgpal::transport {
namespace {

constexpr std::array<std::uint8_t, 4> kMagic{'E', 'M', 'G', 'P'};

template <typename T>
void put_be(std::vector<std::uint8_t>& out, T v) {
  for (int i = sizeof(T) - 1; i >= 0; --i) {
    out.push_back(static_cast<std::uint8_t>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xFF));
  }
}

template <typename T>
T get_be(std::span<const std::uint8_t> b, std::size_t off) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v = (v << 8) | b[off + i];
  return static_cast<T>(v);
}

void put_f32_le(std::vector<std::uint8_t>& out, float f) {
  const auto bits = std::bit_cast<std::uint32_t>(f);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((bits >> (8 * i)) & 0xFF));
}

float get_f32_le(std::span<const std::uint8_t> b, std::size_t off) {
  std::uint32_t bits = 0;
  for (int i = 3; i >= 0; --i) bits = (bits << 8) | b[off + static_cast<std::size_t>(i)];
  return std::bit_cast<float>(bits);
}

}  // namespace

std::string_view to_string(DecodeFailure f) {
  switch (f) {
    case DecodeFailure::truncated: return "truncated";
    case DecodeFailure::bad_magic: return "bad magic";
    case DecodeFailure::unsupported_version: return "unsupported version";
    case DecodeFailure::trailing_bytes: return "trailing bytes";
    case DecodeFailure::crc_mismatch: return "crc mismatch";
    case DecodeFailure::invalid_field: return "invalid field";
  }
  return "unknown";
}

DecodeError::DecodeError(DecodeFailure f)
    : std::runtime_error("frame decode failed: " + std::string(to_string(f))), failure_(f) {}

std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  // zlib takes a uInt length; feed in bounded pieces.
  std::size_t off = 0;
  while (off < bytes.size()) {
    const auto n = static_cast<uInt>(std::min<std::size_t>(bytes.size() - off, 1u << 30));
    crc = ::crc32(crc, bytes.data() + off, n);
    off += n;
  }
  return static_cast<std::uint32_t>(crc);
}

std::vector<std::uint8_t> encode_frame(const EmgFrame& frame) {
  if (frame.samples.size() > kMaxSamples) {
    throw ArgumentError("frame has " + std::to_string(frame.samples.size()) +
                        " samples; the wire format carries at most 65535");
  }
  const double mhz = std::round(frame.sample_rate_hz * 1000.0);
  if (!(mhz >= 1.0) || mhz > 4294967295.0) {
    throw ArgumentError("sample rate " + std::to_string(frame.sample_rate_hz) +
                        " Hz is not representable on the wire");
  }

  std::vector<std::uint8_t> out;
  out.reserve(encoded_size(frame.samples.size()));
  for (auto c : kMagic) out.push_back(c);
  out.push_back(kWireVersion);
  out.push_back(frame.channel_id);
  put_be<std::uint16_t>(out, frame.flags);
  put_be<std::uint64_t>(out, frame.seq);
  put_be<std::uint64_t>(out, frame.t_start_us);
  put_be<std::uint32_t>(out, static_cast<std::uint32_t>(mhz));
  put_be<std::uint16_t>(out, static_cast<std::uint16_t>(frame.samples.size()));
  for (float s : frame.samples) put_f32_le(out, s);
  put_be<std::uint32_t>(out, crc32(out));
  return out;
}

std::variant<EmgFrame, DecodeFailure> try_decode_frame(std::span<const std::uint8_t> b) {
  if (b.size() < kMagic.size()) return DecodeFailure::truncated;
  if (!std::equal(kMagic.begin(), kMagic.end(), b.begin())) return DecodeFailure::bad_magic;
  if (b.size() < 5) return DecodeFailure::truncated;
  if (b[4] != kWireVersion) return DecodeFailure::unsupported_version;
  if (b.size() < kHeaderBytes) return DecodeFailure::truncated;

  const auto n = get_be<std::uint16_t>(b, 28);
  const std::size_t expected = encoded_size(n);
  if (b.size() < expected) return DecodeFailure::truncated;
  if (b.size() > expected) return DecodeFailure::trailing_bytes;

  const auto body = b.first(expected - kCrcBytes);
  if (crc32(body) != get_be<std::uint32_t>(b, expected - kCrcBytes)) {
    return DecodeFailure::crc_mismatch;
  }

  const auto mhz = get_be<std::uint32_t>(b, 24);
  if (mhz == 0) return DecodeFailure::invalid_field;

  EmgFrame f;
  f.channel_id = b[5];
  f.flags = get_be<std::uint16_t>(b, 6);
  f.seq = get_be<std::uint64_t>(b, 8);
  f.t_start_us = get_be<std::uint64_t>(b, 16);
  f.sample_rate_hz = static_cast<double>(mhz) / 1000.0;
  f.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) f.samples[i] = get_f32_le(b, kHeaderBytes + 4 * i);
  return f;
}

EmgFrame decode_frame(std::span<const std::uint8_t> bytes) {
  auto r = try_decode_frame(bytes);
  if (auto* fail = std::get_if<DecodeFailure>(&r)) throw DecodeError(*fail);
  return std::get<EmgFrame>(std::move(r));
}

std::vector<std::uint8_t> length_prefixed(std::span<const std::uint8_t> frame_bytes) {
  std::vector<std::uint8_t> out;
  out.reserve(frame_bytes.size() + 4);
  put_be<std::uint32_t>(out, static_cast<std::uint32_t>(frame_bytes.size()));
  out.insert(out.end(), frame_bytes.begin(), frame_bytes.end());
  return out;
}

void StreamParser::feed(std::span<const std::uint8_t> bytes) {
  if (pos_ > 0 && pos_ >= buf_.size() / 2) {
    buf_.erase(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(pos_));
    pos_ = 0;
  }
  buf_.insert(buf_.end(), bytes.begin(), bytes.end());
}

std::optional<std::vector<std::uint8_t>> StreamParser::next() {
  if (buffered() < 4) return std::nullopt;
  const std::span<const std::uint8_t> view(buf_.data() + pos_, buffered());
  const auto len = get_be<std::uint32_t>(view, 0);
  if (len < kMinFrameBytes || len > kMaxFrameBytes) throw DecodeError(DecodeFailure::invalid_field);
  if (view.size() < 4 + static_cast<std::size_t>(len)) return std::nullopt;
  std::vector<std::uint8_t> frame(view.begin() + 4, view.begin() + 4 + len);
  pos_ += 4 + len;
  return frame;
}

}  // namespace emgpal::transport
