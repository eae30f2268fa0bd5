#include "emgpal/io/emg_csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "emgpal/errors.hpp"
#include "emgpal/harness/generator.hpp"

namespace emgpal::io {
namespace {

constexpr std::string_view kHeader = "t_us,channel,value_mv";

template <typename T>
bool parse_field(std::string_view text, T& out) {
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size() && !text.empty();
}

}  // namespace

std::vector<EmgSample> read_emg_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ArgumentError("EMG CSV: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader) {
    throw ArgumentError("EMG CSV: header must be '" + std::string(kHeader) + "', got '" + line +
                        "'");
  }

  std::vector<EmgSample> rows;
  std::map<std::uint8_t, std::int64_t> last_t;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string_view v(line);
    const auto c1 = v.find(',');
    const auto c2 = c1 == v.npos ? v.npos : v.find(',', c1 + 1);
    if (c2 == v.npos || v.find(',', c2 + 1) != v.npos) {
      throw ArgumentError("EMG CSV line " + std::to_string(lineno) + ": expected 3 fields");
    }
    EmgSample s;
    unsigned channel = 0;
    if (!parse_field(v.substr(0, c1), s.t_us) ||
        !parse_field(v.substr(c1 + 1, c2 - c1 - 1), channel) || channel > 255 ||
        !parse_field(v.substr(c2 + 1), s.value_mv)) {
      throw ArgumentError("EMG CSV line " + std::to_string(lineno) + ": malformed field");
    }
    s.channel = static_cast<std::uint8_t>(channel);
    if (const auto it = last_t.find(s.channel); it != last_t.end() && s.t_us <= it->second) {
      throw ArgumentError("EMG CSV line " + std::to_string(lineno) + ": t_us not increasing on channel " +
                          std::to_string(channel));
    }
    last_t[s.channel] = s.t_us;
    rows.push_back(s);
  }
  return rows;
}

std::vector<EmgSample> read_emg_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open " + path.string());
  return read_emg_csv(in);
}

void write_emg_csv(std::ostream& out, std::span<const EmgSample> samples) {
  out << kHeader << '\n';
  char buf[64];
  for (const auto& s : samples) {
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), s.value_mv);
    out << s.t_us << ',' << static_cast<unsigned>(s.channel) << ','
        << std::string_view(buf, static_cast<std::size_t>(ptr - buf)) << '\n';
  }
}

std::map<std::uint8_t, std::vector<EmgFrame>> frames_from_samples(
    std::span<const EmgSample> samples, double sample_rate_hz, std::size_t frame_samples) {
  if (!(sample_rate_hz > 0.0)) throw ArgumentError("sample rate must be positive");
  std::map<std::uint8_t, std::vector<float>> values;
  std::map<std::uint8_t, std::int64_t> t0;
  const double period_us = 1e6 / sample_rate_hz;
  for (const auto& s : samples) {
    auto& v = values[s.channel];
    if (v.empty()) t0[s.channel] = s.t_us;
    const double expected = static_cast<double>(t0[s.channel]) +
                            static_cast<double>(v.size()) * period_us;
    if (std::abs(static_cast<double>(s.t_us) - expected) > period_us) {
      throw ArgumentError("EMG CSV: channel " + std::to_string(s.channel) + " sample at " +
                          std::to_string(s.t_us) + " us is off the " +
                          std::to_string(sample_rate_hz) + " Hz grid (missing samples?)");
    }
    v.push_back(s.value_mv);
  }
  std::map<std::uint8_t, std::vector<EmgFrame>> out;
  for (const auto& [channel, v] : values) {
    if (t0[channel] < 0) throw ArgumentError("EMG CSV: negative timestamps are not supported");
    out[channel] = harness::frame_samples(v, sample_rate_hz, frame_samples, channel,
                                          static_cast<std::uint64_t>(t0[channel]));
  }
  return out;
}

std::vector<EmgSample> samples_from_frames(std::span<const EmgFrame> frames) {
  std::vector<EmgSample> out;
  for (const auto& f : frames) {
    for (std::size_t i = 0; i < f.samples.size(); ++i) {
      const auto dt = std::llround(static_cast<double>(i) * 1e6 / f.sample_rate_hz);
      out.push_back({static_cast<std::int64_t>(f.t_start_us) + dt, f.channel_id, f.samples[i]});
    }
  }
  return out;
}

}  // namespace emgpal::io
