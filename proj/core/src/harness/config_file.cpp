#include "emgpal/harness/config_file.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <set>

#include "emgpal/errors.hpp"

namespace emgpal::harness {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty()) {
    throw ConfigError("config key '" + std::string(key) + "': '" + std::string(v) +
                      "' is not a number");
  }
  return out;
}

template <typename Int>
Int parse_int(std::string_view key, std::string_view v) {
  Int out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty()) {
    throw ConfigError("config key '" + std::string(key) + "': '" + std::string(v) +
                      "' is not an integer");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config key '" + std::string(key) + "': '" + std::string(v) +
                    "' is not a boolean");
}

std::string format_bool(bool b) { return b ? "true" : "false"; }

std::vector<double> parse_list(std::string_view key, std::string_view v) {
  std::vector<double> out;
  if (trim(v).empty()) return out;
  std::size_t pos = 0;
  while (pos <= v.size()) {
    const auto comma = v.find(',', pos);
    const auto item = trim(v.substr(pos, comma == std::string_view::npos ? v.npos : comma - pos));
    out.push_back(parse_double(key, item));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::string format_list(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ',';
    s += format_double(xs[i]);
  }
  return s;
}

struct Setting {
  const char* key;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, std::string_view key, std::string_view)> set;
};

#define EMGPAL_DOUBLE(name, field)                                                    \
  Setting {                                                                           \
    name, [](const ExperimentConfig& c) { return format_double(c.field); },           \
        [](ExperimentConfig& c, std::string_view k, std::string_view v) {             \
          c.field = parse_double(k, v);                                               \
        }                                                                             \
  }
#define EMGPAL_BOOL(name, field)                                                      \
  Setting {                                                                           \
    name, [](const ExperimentConfig& c) { return format_bool(c.field); },             \
        [](ExperimentConfig& c, std::string_view k, std::string_view v) {             \
          c.field = parse_bool(k, v);                                                 \
        }                                                                             \
  }
#define EMGPAL_INT(name, field, type)                                                 \
  Setting {                                                                           \
    name, [](const ExperimentConfig& c) { return std::to_string(c.field); },          \
        [](ExperimentConfig& c, std::string_view k, std::string_view v) {             \
          c.field = parse_int<type>(k, v);                                            \
        }                                                                             \
  }

const std::vector<Setting>& settings() {
  static const std::vector<Setting> table = {
      EMGPAL_INT("seed", seed, std::uint64_t),

      EMGPAL_DOUBLE("dsp.sample_rate_hz", signal.sample_rate_hz),
      EMGPAL_DOUBLE("dsp.band_low_hz", signal.band_low_hz),
      EMGPAL_DOUBLE("dsp.band_high_hz", signal.band_high_hz),
      EMGPAL_INT("dsp.prototype_order", signal.prototype_order, int),
      EMGPAL_DOUBLE("dsp.envelope_window_s", signal.envelope_window_s),
      EMGPAL_DOUBLE("dsp.mvc_value", signal.mvc_value),
      EMGPAL_BOOL("dsp.mvc_from_protocol", mvc_from_protocol),
      EMGPAL_BOOL("dsp.activation_clamp", signal.activation_clamp),
      EMGPAL_BOOL("dsp.detrend_before_filter", signal.detrend_before_filter),

      EMGPAL_DOUBLE("render.p_min_kpa", render.p_min_kpa),
      EMGPAL_DOUBLE("render.p_max_kpa", render.p_max_kpa),
      EMGPAL_DOUBLE("render.k_max_n_per_mm", render.k_max_n_per_mm),
      Setting{"render.mapping",
              [](const ExperimentConfig& c) {
                return std::string(c.render.mapping_shape == render::MappingShape::gamma
                                       ? "gamma"
                                       : "linear");
              },
              [](ExperimentConfig& c, std::string_view k, std::string_view v) {
                if (v == "linear") {
                  c.render.mapping_shape = render::MappingShape::linear;
                } else if (v == "gamma") {
                  c.render.mapping_shape = render::MappingShape::gamma;
                } else {
                  throw ConfigError("config key '" + std::string(k) +
                                    "' must be 'linear' or 'gamma'");
                }
              }},
      EMGPAL_DOUBLE("render.gamma", render.gamma),
      EMGPAL_DOUBLE("render.indentation_mm", indentation_mm),

      EMGPAL_DOUBLE("pid.kp", gains.kp),
      EMGPAL_DOUBLE("pid.ki", gains.ki),
      EMGPAL_DOUBLE("pid.kd", gains.kd),
      EMGPAL_DOUBLE("pid.u_min", gains.u_min),
      EMGPAL_DOUBLE("pid.u_max", gains.u_max),
      EMGPAL_DOUBLE("pid.integrator_limit", gains.integrator_limit),
      EMGPAL_DOUBLE("control.rate_hz", control_rate_hz),

      EMGPAL_DOUBLE("plant.tau_s", plant.tau_s),
      EMGPAL_DOUBLE("plant.delay_s", plant.delay_s),
      EMGPAL_DOUBLE("plant.slew_kpa_per_s", plant.slew_kpa_per_s),
      EMGPAL_DOUBLE("plant.noise_sigma_kpa", plant.noise_sigma_kpa),
      EMGPAL_DOUBLE("plant.p_floor_kpa", plant.p_floor_kpa),
      EMGPAL_DOUBLE("plant.p_ceil_kpa", plant.p_ceil_kpa),

      EMGPAL_BOOL("transport.enabled", use_transport),
      EMGPAL_DOUBLE("transport.delay_ms", impairment.delay_ms),
      EMGPAL_DOUBLE("transport.jitter_ms", impairment.jitter_ms),
      EMGPAL_DOUBLE("transport.drop_prob", impairment.drop_prob),
      EMGPAL_BOOL("transport.reorder", impairment.reorder),
      EMGPAL_INT("transport.frame_samples", frame_samples, std::size_t),

      EMGPAL_INT("protocol.n_cycles", protocol.n_cycles, int),
      EMGPAL_DOUBLE("protocol.ramp_s", protocol.ramp_s),
      EMGPAL_DOUBLE("protocol.hold_s", protocol.hold_s),
      EMGPAL_DOUBLE("protocol.rest_s", protocol.rest_s),
      EMGPAL_DOUBLE("protocol.peak_activation", protocol.peak_activation),
      Setting{"protocol.cycle_peaks",
              [](const ExperimentConfig& c) { return format_list(c.protocol.cycle_peaks); },
              [](ExperimentConfig& c, std::string_view k, std::string_view v) {
                c.protocol.cycle_peaks = parse_list(k, v);
              }},
      EMGPAL_DOUBLE("protocol.rest_activation", protocol.rest_activation),
      EMGPAL_DOUBLE("protocol.carrier_low_hz", protocol.carrier_low_hz),
      EMGPAL_DOUBLE("protocol.carrier_high_hz", protocol.carrier_high_hz),
      EMGPAL_DOUBLE("protocol.emg_scale_mv", protocol.emg_scale_mv),

      Setting{"harness.input_csv", [](const ExperimentConfig& c) { return c.input_csv; },
              [](ExperimentConfig& c, std::string_view, std::string_view v) {
                c.input_csv = std::string(v);
              }},
      EMGPAL_INT("harness.input_channel", input_channel, int),
      EMGPAL_DOUBLE("harness.segment_threshold", segment_threshold),

      EMGPAL_DOUBLE("check.rmse_max_kpa", check.rmse_max_kpa),
      EMGPAL_DOUBLE("check.r_mean_min", check.r_mean_min),
      EMGPAL_DOUBLE("check.cycle_r_min", check.cycle_r_min),
      EMGPAL_DOUBLE("check.p_value_max", check.p_value_max),
  };
  return table;
}

#undef EMGPAL_DOUBLE
#undef EMGPAL_BOOL
#undef EMGPAL_INT

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

KeyValues parse_key_values(std::istream& in) {
  KeyValues out;
  std::set<std::string, std::less<>> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const auto key = trim(t.substr(0, eq));
    const auto value = trim(t.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    if (!seen.emplace(key).second) {
      throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" +
                        std::string(key) + "'");
    }
    out.emplace_back(std::string(key), std::string(value));
  }
  return out;
}

void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  for (const auto& s : settings()) {
    if (key == s.key) {
      s.set(cfg, key, value);
      return;
    }
  }
  throw ConfigError("unknown config key '" + std::string(key) + "'");
}

KeyValues describe_config(const ExperimentConfig& cfg) {
  KeyValues out;
  out.reserve(settings().size());
  for (const auto& s : settings()) out.emplace_back(s.key, s.get(cfg));
  return out;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& s : settings()) keys.emplace_back(s.key);
  return keys;
}

ExperimentConfig load_config(const std::filesystem::path* file,
                             const std::vector<std::string>& overrides) {
  ExperimentConfig cfg;
  if (file != nullptr) {
    std::ifstream in(*file);
    if (!in) throw ConfigError("cannot open config file " + file->string());
    for (const auto& [k, v] : parse_key_values(in)) apply_setting(cfg, k, v);
  }
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + o + "' must be key=value");
    apply_setting(cfg, trim(std::string_view(o).substr(0, eq)),
                  trim(std::string_view(o).substr(eq + 1)));
  }
  cfg.validate();
  return cfg;
}

std::string config_hash(const KeyValues& described) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ull;
    }
  };
  for (const auto& [k, v] : described) {
    mix(k);
    mix("=");
    mix(v);
    mix("\n");
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace emgpal::harness
