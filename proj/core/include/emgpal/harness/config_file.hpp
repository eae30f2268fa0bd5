#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "emgpal/harness/experiment.hpp"

namespace emgpal::harness {

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Parses `key = value` lines. Blank lines and lines starting with '#' are
/// ignored. Throws ConfigError (with the line number) on malformed lines or
/// duplicate keys.
KeyValues parse_key_values(std::istream& in);

/// Throws ConfigError for unknown keys or unparsable values.
void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value);

/// Every key with its current value, in a fixed order. Numbers use the
/// shortest text that reads back to the same double.
KeyValues describe_config(const ExperimentConfig& cfg);

/// Names of all accepted keys.
std::vector<std::string> config_keys();

/// Defaults, then the file (if given), then `key=value` overrides.
ExperimentConfig load_config(const std::filesystem::path* file,
                             const std::vector<std::string>& overrides);

/// 64-bit FNV-1a of the described config, as 16 hex digits.
std::string config_hash(const KeyValues& described);

std::string format_double(double v);

}  // namespace emgpal::harness
