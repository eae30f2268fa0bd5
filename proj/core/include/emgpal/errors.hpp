#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace emgpal {

/// Invalid configuration value or combination (bad band edges, odd order, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A call-site precondition was violated (empty input, negative indentation, ...).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A frame sequence has a hole in it. `missing_seq` is the first absent sequence number.
class StreamIntegrityError : public std::runtime_error {
 public:
  StreamIntegrityError(std::uint8_t channel, std::uint64_t missing_seq)
      : std::runtime_error("stream integrity: channel " + std::to_string(channel) +
                           " missing seq " + std::to_string(missing_seq)),
        channel_(channel),
        missing_seq_(missing_seq) {}

  std::uint8_t channel() const noexcept { return channel_; }
  std::uint64_t missing_seq() const noexcept { return missing_seq_; }

 private:
  std::uint8_t channel_;
  std::uint64_t missing_seq_;
};

/// Pearson correlation requested on a constant sequence.
class UndefinedCorrelationError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Socket level failure: refused, reset, unresolvable endpoint.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Wraps an error raised inside one stage of an experiment run.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace emgpal
