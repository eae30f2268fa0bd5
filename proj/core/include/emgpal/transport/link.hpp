#pragma once

#include <cstdint>
#include <span>

#include "emgpal/errors.hpp"
#include "emgpal/frame.hpp"
#include "emgpal/transport/impairment.hpp"
#include "emgpal/transport/net.hpp"

namespace emgpal::transport {

enum class Pacing { realtime, as_fast_as_possible };

/// simulated: each frame counts as sent at its embedded t_start_us, so
/// latency is exactly what the impairment layer adds.
/// wall: frames are held until the steady clock reaches their delivery time;
/// latency is measured against the first frame's arrival as anchor.
enum class ClockMode { simulated, wall };

struct SendReport {
  std::uint64_t frames_sent = 0;
  std::uint64_t bytes_sent = 0;
};

/// Transport failure that still carries what was sent before it.
class SendError : public TransportError {
 public:
  SendError(const std::string& what, SendReport partial)
      : TransportError(what), partial_(partial) {}
  const SendReport& partial() const noexcept { return partial_; }

 private:
  SendReport partial_;
};

/// Connects, streams every frame in order (length-prefixed), then shuts down
/// the write side and waits for the receiver to close. Real-time pacing spaces
/// frames by their t_start_us. Throws SendError.
SendReport run_sender(std::span<const EmgFrame> source, const Endpoint& endpoint, Pacing pacing);

struct ReceiverOptions {
  ImpairmentConfig impairment;
  ClockMode clock = ClockMode::simulated;
  std::size_t queue_capacity = 1024;
};

/// Accepts one connection and receives until the peer closes. Malformed frames
/// are logged, counted and skipped; a corrupt length prefix ends the stream.
/// Throws TransportError if the connection fails mid-stream.
ReceiveReport run_receiver(TcpListener& listener, const ReceiverOptions& options,
                           const FrameSink& sink);

ReceiveReport run_receiver(const Endpoint& listen, const ReceiverOptions& options,
                           const FrameSink& sink);

}  // namespace emgpal::transport
