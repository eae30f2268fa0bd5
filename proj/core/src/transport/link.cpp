#include "emgpal/transport/link.hpp"

#include <array>
#include <chrono>
#include <optional>
#include <thread>
#include <variant>

#include "emgpal/log.hpp"
#include "emgpal/transport/bounded_queue.hpp"
#include "emgpal/transport/codec.hpp"

namespace emgpal::transport {
namespace {

using SteadyClock = std::chrono::steady_clock;

struct Arrival {
  std::variant<EmgFrame, DecodeFailure> payload;
  std::int64_t arrival_us = 0;
  std::size_t bytes = 0;
};

std::int64_t micros_since(SteadyClock::time_point start) {
  return std::chrono::duration_cast<std::chrono::microseconds>(SteadyClock::now() - start).count();
}

}  // namespace

SendReport run_sender(std::span<const EmgFrame> source, const Endpoint& endpoint, Pacing pacing) {
  SendReport report;
  TcpStream stream;
  try {
    stream = TcpStream::connect(endpoint);
  } catch (const TransportError& e) {
    throw SendError(e.what(), report);
  }

  const auto start = SteadyClock::now();
  const std::uint64_t t0 = source.empty() ? 0 : source.front().t_start_us;
  try {
    for (const auto& frame : source) {
      if (pacing == Pacing::realtime) {
        const auto offset = std::chrono::microseconds(frame.t_start_us - t0);
        std::this_thread::sleep_until(start + offset);
      }
      const auto wire = length_prefixed(encode_frame(frame));
      stream.write_all(wire);
      ++report.frames_sent;
      report.bytes_sent += wire.size();
    }
    stream.shutdown_write();
    // Wait for the receiver to finish reading and close its end.
    std::array<std::uint8_t, 64> sink{};
    while (stream.read_some(sink) > 0) {
    }
  } catch (const TransportError& e) {
    throw SendError(e.what(), report);
  }
  return report;
}

ReceiveReport run_receiver(TcpListener& listener, const ReceiverOptions& options,
                           const FrameSink& sink) {
  options.impairment.validate();
  TcpStream conn = listener.accept();
  const auto start = SteadyClock::now();

  BoundedQueue<Arrival> queue(options.queue_capacity);
  std::optional<std::string> reader_error;
  bool stream_aborted = false;

  std::thread reader([&] {
    StreamParser parser;
    std::vector<std::uint8_t> buf(64 * 1024);
    try {
      for (;;) {
        const auto n = conn.read_some(buf);
        if (n == 0) break;
        parser.feed(std::span(buf).first(n));
        while (auto body = parser.next()) {
          const auto now = micros_since(start);
          const auto size = body->size() + 4;
          if (!queue.push({try_decode_frame(*body), now, size})) return;
        }
      }
      if (parser.buffered() > 0) {
        queue.push({DecodeFailure::truncated, micros_since(start), parser.buffered()});
      }
    } catch (const DecodeError&) {
      stream_aborted = true;
      queue.push({DecodeFailure::invalid_field, micros_since(start), 0});
    } catch (const TransportError& e) {
      reader_error = e.what();
    }
    queue.close();
  });

  ReceiveReport report;
  DeliveryScheduler scheduler(options.impairment, sink);
  const std::int64_t min_latency = Impairment(options.impairment).min_latency_us();
  std::optional<std::int64_t> anchor;

  auto handle = [&](Arrival a) {
    report.bytes_received += a.bytes;
    if (auto* fail = std::get_if<DecodeFailure>(&a.payload)) {
      ++report.frames_malformed;
      log(LogLevel::warn, "skipping malformed frame: " + std::string(to_string(*fail)));
      return;
    }
    ++report.frames_received;
    auto& frame = std::get<EmgFrame>(a.payload);
    const auto t_start = static_cast<std::int64_t>(frame.t_start_us);
    if (options.clock == ClockMode::simulated) {
      scheduler.offer(std::move(frame), t_start, t_start);
      scheduler.release_until(t_start + min_latency - 1);
    } else {
      if (!anchor) anchor = a.arrival_us - t_start;
      scheduler.offer(std::move(frame), a.arrival_us, *anchor + t_start);
    }
  };

  try {
    if (options.clock == ClockMode::simulated) {
      while (auto a = queue.pop()) handle(std::move(*a));
      scheduler.flush();
    } else {
      for (;;) {
        scheduler.release_until(micros_since(start));
        std::optional<Arrival> a;
        if (const auto due = scheduler.next_delivery()) {
          bool timed_out = false;
          a = queue.pop_until(start + std::chrono::microseconds(*due), timed_out);
          if (timed_out) continue;
        } else {
          a = queue.pop();
        }
        if (a) {
          handle(std::move(*a));
        } else if (queue.closed_and_empty()) {
          break;
        }
      }
      while (const auto due = scheduler.next_delivery()) {
        std::this_thread::sleep_until(start + std::chrono::microseconds(*due));
        scheduler.release_until(micros_since(start));
      }
    }

  } catch (...) {
    queue.close();
    conn.interrupt();
    reader.join();
    throw;
  }

  reader.join();
  conn.close();
  scheduler.finish(report);
  if (stream_aborted) log(LogLevel::warn, "corrupt length prefix; stream abandoned");
  if (reader_error) throw TransportError("receive failed: " + *reader_error);
  return report;
}

ReceiveReport run_receiver(const Endpoint& listen, const ReceiverOptions& options,
                           const FrameSink& sink) {
  TcpListener listener(listen);
  return run_receiver(listener, options, sink);
}

}  // namespace emgpal::transport
