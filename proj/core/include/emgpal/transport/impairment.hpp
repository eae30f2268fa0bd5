#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <span>
#include <vector>

#include "emgpal/frame.hpp"

namespace emgpal::transport {

struct ImpairmentConfig {
  double delay_ms = 0.0;
  double jitter_ms = 0.0;  // uniform in [-jitter, +jitter)
  double drop_prob = 0.0;
  bool reorder = false;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Seeded delivery schedule. For every offered frame it draws, in this order,
/// one U[0,1) for the drop decision and one U[-1,1) for jitter from a
/// std::mt19937_64 seeded with `seed`; both draws happen even for dropped
/// frames so the schedule only depends on the frame count.
class Impairment {
 public:
  struct Decision {
    bool dropped = false;
    std::int64_t delivery_us = 0;
  };

  explicit Impairment(ImpairmentConfig cfg);

  Decision schedule(std::int64_t send_us);

  /// Smallest delay the schedule can assign (delay - jitter, floored at 0).
  std::int64_t min_latency_us() const;

  const ImpairmentConfig& config() const { return cfg_; }

 private:
  ImpairmentConfig cfg_;
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> drop_draw_{0.0, 1.0};
  std::uniform_real_distribution<double> jitter_draw_{-1.0, 1.0};
  std::int64_t last_delivery_us_ = INT64_MIN;
};

struct LatencyStats {
  std::uint64_t count = 0;
  double mean_ms = 0.0;
  double stddev_ms = 0.0;
  double min_ms = 0.0;
  double max_ms = 0.0;
};

struct ReceiveReport {
  std::uint64_t frames_received = 0;   // decoded successfully
  std::uint64_t frames_delivered = 0;  // handed to the sink
  std::uint64_t frames_dropped = 0;    // by the impairment layer
  std::uint64_t frames_malformed = 0;  // failed to decode
  std::uint64_t frames_reordered = 0;  // delivered after a higher seq
  std::uint64_t gap_count = 0;         // seq numbers never delivered
  std::uint64_t bytes_received = 0;
  LatencyStats latency;
};

/// Receives frames with their delivery time.
using FrameSink = std::function<void(const EmgFrame&, std::int64_t delivery_us)>;

/// Applies an Impairment to frames offered in arrival order and hands them to
/// the sink in delivery order. Keeps the statistics for a ReceiveReport.
class DeliveryScheduler {
 public:
  DeliveryScheduler(ImpairmentConfig cfg, FrameSink sink);

  /// `send_us` is the frame's send time on the scheduler's clock; latency is
  /// measured as delivery time minus `origin_us`.
  void offer(EmgFrame frame, std::int64_t send_us, std::int64_t origin_us);

  /// Delivers frames whose delivery time is <= now_us.
  void release_until(std::int64_t now_us);

  /// Earliest pending delivery time, if any.
  std::optional<std::int64_t> next_delivery() const;

  void flush();

  /// Fills dropped/delivered/reordered/gap/latency fields.
  void finish(ReceiveReport& report) const;

 private:
  struct Pending {
    std::int64_t delivery_us;
    std::uint64_t arrival;
    std::int64_t origin_us;
    EmgFrame frame;
  };
  struct Later {
    bool operator()(const Pending& a, const Pending& b) const {
      return a.delivery_us != b.delivery_us ? a.delivery_us > b.delivery_us
                                            : a.arrival > b.arrival;
    }
  };
  struct ChannelSeqs {
    std::uint64_t lo = UINT64_MAX;
    std::uint64_t hi = 0;
    std::uint64_t delivered = 0;
    std::uint64_t highest_delivered = 0;
    bool any = false;
  };

  void deliver(const Pending& p);

  Impairment impairment_;
  FrameSink sink_;
  std::priority_queue<Pending, std::vector<Pending>, Later> pending_;
  std::uint64_t arrivals_ = 0;
  std::uint64_t dropped_ = 0;
  std::uint64_t delivered_ = 0;
  std::uint64_t reordered_ = 0;
  std::map<std::uint8_t, ChannelSeqs> seqs_;
  std::vector<double> latencies_ms_;
};

/// In-process link with a simulated clock: each frame is encoded, decoded and
/// scheduled as if sent at its own t_start_us. Drops, jitter and reordering
/// follow the seeded Impairment exactly as the socket receiver would apply them.
ReceiveReport simulate_link(std::span<const EmgFrame> frames, const ImpairmentConfig& cfg,
                            const FrameSink& sink);

LatencyStats summarize_latency(std::span<const double> latencies_ms);

}  // namespace emgpal::transport
