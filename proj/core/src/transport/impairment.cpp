#include "emgpal/transport/impairment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "emgpal/errors.hpp"
#include "emgpal/transport/codec.hpp"

namespace emgpal::transport {

void ImpairmentConfig::validate() const {
  if (!(delay_ms >= 0.0) || !std::isfinite(delay_ms)) throw ConfigError("delay_ms must be >= 0");
  if (!(jitter_ms >= 0.0) || !std::isfinite(jitter_ms)) {
    throw ConfigError("jitter_ms must be >= 0");
  }
  if (!(drop_prob >= 0.0 && drop_prob < 1.0)) throw ConfigError("drop_prob must lie in [0, 1)");
}

Impairment::Impairment(ImpairmentConfig cfg) : cfg_((cfg.validate(), cfg)), rng_(cfg_.seed) {}

Impairment::Decision Impairment::schedule(std::int64_t send_us) {
  const double drop_u = drop_draw_(rng_);
  const double jitter_u = jitter_draw_(rng_);
  Decision d;
  d.dropped = drop_u < cfg_.drop_prob;
  const double lag_ms = std::max(0.0, cfg_.delay_ms + cfg_.jitter_ms * jitter_u);
  d.delivery_us = send_us + std::llround(lag_ms * 1000.0);
  if (!d.dropped && !cfg_.reorder) {
    d.delivery_us = std::max(d.delivery_us, last_delivery_us_);
    last_delivery_us_ = d.delivery_us;
  }
  return d;
}

std::int64_t Impairment::min_latency_us() const {
  return std::llround(std::max(0.0, cfg_.delay_ms - cfg_.jitter_ms) * 1000.0);
}

DeliveryScheduler::DeliveryScheduler(ImpairmentConfig cfg, FrameSink sink)
    : impairment_(cfg), sink_(std::move(sink)) {}

void DeliveryScheduler::offer(EmgFrame frame, std::int64_t send_us, std::int64_t origin_us) {
  const auto d = impairment_.schedule(send_us);
  const auto arrival = arrivals_++;
  auto& ch = seqs_[frame.channel_id];
  ch.lo = std::min(ch.lo, frame.seq);
  ch.hi = std::max(ch.hi, frame.seq);
  if (d.dropped) {
    ++dropped_;
    return;
  }
  pending_.push({d.delivery_us, arrival, origin_us, std::move(frame)});
}

void DeliveryScheduler::deliver(const Pending& p) {
  auto& ch = seqs_[p.frame.channel_id];
  if (ch.any && p.frame.seq < ch.highest_delivered) ++reordered_;
  ch.highest_delivered = ch.any ? std::max(ch.highest_delivered, p.frame.seq) : p.frame.seq;
  ch.any = true;
  ++ch.delivered;
  ++delivered_;
  latencies_ms_.push_back(static_cast<double>(p.delivery_us - p.origin_us) / 1000.0);
  if (sink_) sink_(p.frame, p.delivery_us);
}

void DeliveryScheduler::release_until(std::int64_t now_us) {
  while (!pending_.empty() && pending_.top().delivery_us <= now_us) {
    const Pending p = pending_.top();
    pending_.pop();
    deliver(p);
  }
}

std::optional<std::int64_t> DeliveryScheduler::next_delivery() const {
  if (pending_.empty()) return std::nullopt;
  return pending_.top().delivery_us;
}

void DeliveryScheduler::flush() { release_until(INT64_MAX); }

void DeliveryScheduler::finish(ReceiveReport& report) const {
  report.frames_dropped = dropped_;
  report.frames_delivered = delivered_;
  report.frames_reordered = reordered_;
  report.gap_count = 0;
  for (const auto& [channel, s] : seqs_) {
    if (s.lo > s.hi) continue;
    report.gap_count += (s.hi - s.lo + 1) - s.delivered;
  }
  report.latency = summarize_latency(latencies_ms_);
}

LatencyStats summarize_latency(std::span<const double> ms) {
  LatencyStats s;
  s.count = ms.size();
  if (ms.empty()) return s;
  s.mean_ms = std::accumulate(ms.begin(), ms.end(), 0.0) / static_cast<double>(ms.size());
  double ss = 0.0;
  for (double v : ms) ss += (v - s.mean_ms) * (v - s.mean_ms);
  s.stddev_ms = ms.size() > 1 ? std::sqrt(ss / static_cast<double>(ms.size() - 1)) : 0.0;
  const auto [lo, hi] = std::minmax_element(ms.begin(), ms.end());
  s.min_ms = *lo;
  s.max_ms = *hi;
  return s;
}

ReceiveReport simulate_link(std::span<const EmgFrame> frames, const ImpairmentConfig& cfg,
                            const FrameSink& sink) {
  ReceiveReport report;
  DeliveryScheduler scheduler(cfg, sink);
  const Impairment probe(cfg);
  const std::int64_t min_latency = probe.min_latency_us();
  for (const auto& f : frames) {
    const auto wire = encode_frame(f);
    report.bytes_received += wire.size() + 4;
    auto decoded = try_decode_frame(wire);
    if (std::holds_alternative<DecodeFailure>(decoded)) {
      ++report.frames_malformed;
      continue;
    }
    ++report.frames_received;
    const auto send_us = static_cast<std::int64_t>(f.t_start_us);
    scheduler.offer(std::get<EmgFrame>(std::move(decoded)), send_us, send_us);
    // Frames offered later are sent no earlier than this one, so nothing can
    // arrive before send_us + min_latency any more.
    scheduler.release_until(send_us + min_latency - 1);
  }
  scheduler.flush();
  scheduler.finish(report);
  return report;
}

}  // namespace emgpal::transport
