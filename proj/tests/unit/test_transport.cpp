#include <gtest/gtest.h>

#include <future>
#include <random>
#include <thread>
#include <vector>

#include "emgpal/errors.hpp"
#include "emgpal/harness/generator.hpp"
#include "emgpal/transport/codec.hpp"
#include "emgpal/transport/impairment.hpp"
#include "emgpal/transport/link.hpp"
#include "emgpal/transport/net.hpp"

using namespace emgpal;
using namespace emgpal::transport;

namespace {

std::vector<EmgFrame> frames(std::size_t n, std::size_t per_frame = 20) {
  std::vector<float> x(n * per_frame);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<float>(i % 97) * 0.01f;
  return harness::frame_samples(x, 2000, per_frame, 0);
}

// Replays the documented draw order: one U[0,1) for drop, one U[-1,1) for jitter.
std::uint64_t expected_drops(std::uint64_t seed, double p, std::size_t n) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> drop(0.0, 1.0);
  std::uniform_real_distribution<double> jitter(-1.0, 1.0);
  std::uint64_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (drop(rng) < p) ++count;
    (void)jitter(rng);
  }
  return count;
}

}  // namespace

TEST(Endpoint, Parse) {
  const auto e = Endpoint::parse("10.1.2.3:8080");
  EXPECT_EQ(e.host, "10.1.2.3");
  EXPECT_EQ(e.port, 8080);
  EXPECT_EQ(e.to_string(), "10.1.2.3:8080");
  EXPECT_THROW(Endpoint::parse("nohost"), ConfigError);
  EXPECT_THROW(Endpoint::parse("h:99999"), ConfigError);
  EXPECT_THROW(Endpoint::parse("h:"), ConfigError);
}

TEST(Impairment, ConstantDelayLatency) {
  ImpairmentConfig cfg;
  cfg.delay_ms = 100;
  const auto report = simulate_link(frames(10000), cfg, nullptr);
  EXPECT_EQ(report.frames_delivered, 10000u);
  EXPECT_NEAR(report.latency.mean_ms, 100.0, 1.0);
  EXPECT_EQ(report.latency.min_ms, 100.0);
  EXPECT_EQ(report.latency.max_ms, 100.0);
}

TEST(Impairment, NoDropsNoGaps) {
  ImpairmentConfig cfg;
  cfg.jitter_ms = 3;
  const auto report = simulate_link(frames(2000), cfg, nullptr);
  EXPECT_EQ(report.gap_count, 0u);
  EXPECT_EQ(report.frames_dropped, 0u);
  EXPECT_EQ(report.frames_reordered, 0u);  // reorder off keeps order
}

TEST(Impairment, DropCountReplaysSeededGenerator) {
  for (std::uint64_t seed : {1u, 7u, 12345u}) {
    ImpairmentConfig cfg;
    cfg.drop_prob = 0.1;
    cfg.jitter_ms = 2;
    cfg.seed = seed;
    std::vector<std::uint64_t> seen;
    const auto report =
        simulate_link(frames(10000), cfg, [&](const EmgFrame& f, std::int64_t) { seen.push_back(f.seq); });
    const auto want = expected_drops(seed, 0.1, 10000);
    EXPECT_EQ(report.frames_dropped, want);
    EXPECT_EQ(report.gap_count, want);
    EXPECT_EQ(report.frames_delivered, 10000u - want);
    EXPECT_EQ(seen.size(), 10000u - want);
  }
}

TEST(Impairment, ReorderWithJitter) {
  ImpairmentConfig cfg;
  cfg.jitter_ms = 20;  // frames are 10 ms apart
  cfg.reorder = true;
  cfg.seed = 5;
  std::vector<std::int64_t> times;
  const auto report =
      simulate_link(frames(1000), cfg, [&](const EmgFrame&, std::int64_t t) { times.push_back(t); });
  EXPECT_GT(report.frames_reordered, 0u);
  EXPECT_TRUE(std::is_sorted(times.begin(), times.end()));  // delivered in time order
  EXPECT_LE(report.latency.max_ms, 20.0);
}

TEST(Impairment, Validation) {
  ImpairmentConfig cfg;
  cfg.drop_prob = 1.5;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = ImpairmentConfig{};
  cfg.delay_ms = -1;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Link, LoopbackTenThousandFrames) {
  TcpListener listener(Endpoint{"127.0.0.1", 0});
  const auto src = frames(10000);
  std::vector<EmgFrame> got;
  auto rx = std::async(std::launch::async, [&] {
    return run_receiver(listener, {}, [&](const EmgFrame& f, std::int64_t) { got.push_back(f); });
  });
  const auto sent = run_sender(src, Endpoint{"127.0.0.1", listener.port()},
                               Pacing::as_fast_as_possible);
  const auto report = rx.get();
  EXPECT_EQ(sent.frames_sent, 10000u);
  EXPECT_EQ(report.frames_received, 10000u);
  EXPECT_EQ(report.frames_delivered, 10000u);
  EXPECT_EQ(report.gap_count, 0u);
  EXPECT_EQ(report.bytes_received, sent.bytes_sent);
  EXPECT_EQ(got, src);
}

TEST(Link, EmptySourceShutsDownCleanly) {
  TcpListener listener(Endpoint{"127.0.0.1", 0});
  auto rx = std::async(std::launch::async, [&] { return run_receiver(listener, {}, nullptr); });
  const auto sent = run_sender({}, Endpoint{"127.0.0.1", listener.port()}, Pacing::realtime);
  const auto report = rx.get();
  EXPECT_EQ(sent.frames_sent, 0u);
  EXPECT_EQ(report.frames_received, 0u);
}

TEST(Link, ReceiverAbsentIsTransportError) {
  std::uint16_t port = 0;
  {
    TcpListener probe(Endpoint{"127.0.0.1", 0});
    port = probe.port();
  }
  EXPECT_THROW(run_sender(frames(3), Endpoint{"127.0.0.1", port}, Pacing::as_fast_as_possible),
               TransportError);
}

TEST(Link, MalformedFramesAreCountedAndSkipped) {
  TcpListener listener(Endpoint{"127.0.0.1", 0});
  auto rx = std::async(std::launch::async, [&] { return run_receiver(listener, {}, nullptr); });
  auto stream = TcpStream::connect(Endpoint{"127.0.0.1", listener.port()});
  const auto src = frames(5);
  for (std::size_t i = 0; i < src.size(); ++i) {
    auto body = encode_frame(src[i]);
    if (i == 2) body[kHeaderBytes] ^= 0x01;
    stream.write_all(length_prefixed(body));
  }
  stream.shutdown_write();
  const auto report = rx.get();
  EXPECT_EQ(report.frames_malformed, 1u);
  EXPECT_EQ(report.frames_received, 4u);
  EXPECT_EQ(report.gap_count, 1u);
}

TEST(Link, ImpairedLoopbackMatchesSimulatedLink) {
  ImpairmentConfig cfg;
  cfg.delay_ms = 100;
  cfg.drop_prob = 0.1;
  cfg.seed = 77;
  const auto src = frames(3000);
  TcpListener listener(Endpoint{"127.0.0.1", 0});
  ReceiverOptions opt;
  opt.impairment = cfg;
  auto rx = std::async(std::launch::async, [&] { return run_receiver(listener, opt, nullptr); });
  run_sender(src, Endpoint{"127.0.0.1", listener.port()}, Pacing::as_fast_as_possible);
  const auto net = rx.get();
  const auto sim = simulate_link(src, cfg, nullptr);
  EXPECT_EQ(net.frames_dropped, sim.frames_dropped);
  EXPECT_EQ(net.frames_delivered, sim.frames_delivered);
  EXPECT_NEAR(net.latency.mean_ms, 100.0, 1.0);
}
