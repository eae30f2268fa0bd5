#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "emgpal/errors.hpp"
#include "emgpal/harness/config_file.hpp"

using namespace emgpal;
using namespace emgpal::harness;

TEST(Config, ParseKeyValues) {
  std::istringstream in("# comment\n\n a = 1 \nb=two words\n  # indented comment\nc =\n");
  const auto kv = parse_key_values(in);
  ASSERT_EQ(kv.size(), 3u);
  EXPECT_EQ(kv[0], (std::pair<std::string, std::string>{"a", "1"}));
  EXPECT_EQ(kv[1].second, "two words");
  EXPECT_EQ(kv[2].second, "");
}

TEST(Config, ParseErrors) {
  std::istringstream dup("a = 1\na = 2\n");
  EXPECT_THROW(parse_key_values(dup), ConfigError);
  std::istringstream noeq("just words\n");
  EXPECT_THROW(parse_key_values(noeq), ConfigError);
  std::istringstream nokey(" = 3\n");
  EXPECT_THROW(parse_key_values(nokey), ConfigError);
}

TEST(Config, ApplySettings) {
  ExperimentConfig cfg;
  apply_setting(cfg, "pid.kp", "3.5");
  apply_setting(cfg, "dsp.prototype_order", "6");
  apply_setting(cfg, "transport.reorder", "true");
  apply_setting(cfg, "render.mapping", "gamma");
  apply_setting(cfg, "protocol.cycle_peaks", "0.1,0.2,0.3,0.4,0.5");
  apply_setting(cfg, "seed", "42");
  EXPECT_EQ(cfg.gains.kp, 3.5);
  EXPECT_EQ(cfg.signal.prototype_order, 6);
  EXPECT_TRUE(cfg.impairment.reorder);
  EXPECT_EQ(cfg.render.mapping_shape, render::MappingShape::gamma);
  EXPECT_EQ(cfg.protocol.cycle_peaks.size(), 5u);
  EXPECT_EQ(cfg.seed, 42u);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  ExperimentConfig cfg;
  EXPECT_THROW(apply_setting(cfg, "pid.kq", "1"), ConfigError);
  EXPECT_THROW(apply_setting(cfg, "pid.kp", "fast"), ConfigError);
  EXPECT_THROW(apply_setting(cfg, "pid.kp", "1.0x"), ConfigError);
  EXPECT_THROW(apply_setting(cfg, "dsp.prototype_order", "4.5"), ConfigError);
  EXPECT_THROW(apply_setting(cfg, "transport.reorder", "maybe"), ConfigError);
  EXPECT_THROW(apply_setting(cfg, "render.mapping", "cubic"), ConfigError);
}

TEST(Config, DescribeRoundTrips) {
  ExperimentConfig cfg;
  cfg.gains.kp = 0.1 + 0.2;  // not exactly representable in short decimal
  cfg.protocol.cycle_peaks = {0.25, 0.5, 0.75, 1.0, 0.125};
  cfg.impairment.drop_prob = 1e-7;
  const auto kv = describe_config(cfg);

  ExperimentConfig back;
  for (const auto& [k, v] : kv) apply_setting(back, k, v);
  EXPECT_EQ(describe_config(back), kv);
  EXPECT_EQ(back.gains.kp, cfg.gains.kp);
  EXPECT_EQ(config_hash(kv), config_hash(describe_config(back)));
}

TEST(Config, KeysAreUniqueAndDescribed) {
  const auto keys = config_keys();
  const std::set<std::string> unique(keys.begin(), keys.end());
  EXPECT_EQ(unique.size(), keys.size());
  EXPECT_EQ(describe_config(ExperimentConfig{}).size(), keys.size());
}

TEST(Config, HashIsStableAndSensitive) {
  const auto a = describe_config(ExperimentConfig{});
  const auto h = config_hash(a);
  EXPECT_EQ(h.size(), 16u);
  EXPECT_EQ(h, config_hash(a));
  ExperimentConfig other;
  other.plant.tau_s = 0.051;
  EXPECT_NE(h, config_hash(describe_config(other)));
}

TEST(Config, FormatDouble) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(2.0), "2");
  EXPECT_EQ(format_double(0.0), "0");
}

TEST(Config, LoadFileThenOverrides) {
  const auto path = std::filesystem::temp_directory_path() / "emgpal_test_config.cfg";
  {
    std::ofstream out(path);
    out << "pid.kp = 5\nplant.tau_s = 0.08\n";
  }
  const auto cfg = load_config(&path, {"pid.kp=6"});
  EXPECT_EQ(cfg.gains.kp, 6.0);
  EXPECT_EQ(cfg.plant.tau_s, 0.08);
  EXPECT_THROW(load_config(&path, {"pid.kp"}), ConfigError);
  const std::filesystem::path missing = "/nonexistent/x.cfg";
  EXPECT_THROW(load_config(&missing, {}), ConfigError);
  std::filesystem::remove(path);
}

TEST(Config, ShippedDefaultMatchesBuiltInDefaults) {
  const std::filesystem::path shipped = std::filesystem::path(EMGPAL_TEST_DATA_DIR) / "../../configs/default.cfg";
  EXPECT_EQ(describe_config(load_config(&shipped, {})), describe_config(ExperimentConfig{}));
}

TEST(Config, ValidationOfCombinedConfig) {
  ExperimentConfig cfg;
  cfg.frame_samples = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = ExperimentConfig{};
  cfg.control_rate_hz = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}
