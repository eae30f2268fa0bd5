#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "emgpal/errors.hpp"
#include "emgpal/render/render.hpp"

using namespace emgpal;
using namespace emgpal::render;

namespace {
dsp::ActivationSample act(double v) { return {1234, v}; }
}  // namespace

TEST(MapActivation, Endpoints) {
  const RenderConfig cfg;
  EXPECT_EQ(map_activation(act(0.0), cfg).p_d_kpa, cfg.p_min_kpa);
  EXPECT_EQ(map_activation(act(1.0), cfg).p_d_kpa, cfg.p_max_kpa);
  EXPECT_DOUBLE_EQ(map_activation(act(0.25), cfg).p_d_kpa, 10.0);
  EXPECT_EQ(map_activation(act(0.25), cfg).t_us, 1234);
}

TEST(MapActivation, ClampsOutOfRangeActivation) {
  const RenderConfig cfg;
  EXPECT_EQ(map_activation(act(1.7), cfg).p_d_kpa, 40.0);
  EXPECT_EQ(map_activation(act(-0.2), cfg).p_d_kpa, 0.0);
}

TEST(MapActivation, GammaShape) {
  RenderConfig cfg;
  cfg.mapping_shape = MappingShape::gamma;
  cfg.gamma = 2.0;
  EXPECT_DOUBLE_EQ(map_activation(act(0.5), cfg).p_d_kpa, 10.0);
  EXPECT_EQ(map_activation(act(1.0), cfg).p_d_kpa, 40.0);
}

TEST(MapActivation, MonotoneAndBounded) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double g : {0.5, 1.0, 2.5}) {
    RenderConfig cfg;
    cfg.mapping_shape = MappingShape::gamma;
    cfg.gamma = g;
    cfg.p_min_kpa = 5.0;
    for (int i = 0; i < 1000; ++i) {
      const double a = u(rng);
      const double b = u(rng);
      const double pa = map_activation(act(a), cfg).p_d_kpa;
      const double pb = map_activation(act(b), cfg).p_d_kpa;
      EXPECT_GE(pa, cfg.p_min_kpa);
      EXPECT_LE(pa, cfg.p_max_kpa);
      if (a <= b) {
        EXPECT_LE(pa, pb);
      }
    }
  }
}

TEST(Stiffness, Examples) {
  const RenderConfig cfg;
  EXPECT_DOUBLE_EQ(stiffness_at(40.0, cfg), 0.85);
  EXPECT_EQ(stiffness_at(0.0, cfg), 0.0);
  EXPECT_DOUBLE_EQ(stiffness_at(20.0, cfg), 0.425);
  EXPECT_THROW(stiffness_at(40.5, cfg), ArgumentError);
  EXPECT_THROW(stiffness_at(-0.1, cfg), ArgumentError);
}

TEST(Stiffness, CustomCurve) {
  RenderConfig cfg;
  cfg.stiffness_curve = [](double x) { return x * x; };
  EXPECT_DOUBLE_EQ(stiffness_at(20.0, cfg), 0.85 * 0.25);
  EXPECT_DOUBLE_EQ(stiffness_at(40.0, cfg), 0.85);
}

TEST(Stiffness, CeilingEnforced) {
  RenderConfig cfg;
  cfg.k_max_n_per_mm = 0.9;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = RenderConfig{};
  cfg.p_max_kpa = cfg.p_min_kpa;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(RenderForce, Examples) {
  const RenderConfig cfg;
  EXPECT_EQ(render_force(25.0, 0.0, cfg).force_n, 0.0);
  EXPECT_DOUBLE_EQ(render_force(40.0, 2.0, cfg).force_n, 1.70);
  EXPECT_EQ(render_force(0.0, 3.5, cfg).force_n, 0.0);
  EXPECT_THROW(render_force(10.0, -0.5, cfg), ArgumentError);
  const auto f = render_force(40.0, 1.0, cfg, 77);
  EXPECT_EQ(f.t_us, 77);
  EXPECT_EQ(f.indentation_mm, 1.0);
}
