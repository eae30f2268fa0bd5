#pragma once

#include <cstdint>
#include <functional>

#include "emgpal/dsp/envelope.hpp"

namespace emgpal::render {

/// Highest stiffness the jamming layer reaches at full vacuum.
inline constexpr double kStiffnessCeilingNPerMm = 0.85;

enum class MappingShape { linear, gamma };

/// Pressures are vacuum magnitudes in kPa below ambient (always >= 0).
struct RenderConfig {
  double p_min_kpa = 0.0;
  double p_max_kpa = 40.0;
  double k_max_n_per_mm = kStiffnessCeilingNPerMm;
  MappingShape mapping_shape = MappingShape::linear;
  double gamma = 1.0;

  /// Fraction of k_max as a function of normalized pressure in [0, 1].
  /// Empty means linear. Must be monotone with curve(0) = 0 and curve(1) = 1.
  std::function<double(double)> stiffness_curve;

  void validate() const;
};

struct PressureCommand {
  std::int64_t t_us = 0;
  double p_d_kpa = 0.0;
};

struct FingertipForce {
  std::int64_t t_us = 0;
  double indentation_mm = 0.0;
  double force_n = 0.0;
};

PressureCommand map_activation(const dsp::ActivationSample& a, const RenderConfig& cfg);

/// Rendered stiffness in N/mm. Throws ArgumentError outside [p_min, p_max].
double stiffness_at(double p_kpa, const RenderConfig& cfg);

/// Force felt at the fingertip for a given chamber pressure and indentation.
/// Throws ArgumentError for negative indentation.
FingertipForce render_force(double p_kpa, double indentation_mm, const RenderConfig& cfg,
                            std::int64_t t_us = 0);

}  // namespace emgpal::render
