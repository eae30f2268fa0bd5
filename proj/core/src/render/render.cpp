#include "emgpal/render/render.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "emgpal/errors.hpp"

namespace emgpal::render {

void RenderConfig::validate() const {
  if (!(p_min_kpa >= 0.0)) throw ConfigError("p_min_kpa must be nonnegative");
  if (!(p_min_kpa < p_max_kpa)) throw ConfigError("p_min_kpa must be below p_max_kpa");
  if (!(k_max_n_per_mm > 0.0)) throw ConfigError("k_max_n_per_mm must be positive");
  if (k_max_n_per_mm > kStiffnessCeilingNPerMm) {
    throw ConfigError("k_max_n_per_mm exceeds the device ceiling of 0.85 N/mm");
  }
  if (mapping_shape == MappingShape::gamma && !(gamma > 0.0)) {
    throw ConfigError("gamma must be positive");
  }
}

PressureCommand map_activation(const dsp::ActivationSample& a, const RenderConfig& cfg) {
  double x = std::clamp(a.value, 0.0, 1.0);
  if (cfg.mapping_shape == MappingShape::gamma) x = std::pow(x, cfg.gamma);
  return {a.t_us, cfg.p_min_kpa + (cfg.p_max_kpa - cfg.p_min_kpa) * x};
}

double stiffness_at(double p_kpa, const RenderConfig& cfg) {
  if (!(p_kpa >= cfg.p_min_kpa && p_kpa <= cfg.p_max_kpa)) {
    throw ArgumentError("pressure " + std::to_string(p_kpa) + " kPa outside [" +
                        std::to_string(cfg.p_min_kpa) + ", " + std::to_string(cfg.p_max_kpa) +
                        "]");
  }
  const double u = (p_kpa - cfg.p_min_kpa) / (cfg.p_max_kpa - cfg.p_min_kpa);
  const double frac = cfg.stiffness_curve ? std::clamp(cfg.stiffness_curve(u), 0.0, 1.0) : u;
  return cfg.k_max_n_per_mm * frac;
}

FingertipForce render_force(double p_kpa, double indentation_mm, const RenderConfig& cfg,
                            std::int64_t t_us) {
  if (!(indentation_mm >= 0.0)) throw ArgumentError("indentation must be nonnegative");
  return {t_us, indentation_mm, stiffness_at(p_kpa, cfg) * indentation_mm};
}

}  // namespace emgpal::render
