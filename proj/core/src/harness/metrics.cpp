#include "emgpal/harness/metrics.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <string>

#include "emgpal/errors.hpp"

namespace emgpal::harness {
namespace {

void check_pair(std::span<const double> x, std::span<const double> y, const char* who) {
  if (x.size() != y.size()) {
    throw ArgumentError(std::string(who) + ": length mismatch (" + std::to_string(x.size()) +
                        " vs " + std::to_string(y.size()) + ")");
  }
}

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

double rmse(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y, "rmse");
  if (x.empty()) throw ArgumentError("rmse: empty input");
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(x.size()));
}

double pearson(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y, "pearson");
  if (x.size() < 2) throw ArgumentError("pearson: need at least two points");
  const double mx = mean_of(x);
  const double my = mean_of(y);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw UndefinedCorrelationError("pearson: constant input");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double pearson_p_value(double r, std::size_t n) {
  if (n < 3 || !std::isfinite(r)) return 1.0;
  if (std::abs(r) >= 1.0) return 0.0;
  const double df = static_cast<double>(n - 2);
  const double t = std::abs(r) * std::sqrt(df / (1.0 - r * r));
  const boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, t));
}

std::vector<CycleRange> segment_cycles(std::span<const double> trace, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw ArgumentError("segment_cycles: threshold must lie in (0, 1)");
  }
  std::vector<CycleRange> cycles;
  if (trace.empty()) return cycles;
  const double peak = *std::max_element(trace.begin(), trace.end());
  if (!(peak > 0.0)) return cycles;

  const double on = threshold * peak;
  const double off = 0.5 * on;
  bool active = false;
  bool was_below = true;
  CycleRange current;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const double v = trace[i];
    if (!active) {
      if (v >= on && was_below) {
        active = true;
        current.begin = i;
      }
      was_below = v < on;
    } else if (v < off) {
      current.end = i;
      cycles.push_back(current);
      active = false;
      was_below = true;
    }
  }
  if (active) {
    current.end = trace.size();
    cycles.push_back(current);
  }
  return cycles;
}

}  // namespace emgpal::harness
