#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace emgpal::harness {

/// Root-mean-square difference. Throws ArgumentError for empty or unequal inputs.
double rmse(std::span<const double> x, std::span<const double> y);

/// Sample Pearson correlation (two-pass), clamped to [-1, 1].
/// Throws ArgumentError for unequal lengths or fewer than two points and
/// UndefinedCorrelationError when either input is constant.
double pearson(std::span<const double> x, std::span<const double> y);

/// Two-sided p-value of r under H0: rho = 0, via t = r sqrt((n-2)/(1-r^2))
/// with n-2 degrees of freedom. Returns 0 for |r| == 1 and 1 when n < 3.
double pearson_p_value(double r, std::size_t n);

struct CycleRange {
  std::size_t begin = 0;  // inclusive
  std::size_t end = 0;    // exclusive

  std::size_t size() const { return end - begin; }
  friend bool operator==(const CycleRange&, const CycleRange&) = default;
};

/// Activity episodes: a cycle opens on an upward crossing of
/// threshold * max(trace) and closes when the trace falls below half of that
/// level. Ranges are disjoint and ordered; a trace that never crosses gives an
/// empty list. Throws ArgumentError unless 0 < threshold < 1.
std::vector<CycleRange> segment_cycles(std::span<const double> trace, double threshold = 0.1);

}  // namespace emgpal::harness
