#include "emgpal/dsp/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "emgpal/errors.hpp"

namespace emgpal::dsp {

std::vector<double> detrend(std::span<const double> x) {
  if (x.empty()) throw ArgumentError("detrend: empty input");
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  std::vector<double> out(x.size());
  std::transform(x.begin(), x.end(), out.begin(), [mean](double v) { return v - mean; });
  return out;
}

std::vector<double> rectify(std::span<const double> x) {
  std::vector<double> out(x.size());
  std::transform(x.begin(), x.end(), out.begin(), [](double v) { return std::abs(v); });
  return out;
}

std::vector<double> moving_mean(std::span<const double> x, std::size_t window_samples) {
  MovingMean mm(window_samples);
  std::vector<double> out(x.size());
  std::transform(x.begin(), x.end(), out.begin(), [&](double v) { return mm.push(v); });
  return out;
}

std::vector<ActivationSample> normalize_mvc(std::span<const double> x, const SignalConfig& cfg) {
  if (!(cfg.mvc_value > 0.0)) throw ConfigError("mvc_value must be positive");
  if (!(cfg.sample_rate_hz > 0.0)) throw ConfigError("sample_rate_hz must be positive");
  std::vector<ActivationSample> out;
  out.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < 0.0) {
      throw ArgumentError("normalize_mvc: negative envelope sample at index " +
                          std::to_string(i) + " (rectify before normalizing)");
    }
    double a = x[i] / cfg.mvc_value;
    if (cfg.activation_clamp) a = std::min(a, 1.0);
    const auto t = std::llround(static_cast<double>(i) * 1e6 / cfg.sample_rate_hz);
    out.push_back({static_cast<std::int64_t>(t), a});
  }
  return out;
}

MovingMean::MovingMean(std::size_t window_samples) : window_(window_samples) {
  if (window_samples == 0) throw ArgumentError("moving_mean: window must be at least 1 sample");
}

double MovingMean::push(double x) {
  buf_.push_back(x);
  if (buf_.size() > window_) buf_.pop_front();
  double sum = 0.0;
  double lo = buf_.front();
  double hi = buf_.front();
  for (double v : buf_) {
    sum += v;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return std::clamp(sum / static_cast<double>(buf_.size()), lo, hi);
}

void MovingMean::reset() { buf_.clear(); }

double RunningDetrend::push(double x) {
  sum_ += x;
  ++count_;
  return x - sum_ / static_cast<double>(count_);
}

void RunningDetrend::reset() {
  sum_ = 0.0;
  count_ = 0;
}

}  // namespace emgpal::dsp
