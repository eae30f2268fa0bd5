#include "emgpal/frame.hpp"

#include <cmath>

namespace emgpal {

std::uint64_t EmgFrame::duration_us() const {
  if (sample_rate_hz <= 0.0) return 0;
  return static_cast<std::uint64_t>(
      std::llround(static_cast<double>(samples.size()) * 1e6 / sample_rate_hz));
}

}  // namespace emgpal
