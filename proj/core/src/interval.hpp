#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

namespace tft::detail {

// Index k of the interval [b_k, b_{k+1}) containing s; the last interval is
// closed at the horizon and out-of-range times clamp to the end intervals.
inline std::size_t locate_interval(const std::vector<double>& breakpoints, double s) {
  const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), s);
  if (it == breakpoints.begin()) return 0;
  const auto k = static_cast<std::size_t>(it - breakpoints.begin()) - 1;
  return std::min(k, breakpoints.size() - 2);
}

}  // namespace tft::detail
