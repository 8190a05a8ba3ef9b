#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "soibart/errors.hpp"

namespace soibart {

inline double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

inline double variance_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

inline double sd_of(const std::vector<double>& v) { return std::sqrt(variance_of(v)); }

// Linear interpolation between order statistics (the same convention most
// numeric stacks default to). quantile(0.5) is the midpoint of the two
// central values for even n.
inline double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) fail(ErrorCode::EmptyInput, "quantile of empty sample");
  if (!(q > 0.0) || !(q < 1.0)) {
    if (q == 0.0) return sorted.front();
    if (q == 1.0) return sorted.back();
    fail(ErrorCode::InvalidConfig, "quantile level must lie in [0,1]");
  }
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(lo);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

inline double quantile_of(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  return quantile_sorted(values, q);
}

inline double median_of(std::vector<double> values) { return quantile_of(std::move(values), 0.5); }

}  // namespace soibart
