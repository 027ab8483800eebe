#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace chirpsep {

// q-th percentile with linear interpolation between order statistics:
// rank r = q/100 * (N-1), result = v[floor(r)] + frac(r) * (v[ceil(r)] - v[floor(r)]).
inline double percentile_linear(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("percentile of empty set");
  if (q <= 0.0) return *std::min_element(values.begin(), values.end());
  if (q >= 100.0) return *std::max_element(values.begin(), values.end());
  const double rank = q / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(rank);
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(lo), values.end());
  const double v_lo = values[lo];
  if (lo + 1 >= values.size()) return v_lo;
  const double v_hi = *std::min_element(values.begin() + static_cast<std::ptrdiff_t>(lo) + 1, values.end());
  return v_lo + (rank - static_cast<double>(lo)) * (v_hi - v_lo);
}

inline double mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double sample_std(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

inline int next_pow2(int v) {
  int p = 1;
  while (p < v) p <<= 1;
  return p;
}

// Wrap an angle to (-pi, pi].
inline double wrap_angle(double x) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  x = std::fmod(x, two_pi);
  if (x <= -std::numbers::pi) x += two_pi;
  if (x > std::numbers::pi) x -= two_pi;
  return x;
}

inline double circular_distance(double a, double b) { return std::abs(wrap_angle(a - b)); }

}  // namespace chirpsep
