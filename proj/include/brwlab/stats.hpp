#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace brwlab {

// Pairwise summation; result independent of accumulation order at double
// precision for the replica counts used here.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

inline std::pair<double, double> mean_and_se(std::span<const double> v) {
  const auto n = static_cast<double>(v.size());
  if (v.empty()) return {0.0, 0.0};
  const double mean = pairwise_sum(v) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double se = v.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  return {mean, se};
}

// q-quantile with linear interpolation; sorts a copy.
inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= v.size()) return v.back();
  const double frac = pos - static_cast<double>(lo);
  return v[lo] * (1.0 - frac) + v[lo + 1] * frac;
}

inline double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

// log(sum(exp(x))) with max shift
inline double log_sum_exp(std::span<const double> log_terms) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double x : log_terms) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : log_terms) s += std::exp(x - mx);
  return mx + std::log(s);
}

}  // namespace brwlab
