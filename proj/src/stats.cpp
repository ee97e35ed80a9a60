#include "rubriceval/stats.hpp"

#include <algorithm>
#include <cmath>

#include "rubriceval/error.hpp"

namespace rubriceval::stats {

namespace {

void require_values(std::span<const double> values, const char* what) {
  if (values.empty()) throw EvalError(ErrorCode::EmptyInput, std::string(what) + " of empty list");
}

std::vector<double> sorted_copy(std::span<const double> values) {
  std::vector<double> v(values.begin(), values.end());
  std::ranges::sort(v);
  return v;
}

double interpolate_sorted(const std::vector<double>& v, double p) {
  const double h = static_cast<double>(v.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  const double frac = h - static_cast<double>(lo);
  if (frac == 0.0) return v[lo];
  return v[lo] + frac * (v[hi] - v[lo]);
}

}  // namespace

double mean(std::span<const double> values) {
  require_values(values, "mean");
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double median(std::span<const double> values) { return quantile(values, 0.5); }

double quantile(std::span<const double> values, double p) {
  require_values(values, "quantile");
  if (!(p >= 0.0 && p <= 1.0)) throw EvalError(ErrorCode::EmptyInput, "quantile outside [0,1]");
  return interpolate_sorted(sorted_copy(values), p);
}

double sample_stddev(std::span<const double> values) {
  require_values(values, "stddev");
  if (values.size() < 2) return 0.0;
  // Welford keeps this single-pass; tests compare against a two-pass oracle.
  double m = 0.0;
  double m2 = 0.0;
  std::size_t n = 0;
  for (double v : values) {
    ++n;
    const double delta = v - m;
    m += delta / static_cast<double>(n);
    m2 += delta * (v - m);
  }
  return std::sqrt(std::max(0.0, m2 / static_cast<double>(n - 1)));
}

double nearest_rank(std::span<const double> values, double p) {
  require_values(values, "percentile");
  auto v = sorted_copy(values);
  // The epsilon keeps products such as 0.95 * 100 from rounding up a rank.
  auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(v.size()) - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, v.size());
  return v[rank - 1];
}

FiveNumber five_number(std::span<const double> values) {
  require_values(values, "five-number summary");
  auto v = sorted_copy(values);
  return {v.front(), interpolate_sorted(v, 0.25), interpolate_sorted(v, 0.5),
          interpolate_sorted(v, 0.75), v.back()};
}

}  // namespace rubriceval::stats
