#pragma once

// Descriptive statistics with fixed conventions, shared by every report:
//   quantiles  linear interpolation between order statistics (h = (n-1)p)
//   stddev     sample, n-1 denominator; 0 for a single value
//   p95        nearest rank, element ceil(0.95 n) of the sorted list

#include <span>
#include <vector>

namespace rubriceval::stats {

double mean(std::span<const double> values);
double median(std::span<const double> values);
double quantile(std::span<const double> values, double p);
double sample_stddev(std::span<const double> values);
double nearest_rank(std::span<const double> values, double p);

struct FiveNumber {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

FiveNumber five_number(std::span<const double> values);

}  // namespace rubriceval::stats
