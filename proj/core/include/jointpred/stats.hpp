#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace jointpred {

// Neumaier-compensated sum; keeps pmf normalization checks and metric
// aggregation order-stable and accurate for large tables.
inline double compensated_sum(std::span<const double> values) {
  double sum = 0.0;
  double c = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      c += (sum - t) + v;
    } else {
      c += (v - t) + sum;
    }
    sum = t;
  }
  return sum + c;
}

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long n = 0;
  // Samples whose contribution is +infinity (e.g. an agent assigning zero
  // probability to an observed sequence). They are reported, not averaged
  // away: any such sample makes mean and std_error infinite.
  long infinite_count = 0;
};

// Plain accumulator for mean / standard error of i.i.d. samples. Chunked
// reductions add partials in a fixed order, keeping the result independent
// of thread schedule.
struct MeanAccumulator {
  double sum = 0.0;
  double sum_sq = 0.0;
  long n = 0;
  long infinite_count = 0;

  void add(double v) {
    if (std::isinf(v)) {
      ++infinite_count;
      ++n;
      return;
    }
    sum += v;
    sum_sq += v * v;
    ++n;
  }

  void merge(const MeanAccumulator& other) {
    sum += other.sum;
    sum_sq += other.sum_sq;
    n += other.n;
    infinite_count += other.infinite_count;
  }

  MonteCarloEstimate estimate() const {
    MonteCarloEstimate e;
    e.n = n;
    e.infinite_count = infinite_count;
    if (infinite_count > 0) {
      e.mean = std::numeric_limits<double>::infinity();
      e.std_error = std::numeric_limits<double>::infinity();
      return e;
    }
    if (n == 0) return e;
    const double nn = static_cast<double>(n);
    e.mean = sum / nn;
    const double var = std::max(0.0, sum_sq / nn - e.mean * e.mean);
    e.std_error = n > 1 ? std::sqrt(var / (nn - 1.0)) : 0.0;
    return e;
  }
};

}  // namespace jointpred
