#pragma once

// Binary validity labels from quantitative metrics, band target functions,
// and percentile thresholds.

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "antgen/sweep.hpp"

namespace antgen {

struct PerformanceVector {
  std::vector<std::string> names;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  bool operator==(const PerformanceVector&) const = default;
};

struct CriterionSpec {
  enum class Mode { per_metric, weighted_sum };

  Mode mode = Mode::weighted_sum;
  std::vector<double> thresholds;  // per-metric: c_i
  std::vector<double> weights;     // weighted-sum: w_i
  double threshold = 0.0;          // weighted-sum: c

  static CriterionSpec per_metric(std::vector<double> thresholds);
  static CriterionSpec weighted_sum(std::vector<double> weights, double threshold);

  std::size_t metric_count() const;
  void validate() const;
  bool operator==(const CriterionSpec&) const = default;
};

// valid iff every p_i <= c_i (per-metric) or sum w_i p_i <= c (weighted sum).
// Throws std::invalid_argument on a length mismatch.
bool label(std::span<const double> p, const CriterionSpec& spec);
inline bool label(const PerformanceVector& p, const CriterionSpec& spec) {
  return label(p.values, spec);
}

double weighted_score(std::span<const double> p, std::span<const double> weights);

// Mean positive excess of |S11| above `level` over the sweep samples inside
// [f_lo, f_hi]. Throws std::invalid_argument when no sample falls inside.
double band_target(const S11Curve& curve, double f_lo, double f_hi, double level = -10.0);

// Nearest-rank percentile: the ceil(q/100 * n)-th smallest value. Requires a
// non-empty list and q in (0, 100).
double percentile_threshold(std::span<const double> values, double q);

}  // namespace antgen
