#include "antgen/criteria.hpp"

#include <algorithm>
#include <cmath>

namespace antgen {

CriterionSpec CriterionSpec::per_metric(std::vector<double> thresholds) {
  CriterionSpec s;
  s.mode = Mode::per_metric;
  s.thresholds = std::move(thresholds);
  return s;
}

CriterionSpec CriterionSpec::weighted_sum(std::vector<double> weights, double threshold) {
  CriterionSpec s;
  s.mode = Mode::weighted_sum;
  s.weights = std::move(weights);
  s.threshold = threshold;
  return s;
}

std::size_t CriterionSpec::metric_count() const {
  return mode == Mode::per_metric ? thresholds.size() : weights.size();
}

void CriterionSpec::validate() const {
  const auto& v = mode == Mode::per_metric ? thresholds : weights;
  if (v.empty()) throw std::invalid_argument("criterion has no metrics");
  for (double x : v)
    if (!std::isfinite(x)) throw std::invalid_argument("criterion values must be finite");
  if (mode == Mode::weighted_sum && !std::isfinite(threshold))
    throw std::invalid_argument("criterion threshold must be finite");
}

double weighted_score(std::span<const double> p, std::span<const double> weights) {
  if (p.size() != weights.size()) throw std::invalid_argument("metric/weight count mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += weights[i] * p[i];
  return s;
}

bool label(std::span<const double> p, const CriterionSpec& spec) {
  if (p.size() != spec.metric_count())
    throw std::invalid_argument("metric count does not match criterion");
  if (spec.mode == CriterionSpec::Mode::per_metric) {
    for (std::size_t i = 0; i < p.size(); ++i)
      if (!(p[i] <= spec.thresholds[i])) return false;
    return true;
  }
  return weighted_score(p, spec.weights) <= spec.threshold;
}

double band_target(const S11Curve& curve, double f_lo, double f_hi, double level) {
  curve.validate();
  // Grid values carry rounding noise; admit samples within a hair of the edges.
  const double tol = 1e-9 * std::max(1.0, std::abs(f_hi));
  double total = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double f = curve.freq_ghz[i];
    if (f < f_lo - tol || f > f_hi + tol) continue;
    total += std::max(curve.s11_db[i] - level, 0.0);
    ++n;
  }
  if (n == 0) throw std::invalid_argument("band contains no sweep samples");
  return total / static_cast<double>(n);
}

double percentile_threshold(std::span<const double> values, double q) {
  if (values.empty()) throw std::invalid_argument("percentile of an empty list");
  if (!(q > 0.0 && q < 100.0)) throw std::invalid_argument("percentile must lie in (0, 100)");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(q / 100.0 * n - 1e-12));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

}  // namespace antgen
