#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "antgen/criteria.hpp"
#include "antgen/sweep.hpp"

namespace antgen {

// Design target over an S11 curve.
struct GoalSpec {
  enum class Mode { point_sum, per_point, band };

  Mode mode = Mode::per_point;
  std::vector<double> freqs_ghz;                     // point modes
  double sum_threshold = -20.0;                      // point_sum
  std::vector<double> point_thresholds;              // per_point
  std::vector<std::pair<double, double>> bands;      // band
  double level = -10.0;                              // band
  std::vector<double> weights;                       // score weights, default all 1
  std::size_t required_valid_count = 1;

  // |S11| at 2.4 GHz + |S11| at 5.9 GHz <= -20 dB.
  static GoalSpec dual_resonance_sum();
  // |S11| <= -10 dB at both 2.4 and 5.9 GHz.
  static GoalSpec dual_resonance();
  // |S11| <= -10 dB across 2.3-2.5 and 5.1-7.2 GHz (F = 0).
  static GoalSpec broadband();

  std::size_t metric_count() const;
  std::vector<std::string> metric_names() const;
  std::vector<double> score_weights() const;

  bool satisfied(const PerformanceVector& p) const;
  // Weighted metric sum; for band goals this is the total target F.
  double score(const PerformanceVector& p) const;

  // Throws std::invalid_argument when frequencies or bands fall outside the sweep.
  void validate(const FrequencySweep& sweep) const;
};

// Point goals read the nearest grid sample; band goals use band_target.
PerformanceVector evaluate_metrics(const S11Curve& curve, const GoalSpec& goal);

std::string to_string(GoalSpec::Mode m);
nlohmann::json to_json(const GoalSpec& g);
GoalSpec goal_from_json(const nlohmann::json& j);

}  // namespace antgen
