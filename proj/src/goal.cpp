#include "antgen/goal.hpp"

#include <cmath>
#include <fmt/format.h>

namespace antgen {

GoalSpec GoalSpec::dual_resonance_sum() {
  GoalSpec g;
  g.mode = Mode::point_sum;
  g.freqs_ghz = {2.4, 5.9};
  g.sum_threshold = -20.0;
  return g;
}

GoalSpec GoalSpec::dual_resonance() {
  GoalSpec g;
  g.mode = Mode::per_point;
  g.freqs_ghz = {2.4, 5.9};
  g.point_thresholds = {-10.0, -10.0};
  return g;
}

GoalSpec GoalSpec::broadband() {
  GoalSpec g;
  g.mode = Mode::band;
  g.bands = {{2.3, 2.5}, {5.1, 7.2}};
  g.level = -10.0;
  return g;
}

std::size_t GoalSpec::metric_count() const {
  return mode == Mode::band ? bands.size() : freqs_ghz.size();
}

std::vector<std::string> GoalSpec::metric_names() const {
  std::vector<std::string> names;
  if (mode == Mode::band) {
    for (const auto& [lo, hi] : bands) names.push_back(fmt::format("f[{}-{}GHz]", lo, hi));
  } else {
    for (double f : freqs_ghz) names.push_back(fmt::format("s11@{}GHz", f));
  }
  return names;
}

std::vector<double> GoalSpec::score_weights() const {
  if (!weights.empty()) return weights;
  return std::vector<double>(metric_count(), 1.0);
}

bool GoalSpec::satisfied(const PerformanceVector& p) const {
  if (p.size() != metric_count()) throw std::invalid_argument("metric count does not match goal");
  switch (mode) {
    case Mode::point_sum:
      return score(p) <= sum_threshold;
    case Mode::per_point:
      for (std::size_t i = 0; i < p.size(); ++i)
        if (!(p[i] <= point_thresholds[i])) return false;
      return true;
    case Mode::band:
      for (double v : p.values)
        if (!(v <= 0.0)) return false;
      return true;
  }
  return false;
}

double GoalSpec::score(const PerformanceVector& p) const {
  return weighted_score(p.values, score_weights());
}

void GoalSpec::validate(const FrequencySweep& sweep) const {
  if (metric_count() == 0) throw std::invalid_argument("goal has no metrics");
  if (!weights.empty() && weights.size() != metric_count())
    throw std::invalid_argument("goal weights do not match metric count");
  if (mode == Mode::per_point && point_thresholds.size() != freqs_ghz.size())
    throw std::invalid_argument("per-point goal needs one threshold per frequency");
  const double half = 0.5 * sweep.step();
  auto inside = [&](double f) {
    return f >= sweep.f_start - half && f <= sweep.f_stop + half;
  };
  for (double f : freqs_ghz)
    if (!inside(f)) throw std::invalid_argument(fmt::format("goal frequency {} GHz outside sweep", f));
  for (const auto& [lo, hi] : bands) {
    if (!(lo <= hi) || lo < sweep.f_start || hi > sweep.f_stop)
      throw std::invalid_argument(fmt::format("goal band {}-{} GHz outside sweep", lo, hi));
  }
  if (required_valid_count == 0) throw std::invalid_argument("required valid count must be >= 1");
}

PerformanceVector evaluate_metrics(const S11Curve& curve, const GoalSpec& goal) {
  PerformanceVector p;
  p.names = goal.metric_names();
  if (goal.mode == GoalSpec::Mode::band) {
    for (const auto& [lo, hi] : goal.bands) p.values.push_back(band_target(curve, lo, hi, goal.level));
  } else {
    for (double f : goal.freqs_ghz) p.values.push_back(curve.s11_db[curve.nearest(f)]);
  }
  return p;
}

std::string to_string(GoalSpec::Mode m) {
  switch (m) {
    case GoalSpec::Mode::point_sum:
      return "point_sum";
    case GoalSpec::Mode::per_point:
      return "per_point";
    case GoalSpec::Mode::band:
      break;
  }
  return "band";
}

nlohmann::json to_json(const GoalSpec& g) {
  nlohmann::json j;
  j["mode"] = to_string(g.mode);
  if (g.mode == GoalSpec::Mode::band) {
    nlohmann::json bands = nlohmann::json::array();
    for (const auto& [lo, hi] : g.bands) bands.push_back({lo, hi});
    j["bands"] = bands;
    j["level"] = g.level;
  } else {
    j["freqs_ghz"] = g.freqs_ghz;
    if (g.mode == GoalSpec::Mode::point_sum)
      j["sum_threshold"] = g.sum_threshold;
    else
      j["point_thresholds"] = g.point_thresholds;
  }
  if (!g.weights.empty()) j["weights"] = g.weights;
  j["required_valid_count"] = g.required_valid_count;
  return j;
}

GoalSpec goal_from_json(const nlohmann::json& j) {
  GoalSpec g;
  if (j.contains("preset")) {
    const auto preset = j.at("preset").get<std::string>();
    if (preset == "dual_resonance")
      g = GoalSpec::dual_resonance();
    else if (preset == "dual_resonance_sum")
      g = GoalSpec::dual_resonance_sum();
    else if (preset == "broadband")
      g = GoalSpec::broadband();
    else
      throw std::invalid_argument("unknown goal preset: " + preset);
  }
  if (j.contains("mode")) {
    const auto mode = j.at("mode").get<std::string>();
    if (mode == "point_sum")
      g.mode = GoalSpec::Mode::point_sum;
    else if (mode == "per_point")
      g.mode = GoalSpec::Mode::per_point;
    else if (mode == "band")
      g.mode = GoalSpec::Mode::band;
    else
      throw std::invalid_argument("unknown goal mode: " + mode);
  }
  if (j.contains("freqs_ghz")) g.freqs_ghz = j.at("freqs_ghz").get<std::vector<double>>();
  if (j.contains("sum_threshold")) g.sum_threshold = j.at("sum_threshold").get<double>();
  if (j.contains("point_thresholds"))
    g.point_thresholds = j.at("point_thresholds").get<std::vector<double>>();
  if (j.contains("bands")) {
    g.bands.clear();
    for (const auto& b : j.at("bands")) g.bands.emplace_back(b.at(0).get<double>(), b.at(1).get<double>());
  }
  if (j.contains("level")) g.level = j.at("level").get<double>();
  if (j.contains("weights")) g.weights = j.at("weights").get<std::vector<double>>();
  if (j.contains("required_valid_count"))
    g.required_valid_count = j.at("required_valid_count").get<std::size_t>();
  return g;
}

}  // namespace antgen
