#pragma once

// Classical derivative-free optimizers behind one budgeted objective.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "antgen/geometry.hpp"
#include "antgen/goal.hpp"
#include "antgen/simulator.hpp"

namespace antgen {

struct ObjectiveValue {
  double value = 0.0;
  bool goal = false;
};

// Budgeted scalar objective over a box. Every call costs one unit, including
// calls that land on infeasible geometry (those return the penalty).
class Objective {
 public:
  using Fn = std::function<ObjectiveValue(std::span<const double>)>;

  Objective(Fn fn, std::vector<Interval> bounds, std::size_t budget, double penalty = 60.0);

  // Minimizes the goal score (sum of point metrics, or total band target)
  // of the evaluator's curve; checker failures return `penalty`.
  static Objective from_goal(const Evaluator& evaluator, const GoalSpec& goal,
                             const ParameterRanges& ranges, const ConnectionMap& conn,
                             std::size_t budget, double penalty = 60.0);

  // Plain function with a goal at value <= target.
  static Objective from_function(std::function<double(std::span<const double>)> f,
                                 std::vector<Interval> bounds, std::size_t budget,
                                 double target = -std::numeric_limits<double>::infinity());

  // Throws BudgetExhausted when no budget is left and GeometryError-free:
  // infeasible points are charged and penalized.
  double operator()(std::span<const double> x);

  std::size_t dim() const { return bounds_.size(); }
  const std::vector<Interval>& bounds() const { return bounds_; }
  std::size_t evaluations() const { return ledger_.used(); }
  std::size_t budget() const { return ledger_.limit(); }
  std::size_t remaining() const { return ledger_.remaining(); }
  std::size_t penalties() const { return penalties_; }
  double penalty() const { return penalty_; }

  double best() const { return best_; }
  const std::vector<double>& best_x() const { return best_x_; }
  std::optional<std::size_t> evals_to_goal() const { return first_goal_; }
  bool goal_reached() const { return first_goal_.has_value(); }
  // Best value after each call.
  const std::vector<double>& trace() const { return trace_; }
  // Every point passed to the objective, in call order.
  const std::vector<std::vector<double>>& history() const { return history_; }

  // Stop optimizers once the goal is met (default true).
  bool stop_on_goal = true;
  bool done() const { return (stop_on_goal && goal_reached()) || remaining() == 0; }

  std::vector<double> clip(std::span<const double> x) const;
  bool in_bounds(std::span<const double> x) const;

 private:
  Fn fn_;
  std::vector<Interval> bounds_;
  BudgetLedger ledger_;
  double penalty_;
  std::size_t penalties_ = 0;
  double best_ = std::numeric_limits<double>::infinity();
  std::vector<double> best_x_;
  std::optional<std::size_t> first_goal_;
  std::vector<double> trace_;
  std::vector<std::vector<double>> history_;
};

struct RunRecord {
  std::string method;
  std::optional<std::size_t> evals_to_goal;
  std::size_t evaluations = 0;
  std::size_t budget = 0;
  std::size_t penalties = 0;
  double best = 0.0;
  std::vector<double> best_x;
  std::vector<double> trace;
  std::vector<double> diagnostics;  // method specific (CMA-ES: min covariance eigenvalue per generation)
  bool budget_exhausted = false;
};

struct NelderMeadOptions {
  double initial_step = 0.05;  // fraction of each range
  double tolerance = 1e-12;    // stop when the simplex spread in f and x falls below this
};

struct CmaEsOptions {
  double sigma0 = 0.3;  // in unit-box coordinates
  std::optional<std::vector<double>> start;
  std::size_t max_resample = 100;
};

struct PsoOptions {
  std::size_t particles = 30;
  double inertia = 0.7;
  double cognitive = 1.5;
  double social = 1.5;
};

struct GaOptions {
  std::size_t population = 30;
  double crossover_prob = 0.9;
  double mutation_prob = -1.0;  // < 0: 1 / dim
  double eta_crossover = 15.0;
  double eta_mutation = 20.0;
  std::size_t max_generations = 100000;
};

struct TrustRegionOptions {
  double initial_radius = 0.1;  // unit-box coordinates
  double max_radius = 1.0;
  double fd_step = 1e-6;        // unit-box coordinates
  double eta = 0.1;             // step acceptance ratio
  double min_radius = 1e-10;
};

RunRecord nelder_mead(Objective& obj, std::span<const double> start, const NelderMeadOptions& opts = {});
RunRecord cma_es(Objective& obj, std::uint64_t seed, const CmaEsOptions& opts = {});
RunRecord pso(Objective& obj, std::uint64_t seed, const PsoOptions& opts = {});
RunRecord ga(Objective& obj, std::uint64_t seed, const GaOptions& opts = {});
RunRecord trust_region(Objective& obj, std::span<const double> start, const TrustRegionOptions& opts = {});

// Method names accepted by run_baseline: nelder_mead, cma_es, pso, ga, trust_region.
const std::vector<std::string>& baseline_names();
// Deterministic start point for local methods: a checker-passing random sample.
RunRecord run_baseline(const std::string& method, Objective& obj, std::span<const double> start,
                       std::uint64_t seed);

double sphere(std::span<const double> x);
double rosenbrock(std::span<const double> x);

}  // namespace antgen
