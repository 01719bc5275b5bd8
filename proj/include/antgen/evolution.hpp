#pragma once

// Evolutionary loop: seed with random geometry, then repeatedly train the
// discriminator, generator and SVC on the labeled dataset, simulate filtered
// candidates, merge them and tighten the validity criterion.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "antgen/criteria.hpp"
#include "antgen/generative.hpp"
#include "antgen/geometry.hpp"
#include "antgen/goal.hpp"
#include "antgen/simulator.hpp"
#include "antgen/svc.hpp"

namespace antgen {

// How one evolution's criterion is derived from the dataset.
struct ScheduleEntry {
  enum class Kind { weighted_percentile, per_metric_percentile, weighted_fixed, per_metric_fixed };

  Kind kind = Kind::weighted_percentile;
  double percentile = 50.0;         // percentile kinds
  double threshold = 0.0;           // weighted_fixed
  std::vector<double> thresholds;   // per_metric_fixed

  static ScheduleEntry weighted(double q) { return {Kind::weighted_percentile, q, 0.0, {}}; }
  static ScheduleEntry per_metric(double q) { return {Kind::per_metric_percentile, q, 0.0, {}}; }
  static ScheduleEntry fixed(std::vector<double> c) {
    return {Kind::per_metric_fixed, 0.0, 0.0, std::move(c)};
  }
  static ScheduleEntry fixed_sum(double c) { return {Kind::weighted_fixed, 0.0, c, {}}; }

  bool is_percentile() const {
    return kind == Kind::weighted_percentile || kind == Kind::per_metric_percentile;
  }
  void validate() const;
};

std::string to_string(ScheduleEntry::Kind k);

struct EvolutionConfig {
  std::size_t initial_population = 100;
  std::size_t candidates_per_evolution = 100;
  std::vector<ScheduleEntry> schedule;      // entry e-1 drives evolution e; the last one repeats
  std::size_t max_evolutions = 7;
  std::size_t budget = 1000;
  std::uint64_t seed = 0;
  // Candidate width triples per evolution, selected by held-out accuracy;
  // the last list repeats.
  std::vector<std::vector<Widths>> width_grid;

  nn::TrainConfig discriminator_train;
  GeneratorConfig generator;
  double test_fraction = 0.2;
  double svc_C = 1.0;
  std::optional<double> svc_gamma;
  SvcOptions svc_options;
  bool use_svc = true;
  std::size_t redraw_factor = 10;      // generator draws allowed per batch slot
  double dedupe_tolerance = 1e-6;      // relative to each parameter range
  std::size_t min_class_count = 2;     // per class, else the criterion backs off
  double backoff_percentile = 10.0;
  double backoff_db = 1.0;
  int threads = 1;

  // Seven evolutions of 100 candidates on a 100-design seed population, with
  // the 50/50/30/30/20/20/20 percentile schedule.
  static EvolutionConfig example1();
  // 50 candidates per evolution with per-metric percentiles.
  static EvolutionConfig example2();

  const ScheduleEntry& schedule_for(std::size_t evolution) const;
  const std::vector<Widths>& widths_for(std::size_t evolution) const;
  void validate() const;
};

nlohmann::json to_json(const EvolutionConfig& c);
EvolutionConfig evolution_config_from_json(const nlohmann::json& j, EvolutionConfig base = EvolutionConfig::example1());

struct DesignRecord {
  std::size_t id = 0;
  std::size_t evolution = 0;  // 0: seed population
  ParameterVector params;
  S11Curve curve;
  PerformanceVector metrics;
  double score = 0.0;
  bool goal_met = false;
  double svc_decision = 0.0;  // 0 for seeds
  double disc_score = 0.0;    // 0 for seeds
};

struct CriterionRecord {
  std::size_t evolution = 0;
  ScheduleEntry entry;     // as applied, after any back-off
  CriterionSpec spec;
  bool backed_off = false;
  std::size_t valid_count = 0;
  std::size_t dataset_size = 0;
};

struct EvolutionStats {
  std::size_t evolution = 0;
  Widths widths{};
  std::vector<double> grid_accuracy;  // held-out accuracy per grid entry
  double disc_test_accuracy = 0.0;
  double disc_train_accuracy = 0.0;
  double svc_test_accuracy = 0.0;
  bool svc_converged = true;
  std::size_t generator_iterations = 0;
  double generator_mean_score = 0.0;
  bool generator_saturated = false;
  std::size_t drawn = 0;
  std::size_t geometry_rejected = 0;
  std::size_t svc_rejected = 0;
  std::size_t duplicates = 0;
  std::size_t evaluated = 0;
  std::size_t criterion_pass = 0;     // evaluated designs valid under this evolution's criterion
  double acceptance_rate = 0.0;       // evaluated / drawn
  double batch_median_score = 0.0;
  std::size_t batch_goal_count = 0;
  std::size_t dataset_valid_count = 0;  // dataset valid under this evolution's criterion after merge
  std::size_t dataset_goal_count = 0;
  bool short_batch = false;
  bool partial = false;                 // cut short by the budget
};

struct TrainedModels {
  std::optional<Discriminator> discriminator;
  std::optional<Generator> generator;
  std::optional<SvcModel> svc;
};

struct EvolutionState {
  std::vector<DesignRecord> dataset;
  std::vector<CriterionRecord> history;
  std::vector<EvolutionStats> stats;
  std::size_t seed_evaluations = 0;   // evaluations spent on the seed population in this run
  double seed_median_score = 0.0;
  CriterionSpec initial_criterion;
  TrainedModels models;

  std::size_t goal_count() const;
  std::optional<std::size_t> first_goal_id() const;
};

struct EvolutionReport {
  bool goal_met = false;
  bool budget_exhausted = false;
  std::size_t evolutions = 0;
  std::size_t evaluations = 0;           // ledger usage
  std::optional<std::size_t> evals_to_goal;  // id + 1 of the first goal design
  std::string stop_reason;
};

// Samples checker-passing random designs and evaluates them all. Throws
// BudgetExhausted when the ledger cannot cover the population.
EvolutionState seed_population(const EvolutionConfig& cfg, const ParameterRanges& ranges,
                               const ConnectionMap& conn, const Evaluator& evaluator,
                               const GoalSpec& goal, BudgetLedger& ledger);

// Reuses evaluated designs under a new goal without spending budget: the
// metrics, scores and the initial criterion are recomputed from the curves.
EvolutionState rescore(const std::vector<DesignRecord>& designs, const EvolutionConfig& cfg,
                       const GoalSpec& goal);

EvolutionReport run_evolution(EvolutionState& state, const EvolutionConfig& cfg,
                              const GoalSpec& goal, const Evaluator& evaluator,
                              const ParameterRanges& ranges, const ConnectionMap& conn,
                              BudgetLedger& ledger);

// Criterion for one schedule entry on the current dataset, with back-off
// when either class would fall below min_class_count.
CriterionRecord make_criterion(const std::vector<DesignRecord>& dataset, const GoalSpec& goal,
                               const ScheduleEntry& entry, const EvolutionConfig& cfg,
                               std::size_t evolution);

// Two designs are duplicates when every parameter differs by at most
// tol * range width.
bool is_duplicate(const ParameterVector& a, const ParameterVector& b, const ParameterRanges& ranges,
                  double tol);

struct PerformanceSpace {
  std::string points_csv;     // id,evolution,<metric names>,score,valid,goal_met
  std::string summary_csv;    // evolution,count,median_score,valid_count,goal_count
  std::vector<double> medians;  // per evolution index (0 = seeds)
};

PerformanceSpace export_performance_space(const EvolutionState& state, const GoalSpec& goal);

// Dataset JSON-lines, one design per line with an inline S11 column.
std::string dataset_to_jsonl(const EvolutionState& state);
std::vector<DesignRecord> dataset_from_jsonl(const std::string& text, const FrequencySweep& sweep,
                                             const GoalSpec& goal);

nlohmann::json manifest(const EvolutionState& state, const EvolutionReport& report,
                        const EvolutionConfig& cfg, const GoalSpec& goal, const Evaluator& evaluator,
                        const BudgetLedger& ledger);

// Digest over the dataset and criterion history.
std::string state_digest(const EvolutionState& state);

nlohmann::json to_json(const CriterionSpec& c);
nlohmann::json to_json(const ScheduleEntry& e);
ScheduleEntry schedule_entry_from_json(const nlohmann::json& j);

}  // namespace antgen
