#include "antgen/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "antgen/hash.hpp"

namespace antgen {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

nlohmann::json finite_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

nlohmann::json train_to_json(const nn::TrainConfig& t) {
  const auto& o = t.optimizer;
  return {{"optimizer",
           {{"kind", o.kind == nn::OptimizerConfig::Kind::adam ? "adam" : "sgd"},
            {"lr", o.lr},
            {"weight_decay", o.weight_decay},
            {"decoupled_decay", o.decoupled_decay},
            {"beta1", o.beta1},
            {"beta2", o.beta2},
            {"eps", o.eps}}},
          {"batch_size", t.batch_size},
          {"max_epochs", t.max_epochs},
          {"max_steps", t.max_steps}};
}

nn::TrainConfig train_from_json(const nlohmann::json& j, nn::TrainConfig t) {
  if (j.contains("optimizer")) {
    const auto& o = j.at("optimizer");
    auto& c = t.optimizer;
    if (o.contains("kind")) {
      const auto k = o.at("kind").get<std::string>();
      if (k == "adam")
        c.kind = nn::OptimizerConfig::Kind::adam;
      else if (k == "sgd")
        c.kind = nn::OptimizerConfig::Kind::sgd;
      else
        throw std::invalid_argument("unknown optimizer kind: " + k);
    }
    c.lr = o.value("lr", c.lr);
    c.weight_decay = o.value("weight_decay", c.weight_decay);
    c.decoupled_decay = o.value("decoupled_decay", c.decoupled_decay);
    c.beta1 = o.value("beta1", c.beta1);
    c.beta2 = o.value("beta2", c.beta2);
    c.eps = o.value("eps", c.eps);
  }
  t.batch_size = j.value("batch_size", t.batch_size);
  t.max_epochs = j.value("max_epochs", t.max_epochs);
  t.max_steps = j.value("max_steps", t.max_steps);
  return t;
}

std::vector<double> weighted_scores(const std::vector<DesignRecord>& d, const std::vector<double>& w) {
  std::vector<double> s(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) s[i] = weighted_score(d[i].metrics.values, w);
  return s;
}

double median_of(std::vector<double> v) {
  if (v.empty()) return kNaN;
  return percentile_threshold(v, 50.0);
}

DesignRecord make_record(std::size_t id, std::size_t evolution, const ParameterVector& p,
                         S11Curve curve, const GoalSpec& goal) {
  DesignRecord r;
  r.id = id;
  r.evolution = evolution;
  r.params = p;
  r.metrics = evaluate_metrics(curve, goal);
  r.score = goal.score(r.metrics);
  r.goal_met = goal.satisfied(r.metrics);
  r.curve = std::move(curve);
  return r;
}

}  // namespace

std::string to_string(ScheduleEntry::Kind k) {
  switch (k) {
    case ScheduleEntry::Kind::weighted_percentile:
      return "weighted_percentile";
    case ScheduleEntry::Kind::per_metric_percentile:
      return "per_metric_percentile";
    case ScheduleEntry::Kind::weighted_fixed:
      return "weighted_fixed";
    case ScheduleEntry::Kind::per_metric_fixed:
      return "per_metric_fixed";
  }
  return "?";
}

void ScheduleEntry::validate() const {
  if (is_percentile() && !(percentile > 0.0 && percentile < 100.0))
    throw std::invalid_argument("schedule percentiles must lie in (0, 100)");
  if (kind == Kind::per_metric_fixed && thresholds.empty())
    throw std::invalid_argument("fixed per-metric schedule entry needs thresholds");
}

EvolutionConfig EvolutionConfig::example1() {
  EvolutionConfig c;
  c.initial_population = 100;
  c.candidates_per_evolution = 100;
  for (double q : {50.0, 50.0, 30.0, 30.0, 20.0, 20.0, 20.0}) c.schedule.push_back(ScheduleEntry::weighted(q));
  c.max_evolutions = 7;
  c.budget = 1000;
  c.width_grid = {{kEvolutionWidths[0], kEvolutionWidths[1], kEvolutionWidths[3]}};

  c.discriminator_train.optimizer = nn::OptimizerConfig::adam(1e-3, 0.05);
  c.discriminator_train.batch_size = 8;
  c.discriminator_train.max_epochs = 1000;
  c.discriminator_train.max_steps = 500;

  c.generator.train.optimizer = nn::OptimizerConfig::sgd(1e-3);
  c.generator.train.batch_size = 64;
  c.generator.train.max_epochs = 30000;
  c.generator.train.max_steps = 300;
  // log(1 - D) stalls once the discriminator rejects everything the
  // generator starts from; the -log D form keeps the gradient alive.
  c.generator.nonsaturating = true;
  return c;
}

EvolutionConfig EvolutionConfig::example2() {
  EvolutionConfig c = example1();
  c.candidates_per_evolution = 50;
  c.schedule.clear();
  for (double q : {50.0, 50.0, 30.0, 30.0, 20.0, 20.0, 20.0}) c.schedule.push_back(ScheduleEntry::per_metric(q));
  c.max_evolutions = 40;
  c.budget = 2000;
  return c;
}

const ScheduleEntry& EvolutionConfig::schedule_for(std::size_t evolution) const {
  if (schedule.empty()) throw std::invalid_argument("empty percentile schedule");
  const std::size_t i = evolution == 0 ? 0 : evolution - 1;
  return schedule[std::min(i, schedule.size() - 1)];
}

const std::vector<Widths>& EvolutionConfig::widths_for(std::size_t evolution) const {
  if (width_grid.empty()) throw std::invalid_argument("empty width grid");
  const std::size_t i = evolution == 0 ? 0 : evolution - 1;
  return width_grid[std::min(i, width_grid.size() - 1)];
}

void EvolutionConfig::validate() const {
  if (initial_population == 0) throw std::invalid_argument("initial population must be >= 1");
  if (candidates_per_evolution == 0) throw std::invalid_argument("candidates per evolution must be >= 1");
  if (schedule.empty()) throw std::invalid_argument("percentile schedule must not be empty");
  for (const auto& e : schedule) e.validate();
  if (width_grid.empty()) throw std::invalid_argument("width grid must not be empty");
  for (const auto& g : width_grid) {
    if (g.empty()) throw std::invalid_argument("width grid entries must not be empty");
    for (const auto& w : g)
      if (w[0] == 0 || w[1] == 0 || w[2] == 0) throw std::invalid_argument("widths must be >= 1");
  }
  if (!(test_fraction >= 0.0 && test_fraction < 1.0))
    throw std::invalid_argument("test fraction must lie in [0, 1)");
  if (!(svc_C > 0.0)) throw std::invalid_argument("svc C must be positive");
  if (svc_gamma && !(*svc_gamma > 0.0)) throw std::invalid_argument("svc gamma must be positive");
  if (redraw_factor == 0) throw std::invalid_argument("redraw factor must be >= 1");
  if (threads < 1) throw std::invalid_argument("thread count must be >= 1");
  discriminator_train.validate();
  generator.train.validate();
}

nlohmann::json to_json(const ScheduleEntry& e) {
  nlohmann::json j{{"kind", to_string(e.kind)}};
  if (e.is_percentile()) j["percentile"] = e.percentile;
  if (e.kind == ScheduleEntry::Kind::weighted_fixed) j["threshold"] = e.threshold;
  if (e.kind == ScheduleEntry::Kind::per_metric_fixed) j["thresholds"] = e.thresholds;
  return j;
}

ScheduleEntry schedule_entry_from_json(const nlohmann::json& j) {
  if (j.is_number()) return ScheduleEntry::weighted(j.get<double>());
  ScheduleEntry e;
  const auto kind = j.value("kind", std::string("weighted_percentile"));
  if (kind == "weighted_percentile")
    e.kind = ScheduleEntry::Kind::weighted_percentile;
  else if (kind == "per_metric_percentile")
    e.kind = ScheduleEntry::Kind::per_metric_percentile;
  else if (kind == "weighted_fixed")
    e.kind = ScheduleEntry::Kind::weighted_fixed;
  else if (kind == "per_metric_fixed")
    e.kind = ScheduleEntry::Kind::per_metric_fixed;
  else
    throw std::invalid_argument("unknown schedule kind: " + kind);
  e.percentile = j.value("percentile", 50.0);
  e.threshold = j.value("threshold", 0.0);
  if (j.contains("thresholds")) e.thresholds = j.at("thresholds").get<std::vector<double>>();
  e.validate();
  return e;
}

nlohmann::json to_json(const CriterionSpec& c) {
  nlohmann::json j;
  j["mode"] = c.mode == CriterionSpec::Mode::weighted_sum ? "weighted_sum" : "per_metric";
  if (c.mode == CriterionSpec::Mode::weighted_sum) {
    j["weights"] = c.weights;
    j["threshold"] = c.threshold;
  } else {
    j["thresholds"] = c.thresholds;
  }
  return j;
}

nlohmann::json to_json(const EvolutionConfig& c) {
  nlohmann::json j;
  j["initial_population"] = c.initial_population;
  j["candidates_per_evolution"] = c.candidates_per_evolution;
  auto sched = nlohmann::json::array();
  for (const auto& e : c.schedule) sched.push_back(to_json(e));
  j["schedule"] = sched;
  j["max_evolutions"] = c.max_evolutions;
  j["budget"] = c.budget;
  j["seed"] = c.seed;
  auto grid = nlohmann::json::array();
  for (const auto& g : c.width_grid) {
    auto row = nlohmann::json::array();
    for (const auto& w : g) row.push_back({w[0], w[1], w[2]});
    grid.push_back(row);
  }
  j["width_grid"] = grid;
  j["discriminator"] = train_to_json(c.discriminator_train);
  auto g = train_to_json(c.generator.train);
  g["noise_dim"] = c.generator.noise_dim;
  g["stop_threshold"] = c.generator.stop_threshold;
  g["probe_size"] = c.generator.probe_size;
  g["probe_every"] = c.generator.probe_every;
  g["nonsaturating"] = c.generator.nonsaturating;
  j["generator"] = g;
  j["test_fraction"] = c.test_fraction;
  j["svc"] = {{"enabled", c.use_svc},
              {"C", c.svc_C},
              {"gamma", c.svc_gamma ? nlohmann::json(*c.svc_gamma) : nlohmann::json("auto")},
              {"tolerance", c.svc_options.tolerance},
              {"max_iter", c.svc_options.max_iter}};
  j["redraw_factor"] = c.redraw_factor;
  j["dedupe_tolerance"] = c.dedupe_tolerance;
  j["min_class_count"] = c.min_class_count;
  j["backoff_percentile"] = c.backoff_percentile;
  j["backoff_db"] = c.backoff_db;
  return j;
}

EvolutionConfig evolution_config_from_json(const nlohmann::json& j, EvolutionConfig c) {
  if (j.contains("profile")) {
    const auto p = j.at("profile").get<std::string>();
    if (p == "example1")
      c = EvolutionConfig::example1();
    else if (p == "example2")
      c = EvolutionConfig::example2();
    else
      throw std::invalid_argument("unknown evolution profile: " + p);
  }
  c.initial_population = j.value("initial_population", c.initial_population);
  c.candidates_per_evolution = j.value("candidates_per_evolution", c.candidates_per_evolution);
  if (j.contains("schedule")) {
    c.schedule.clear();
    for (const auto& e : j.at("schedule")) c.schedule.push_back(schedule_entry_from_json(e));
  }
  c.max_evolutions = j.value("max_evolutions", c.max_evolutions);
  c.budget = j.value("budget", c.budget);
  c.seed = j.value("seed", c.seed);
  if (j.contains("width_grid")) {
    c.width_grid.clear();
    for (const auto& row : j.at("width_grid")) {
      std::vector<Widths> g;
      for (const auto& w : row) {
        const auto v = w.get<std::vector<std::size_t>>();
        if (v.size() != 3) throw std::invalid_argument("width triples need three entries");
        g.push_back({v[0], v[1], v[2]});
      }
      c.width_grid.push_back(g);
    }
  }
  if (j.contains("discriminator")) c.discriminator_train = train_from_json(j.at("discriminator"), c.discriminator_train);
  if (j.contains("generator")) {
    const auto& g = j.at("generator");
    c.generator.train = train_from_json(g, c.generator.train);
    c.generator.noise_dim = g.value("noise_dim", c.generator.noise_dim);
    c.generator.stop_threshold = g.value("stop_threshold", c.generator.stop_threshold);
    c.generator.probe_size = g.value("probe_size", c.generator.probe_size);
    c.generator.probe_every = g.value("probe_every", c.generator.probe_every);
    c.generator.nonsaturating = g.value("nonsaturating", c.generator.nonsaturating);
  }
  c.test_fraction = j.value("test_fraction", c.test_fraction);
  if (j.contains("svc")) {
    const auto& s = j.at("svc");
    c.use_svc = s.value("enabled", c.use_svc);
    c.svc_C = s.value("C", c.svc_C);
    if (s.contains("gamma")) {
      if (s.at("gamma").is_string()) {
        if (s.at("gamma").get<std::string>() != "auto") throw std::invalid_argument("svc gamma must be a number or \"auto\"");
        c.svc_gamma.reset();
      } else {
        c.svc_gamma = s.at("gamma").get<double>();
      }
    }
    c.svc_options.tolerance = s.value("tolerance", c.svc_options.tolerance);
    c.svc_options.max_iter = s.value("max_iter", c.svc_options.max_iter);
  }
  c.redraw_factor = j.value("redraw_factor", c.redraw_factor);
  c.dedupe_tolerance = j.value("dedupe_tolerance", c.dedupe_tolerance);
  c.min_class_count = j.value("min_class_count", c.min_class_count);
  c.backoff_percentile = j.value("backoff_percentile", c.backoff_percentile);
  c.backoff_db = j.value("backoff_db", c.backoff_db);
  c.validate();
  return c;
}

std::size_t EvolutionState::goal_count() const {
  return static_cast<std::size_t>(
      std::count_if(dataset.begin(), dataset.end(), [](const auto& r) { return r.goal_met; }));
}

std::optional<std::size_t> EvolutionState::first_goal_id() const {
  for (const auto& r : dataset)
    if (r.goal_met) return r.id;
  return std::nullopt;
}

bool is_duplicate(const ParameterVector& a, const ParameterVector& b, const ParameterRanges& ranges,
                  double tol) {
  for (std::size_t i = 0; i < kParameterCount; ++i)
    if (std::abs(a[i] - b[i]) > tol * ranges[i].width()) return false;
  return true;
}

CriterionRecord make_criterion(const std::vector<DesignRecord>& dataset, const GoalSpec& goal,
                               const ScheduleEntry& entry, const EvolutionConfig& cfg,
                               std::size_t evolution) {
  if (dataset.empty()) throw std::invalid_argument("criterion needs a non-empty dataset");
  entry.validate();
  const auto weights = goal.score_weights();
  const std::size_t m = goal.metric_count();
  const auto scores = weighted_scores(dataset, weights);

  CriterionRecord rec;
  rec.evolution = evolution;
  rec.entry = entry;
  rec.dataset_size = dataset.size();
  auto build = [&](const ScheduleEntry& e) {
    switch (e.kind) {
      case ScheduleEntry::Kind::weighted_percentile:
        return CriterionSpec::weighted_sum(weights, percentile_threshold(scores, e.percentile));
      case ScheduleEntry::Kind::weighted_fixed:
        return CriterionSpec::weighted_sum(weights, e.threshold);
      case ScheduleEntry::Kind::per_metric_percentile: {
        std::vector<double> c(m);
        for (std::size_t k = 0; k < m; ++k) {
          std::vector<double> col(dataset.size());
          for (std::size_t i = 0; i < dataset.size(); ++i) col[i] = dataset[i].metrics[k];
          c[k] = percentile_threshold(col, e.percentile);
        }
        return CriterionSpec::per_metric(c);
      }
      case ScheduleEntry::Kind::per_metric_fixed:
        if (e.thresholds.size() != m)
          throw std::invalid_argument("fixed thresholds do not match the goal's metric count");
        return CriterionSpec::per_metric(e.thresholds);
    }
    throw std::logic_error("unreachable schedule kind");
  };
  auto count_valid = [&](const CriterionSpec& s) {
    std::size_t v = 0;
    for (const auto& r : dataset) v += label(r.metrics, s);
    return v;
  };

  const std::size_t need = cfg.min_class_count;
  const bool can_balance = dataset.size() >= 2 * need;
  ScheduleEntry e = entry;
  for (int step = 0; step < 400; ++step) {
    rec.spec = build(e);
    rec.valid_count = count_valid(rec.spec);
    if (!can_balance) break;
    const std::size_t invalid = dataset.size() - rec.valid_count;
    int dir = 0;
    if (rec.valid_count < need)
      dir = 1;
    else if (invalid < need)
      dir = -1;
    if (dir == 0) break;
    if (e.is_percentile()) {
      const double q = e.percentile + dir * cfg.backoff_percentile;
      if (!(q > 0.0 && q < 100.0)) break;
      e.percentile = q;
    } else if (e.kind == ScheduleEntry::Kind::weighted_fixed) {
      e.threshold += dir * cfg.backoff_db;
    } else {
      for (auto& c : e.thresholds) c += dir * cfg.backoff_db;
    }
    rec.backed_off = true;
  }
  rec.entry = e;
  return rec;
}

EvolutionState seed_population(const EvolutionConfig& cfg, const ParameterRanges& ranges,
                               const ConnectionMap& conn, const Evaluator& evaluator,
                               const GoalSpec& goal, BudgetLedger& ledger) {
  cfg.validate();
  goal.validate(evaluator.sweep());
  if (ledger.remaining() < cfg.initial_population)
    throw BudgetExhausted(fmt::format("seed population of {} exceeds the remaining budget of {}",
                                      cfg.initial_population, ledger.remaining()));
  std::mt19937_64 rng(derive_seed(cfg.seed, "seed-population"));
  std::vector<ParameterVector> params;
  params.reserve(cfg.initial_population);
  for (std::size_t i = 0; i < cfg.initial_population; ++i) params.push_back(sample_valid(ranges, conn, rng));
  auto curves = evaluate_batch(evaluator, params, ledger, cfg.threads);

  std::vector<DesignRecord> designs;
  for (std::size_t i = 0; i < params.size(); ++i)
    designs.push_back(make_record(i, 0, params[i], std::move(curves[i]), goal));
  auto state = rescore(designs, cfg, goal);
  state.seed_evaluations = params.size();
  return state;
}

EvolutionState rescore(const std::vector<DesignRecord>& designs, const EvolutionConfig& cfg,
                       const GoalSpec& goal) {
  if (designs.empty()) throw std::invalid_argument("cannot rescore an empty dataset");
  EvolutionState s;
  for (const auto& d : designs) {
    if (d.evolution != 0) continue;
    s.dataset.push_back(make_record(s.dataset.size(), 0, d.params, d.curve, goal));
  }
  if (s.dataset.empty()) throw std::invalid_argument("dataset holds no seed-population designs");
  std::vector<double> scores;
  for (const auto& r : s.dataset) scores.push_back(r.score);
  s.seed_median_score = median_of(scores);
  s.initial_criterion = make_criterion(s.dataset, goal, cfg.schedule_for(1), cfg, 1).spec;
  return s;
}

EvolutionReport run_evolution(EvolutionState& state, const EvolutionConfig& cfg,
                              const GoalSpec& goal, const Evaluator& evaluator,
                              const ParameterRanges& ranges, const ConnectionMap& conn,
                              BudgetLedger& ledger) {
  cfg.validate();
  goal.validate(evaluator.sweep());
  if (state.dataset.empty()) throw std::invalid_argument("run_evolution needs a seeded state");
  EvolutionReport report;

  for (std::size_t e = state.history.size() + 1;; ++e) {
    if (state.goal_count() >= goal.required_valid_count) {
      report.goal_met = true;
      report.stop_reason = "goal";
      break;
    }
    if (e > cfg.max_evolutions) {
      report.stop_reason = "max_evolutions";
      break;
    }
    if (ledger.remaining() == 0) {
      report.budget_exhausted = true;
      report.stop_reason = "budget";
      break;
    }

    EvolutionStats st;
    st.evolution = e;
    auto crit = make_criterion(state.dataset, goal, cfg.schedule_for(e), cfg, e);

    std::vector<ParameterVector> x;
    std::vector<int> y;
    for (const auto& r : state.dataset) {
      x.push_back(r.params);
      y.push_back(label(r.metrics, crit.spec) ? 1 : 0);
    }
    const auto split = SplitDataset::stratified(x, y, cfg.test_fraction, derive_seed(cfg.seed, "split", e));

    std::optional<DiscriminatorResult> best;
    const auto& grid = cfg.widths_for(e);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      auto tc = cfg.discriminator_train;
      tc.seed = derive_seed(cfg.seed, "discriminator", e * 64 + k);
      auto r = train_discriminator(split, ranges, grid[k], tc);
      st.grid_accuracy.push_back(r.test_accuracy);
      if (!best || r.test_accuracy > best->test_accuracy) best = std::move(r);
    }
    st.widths = best->widths;
    st.disc_test_accuracy = best->test_accuracy;
    st.disc_train_accuracy = best->train_accuracy;

    auto gc = cfg.generator;
    gc.train.seed = derive_seed(cfg.seed, "generator", e);
    auto gen = train_generator(best->disc, gc);
    st.generator_iterations = gen.iterations;
    st.generator_mean_score = gen.final_mean_score;
    st.generator_saturated = gen.saturated;

    std::optional<SvcResult> svc;
    if (cfg.use_svc) {
      std::optional<KernelSpec> kernel;
      if (cfg.svc_gamma) kernel = KernelSpec::rbf(*cfg.svc_gamma);
      svc = train_svc(split, ranges, kernel, cfg.svc_C, cfg.svc_options);
      st.svc_test_accuracy = svc->test_accuracy;
      st.svc_converged = svc->fit.converged;
    }

    const std::size_t target = std::min(cfg.candidates_per_evolution, ledger.remaining());
    st.partial = target < cfg.candidates_per_evolution;
    const std::size_t max_draws = cfg.redraw_factor * cfg.candidates_per_evolution;
    std::mt19937_64 rng(derive_seed(cfg.seed, "noise", e));
    std::vector<ParameterVector> accepted;
    std::vector<double> decisions;
    while (accepted.size() < target && st.drawn < max_draws) {
      const std::size_t want = std::min(target - accepted.size(), max_draws - st.drawn);
      const Matrix z = gen.gen.sample_noise(want, rng);
      const auto params = denormalize(ranges, gen.gen.generate_unit(z));
      st.drawn += want;
      for (const auto& p : params) {
        if (!check_geometry(p, conn)) {
          ++st.geometry_rejected;
          continue;
        }
        double dv = 0.0;
        if (svc) {
          dv = svc_decision(svc->fit.model, ranges, p);
          if (dv < 0.0) {
            ++st.svc_rejected;
            continue;
          }
        }
        const auto dup = [&](const ParameterVector& q) {
          return is_duplicate(p, q, ranges, cfg.dedupe_tolerance);
        };
        if (std::any_of(accepted.begin(), accepted.end(), dup) ||
            std::any_of(state.dataset.begin(), state.dataset.end(),
                        [&](const DesignRecord& r) { return dup(r.params); })) {
          ++st.duplicates;
          continue;
        }
        accepted.push_back(p);
        decisions.push_back(dv);
      }
    }
    st.short_batch = accepted.size() < target;

    const auto disc_scores = best->disc.scores(accepted);
    auto curves = evaluate_batch(evaluator, accepted, ledger, cfg.threads);
    std::vector<double> batch_scores;
    for (std::size_t i = 0; i < accepted.size(); ++i) {
      auto rec = make_record(state.dataset.size(), e, accepted[i], std::move(curves[i]), goal);
      rec.svc_decision = decisions[i];
      rec.disc_score = disc_scores[i];
      st.criterion_pass += label(rec.metrics, crit.spec);
      st.batch_goal_count += rec.goal_met;
      batch_scores.push_back(weighted_score(rec.metrics.values, goal.score_weights()));
      state.dataset.push_back(std::move(rec));
    }
    st.evaluated = accepted.size();
    st.acceptance_rate = st.drawn ? static_cast<double>(st.evaluated) / static_cast<double>(st.drawn) : 0.0;
    st.batch_median_score = median_of(batch_scores);
    for (const auto& r : state.dataset) st.dataset_valid_count += label(r.metrics, crit.spec);
    st.dataset_goal_count = state.goal_count();

    state.history.push_back(std::move(crit));
    state.stats.push_back(std::move(st));
    state.models.discriminator = std::move(best->disc);
    state.models.generator = std::move(gen.gen);
    if (svc) state.models.svc = std::move(svc->fit.model);
  }
  report.evolutions = state.history.size();
  report.evaluations = ledger.used();
  if (auto id = state.first_goal_id()) report.evals_to_goal = *id + 1;
  return report;
}

PerformanceSpace export_performance_space(const EvolutionState& state, const GoalSpec& goal) {
  if (state.dataset.empty()) throw std::invalid_argument("nothing to export");
  const auto& latest = state.history.empty() ? state.initial_criterion : state.history.back().spec;
  const auto names = goal.metric_names();
  const auto weights = goal.score_weights();
  PerformanceSpace out;
  std::string pts = "id,evolution";
  for (const auto& n : names) pts += "," + n;
  pts += ",score,valid,goal_met\n";
  std::size_t max_e = 0;
  for (const auto& r : state.dataset) {
    pts += fmt::format("{},{}", r.id, r.evolution);
    for (double v : r.metrics.values) pts += fmt::format(",{:.17g}", v);
    pts += fmt::format(",{:.17g},{},{}\n", weighted_score(r.metrics.values, weights),
                       label(r.metrics, latest) ? 1 : 0, r.goal_met ? 1 : 0);
    max_e = std::max(max_e, r.evolution);
  }
  std::string sum = "evolution,count,median_score,valid_count,goal_count\n";
  for (std::size_t e = 0; e <= max_e; ++e) {
    std::vector<double> s;
    std::size_t valid = 0, goals = 0;
    for (const auto& r : state.dataset) {
      if (r.evolution != e) continue;
      s.push_back(weighted_score(r.metrics.values, weights));
      valid += label(r.metrics, latest);
      goals += r.goal_met;
    }
    const double med = median_of(s);
    out.medians.push_back(med);
    sum += fmt::format("{},{},{:.17g},{},{}\n", e, s.size(), med, valid, goals);
  }
  out.points_csv = std::move(pts);
  out.summary_csv = std::move(sum);
  return out;
}

std::string dataset_to_jsonl(const EvolutionState& state) {
  const auto* latest = state.history.empty() ? &state.initial_criterion : &state.history.back().spec;
  std::string out;
  for (const auto& r : state.dataset) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["id"] = r.id;
    j["evolution"] = r.evolution;
    j["params"] = std::vector<double>(r.params.values().begin(), r.params.values().end());
    j["s11_db"] = r.curve.s11_db;
    nlohmann::json m;
    for (std::size_t k = 0; k < r.metrics.size(); ++k) m[r.metrics.names[k]] = r.metrics.values[k];
    j["metrics"] = m;
    j["score"] = r.score;
    j["goal_met"] = r.goal_met;
    j["label"] = label(r.metrics, *latest) ? 1 : 0;
    j["svc_decision"] = r.svc_decision;
    j["disc_score"] = r.disc_score;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<DesignRecord> dataset_from_jsonl(const std::string& text, const FrequencySweep& sweep,
                                             const GoalSpec& goal) {
  std::vector<DesignRecord> out;
  std::istringstream in(text);
  std::string line;
  const auto grid = sweep.grid();
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    if (j.value("schema_version", 0) != 1)
      throw std::invalid_argument(fmt::format("dataset line {}: unsupported schema version", lineno));
    S11Curve c;
    c.freq_ghz = grid;
    c.s11_db = j.at("s11_db").get<std::vector<double>>();
    if (c.s11_db.size() != grid.size())
      throw std::invalid_argument(fmt::format("dataset line {}: curve does not match the sweep", lineno));
    auto rec = make_record(j.at("id").get<std::size_t>(), j.at("evolution").get<std::size_t>(),
                           ParameterVector::from_span(j.at("params").get<std::vector<double>>()),
                           std::move(c), goal);
    rec.svc_decision = j.value("svc_decision", 0.0);
    rec.disc_score = j.value("disc_score", 0.0);
    out.push_back(std::move(rec));
  }
  return out;
}

nlohmann::json manifest(const EvolutionState& state, const EvolutionReport& report,
                        const EvolutionConfig& cfg, const GoalSpec& goal, const Evaluator& evaluator,
                        const BudgetLedger& ledger) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["evaluator"] = {{"name", evaluator.name()}, {"digest", evaluator.digest()}};
  const auto& sw = evaluator.sweep();
  j["sweep"] = {{"f_start_ghz", sw.f_start}, {"f_stop_ghz", sw.f_stop}, {"count", sw.count}};
  j["goal"] = to_json(goal);
  j["config"] = to_json(cfg);
  j["master_seed"] = cfg.seed;
  j["seed_rule"] = "splitmix64(master ^ fnv1a64(stream) ^ splitmix64(index))";
  j["initial_criterion"] = to_json(state.initial_criterion);
  j["seed_median_score"] = finite_or_null(state.seed_median_score);
  auto hist = nlohmann::json::array();
  for (const auto& h : state.history)
    hist.push_back({{"evolution", h.evolution},
                    {"schedule", to_json(h.entry)},
                    {"criterion", to_json(h.spec)},
                    {"backed_off", h.backed_off},
                    {"valid_count", h.valid_count},
                    {"dataset_size", h.dataset_size}});
  j["criterion_history"] = hist;
  auto stats = nlohmann::json::array();
  for (const auto& s : state.stats)
    stats.push_back({{"evolution", s.evolution},
                     {"widths", {s.widths[0], s.widths[1], s.widths[2]}},
                     {"grid_accuracy", s.grid_accuracy},
                     {"disc_test_accuracy", s.disc_test_accuracy},
                     {"disc_train_accuracy", s.disc_train_accuracy},
                     {"svc_test_accuracy", s.svc_test_accuracy},
                     {"svc_converged", s.svc_converged},
                     {"generator_iterations", s.generator_iterations},
                     {"generator_mean_score", s.generator_mean_score},
                     {"generator_saturated", s.generator_saturated},
                     {"drawn", s.drawn},
                     {"geometry_rejected", s.geometry_rejected},
                     {"svc_rejected", s.svc_rejected},
                     {"duplicates", s.duplicates},
                     {"evaluated", s.evaluated},
                     {"criterion_pass", s.criterion_pass},
                     {"acceptance_rate", s.acceptance_rate},
                     {"batch_median_score", finite_or_null(s.batch_median_score)},
                     {"batch_goal_count", s.batch_goal_count},
                     {"dataset_valid_count", s.dataset_valid_count},
                     {"dataset_goal_count", s.dataset_goal_count},
                     {"short_batch", s.short_batch},
                     {"partial", s.partial}});
  j["evolution_stats"] = stats;
  j["budget"] = {{"limit", ledger.limit()}, {"used", ledger.used()}, {"seed_evaluations", state.seed_evaluations}};
  j["report"] = {{"goal_met", report.goal_met},
                 {"budget_exhausted", report.budget_exhausted},
                 {"evolutions", report.evolutions},
                 {"evaluations", report.evaluations},
                 {"evals_to_goal", report.evals_to_goal ? nlohmann::json(*report.evals_to_goal) : nlohmann::json(nullptr)},
                 {"stop_reason", report.stop_reason},
                 {"dataset_size", state.dataset.size()},
                 {"goal_count", state.goal_count()}};
  j["state_digest"] = state_digest(state);
  return j;
}

std::string state_digest(const EvolutionState& state) {
  std::uint64_t h = fnv1a64(dataset_to_jsonl(state));
  for (const auto& c : state.history) h = fnv1a64(to_json(c.spec).dump(), h);
  return hex_digest(h);
}

}  // namespace antgen
