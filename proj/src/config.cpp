#include "antgen/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "antgen/baselines.hpp"
#include "antgen/hash.hpp"

namespace antgen {

namespace fs = std::filesystem;

namespace {

void check_keys(const nlohmann::json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ConfigError(fmt::format("unknown key '{}' in {}", k, where));
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << text;
  if (!f) throw std::runtime_error("write failed for " + p.string());
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::string goal_label(const GoalSpec& g) {
  switch (g.mode) {
    case GoalSpec::Mode::band:
      return "broadband";
    case GoalSpec::Mode::point_sum:
      return "dual_resonance_sum";
    case GoalSpec::Mode::per_point:
      return "dual_resonance";
  }
  return "goal";
}

}  // namespace

void RunConfig::sync() {
  evolution.seed = seed;
  evolution.threads = threads;
}

void RunConfig::validate() const {
  if (threads < 1) throw ConfigError("parallel must be >= 1");
  try {
    evolution.validate();
    auto ev = make_evaluator(evaluator, evaluator_options);
    goal.validate(ev->sweep());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  for (const auto& m : bench.methods) {
    if (m == "proposed") continue;
    const auto& names = baseline_names();
    if (std::find(names.begin(), names.end(), m) == names.end())
      throw ConfigError("unknown bench method: " + m);
  }
}

RunConfig run_config_from_json(const nlohmann::json& j) {
  check_keys(j, {"schema_version", "seed", "evaluator", "evaluator_options", "goal", "evolution", "bench",
                 "out", "seed_dataset", "parallel"},
             "config");
  if (!j.contains("schema_version")) throw ConfigError("config is missing schema_version");
  if (j.at("schema_version") != kSchemaVersion)
    throw ConfigError(fmt::format("unsupported config schema_version {}", j.at("schema_version").dump()));
  RunConfig c;
  try {
    c.seed = j.value("seed", c.seed);
    c.evaluator = j.value("evaluator", c.evaluator);
    if (j.contains("evaluator_options")) c.evaluator_options = j.at("evaluator_options");
    if (j.contains("goal")) c.goal = goal_from_json(j.at("goal"));
    if (j.contains("evolution")) c.evolution = evolution_config_from_json(j.at("evolution"));
    if (j.contains("bench")) {
      const auto& b = j.at("bench");
      check_keys(b, {"methods", "seeds", "budget"}, "bench");
      if (b.contains("methods")) c.bench.methods = b.at("methods").get<std::vector<std::string>>();
      if (b.contains("seeds")) {
        if (b.at("seeds").is_number_unsigned()) {
          c.bench.seeds.clear();
          for (std::uint64_t s = 0; s < b.at("seeds").get<std::uint64_t>(); ++s) c.bench.seeds.push_back(s);
        } else {
          c.bench.seeds = b.at("seeds").get<std::vector<std::uint64_t>>();
        }
      }
      c.bench.budget = b.value("budget", c.bench.budget);
    }
    c.out_dir = j.value("out", c.out_dir.string());
    if (j.contains("seed_dataset")) c.seed_dataset = j.at("seed_dataset").get<std::string>();
    c.threads = j.value("parallel", c.threads);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  c.sync();
  c.validate();
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
  return run_config_from_json(j);
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["seed"] = c.seed;
  j["evaluator"] = c.evaluator;
  j["evaluator_options"] = c.evaluator_options;
  j["goal"] = to_json(c.goal);
  j["evolution"] = to_json(c.evolution);
  j["bench"] = {{"methods", c.bench.methods}, {"seeds", c.bench.seeds}, {"budget", c.bench.budget}};
  j["out"] = c.out_dir.string();
  if (c.seed_dataset) j["seed_dataset"] = c.seed_dataset->string();
  j["parallel"] = c.threads;
  return j;
}

int cmd_seed(const RunConfig& cfg) {
  const auto ev = make_evaluator(cfg.evaluator, cfg.evaluator_options);
  const auto ranges = ParameterRanges::defaults();
  const auto conn = ConnectionMap::defaults();
  BudgetLedger ledger(cfg.evolution.budget);
  EvolutionState state;
  try {
    state = seed_population(cfg.evolution, ranges, conn, *ev, cfg.goal, ledger);
  } catch (const BudgetExhausted& e) {
    fmt::print(stderr, "budget exhausted: {}\n", e.what());
    return kExitBudget;
  }
  fs::create_directories(cfg.out_dir);
  write_file(cfg.out_dir / "seed_dataset.jsonl", dataset_to_jsonl(state));
  std::vector<AntennaLayout> layouts;
  for (const auto& r : state.dataset) layouts.push_back(build_layout(r.params, conn));
  write_file(cfg.out_dir / "seed_gallery.svg", layouts_to_svg(layouts));
  nlohmann::json m;
  m["schema_version"] = kSchemaVersion;
  m["evaluator"] = {{"name", ev->name()}, {"digest", ev->digest()}};
  m["goal"] = to_json(cfg.goal);
  m["master_seed"] = cfg.seed;
  m["count"] = state.dataset.size();
  m["budget_used"] = ledger.used();
  m["seed_median_score"] = state.seed_median_score;
  m["initial_criterion"] = to_json(state.initial_criterion);
  write_file(cfg.out_dir / "seed_manifest.json", m.dump(2) + "\n");
  return kExitOk;
}

int cmd_evolve(const RunConfig& cfg) {
  const auto ev = make_evaluator(cfg.evaluator, cfg.evaluator_options);
  const auto ranges = ParameterRanges::defaults();
  const auto conn = ConnectionMap::defaults();
  BudgetLedger ledger(cfg.evolution.budget);
  fs::create_directories(cfg.out_dir);

  EvolutionState state;
  EvolutionReport report;
  bool seeded = false;
  if (cfg.seed_dataset) {
    const auto designs = dataset_from_jsonl(read_file(*cfg.seed_dataset), ev->sweep(), cfg.goal);
    state = rescore(designs, cfg.evolution, cfg.goal);
    seeded = true;
  } else {
    try {
      state = seed_population(cfg.evolution, ranges, conn, *ev, cfg.goal, ledger);
      seeded = true;
    } catch (const BudgetExhausted& e) {
      fmt::print(stderr, "budget exhausted: {}\n", e.what());
      report.budget_exhausted = true;
      report.stop_reason = "budget";
    }
  }
  if (seeded) report = run_evolution(state, cfg.evolution, cfg.goal, *ev, ranges, conn, ledger);
  report.evaluations = ledger.used();

  auto m = manifest(state, report, cfg.evolution, cfg.goal, *ev, ledger);
  m["seed_dataset"] = cfg.seed_dataset ? nlohmann::json(cfg.seed_dataset->string()) : nlohmann::json(nullptr);
  write_file(cfg.out_dir / "manifest.json", m.dump(2) + "\n");
  write_file(cfg.out_dir / "dataset.jsonl", dataset_to_jsonl(state));
  if (!state.dataset.empty()) {
    const auto space = export_performance_space(state, cfg.goal);
    write_file(cfg.out_dir / "performance_points.csv", space.points_csv);
    write_file(cfg.out_dir / "performance_summary.csv", space.summary_csv);
    std::vector<AntennaLayout> layouts;
    for (const auto& r : state.dataset)
      if (r.goal_met) layouts.push_back(build_layout(r.params, conn));
    if (!layouts.empty()) write_file(cfg.out_dir / "goal_designs.svg", layouts_to_svg(layouts));
  }
  if (state.models.discriminator) {
    auto j = nn::to_json(state.models.discriminator->model);
    write_file(cfg.out_dir / "discriminator.json", j.dump() + "\n");
  }
  if (state.models.generator) {
    auto j = nn::to_json(state.models.generator->model);
    j["noise_dim"] = state.models.generator->noise_dim;
    write_file(cfg.out_dir / "generator.json", j.dump() + "\n");
  }
  if (state.models.svc) write_file(cfg.out_dir / "svc.json", to_json(*state.models.svc).dump() + "\n");

  if (report.goal_met) return kExitOk;
  return kExitBudget;
}

BenchReport run_bench(const RunConfig& cfg) {
  if (cfg.bench.budget == 0) throw ConfigError("bench budget must be >= 1");
  const auto ev = make_evaluator(cfg.evaluator, cfg.evaluator_options);
  const auto ranges = ParameterRanges::defaults();
  const auto conn = ConnectionMap::defaults();
  BenchReport rep;
  rep.evaluator_digest = ev->digest();
  rep.goal = goal_label(cfg.goal);
  rep.budget = cfg.bench.budget;
  GoalSpec goal = cfg.goal;
  goal.required_valid_count = 1;

  for (const auto& method : cfg.bench.methods) {
    for (const auto seed : cfg.bench.seeds) {
      BenchRow row;
      row.method = method;
      row.seed = seed;
      if (method == "proposed") {
        auto ec = cfg.evolution;
        ec.seed = derive_seed(cfg.seed, "bench-proposed", seed);
        ec.budget = cfg.bench.budget;
        ec.max_evolutions = std::max<std::size_t>(ec.max_evolutions, cfg.bench.budget);
        BudgetLedger ledger(cfg.bench.budget);
        auto state = seed_population(ec, ranges, conn, *ev, goal, ledger);
        auto r = run_evolution(state, ec, goal, *ev, ranges, conn, ledger);
        row.evals_to_goal = r.evals_to_goal;
        row.evaluations = ledger.used();
        row.best_score = std::numeric_limits<double>::infinity();
        for (const auto& d : state.dataset) row.best_score = std::min(row.best_score, d.score);
      } else {
        auto obj = Objective::from_goal(*ev, goal, ranges, conn, cfg.bench.budget);
        std::mt19937_64 rng(derive_seed(cfg.seed, "bench-start", seed));
        const auto start = sample_valid(ranges, conn, rng);
        auto r = run_baseline(method, obj, start.values(), derive_seed(cfg.seed, "bench-" + method, seed));
        row.evals_to_goal = r.evals_to_goal;
        row.evaluations = r.evaluations;
        row.best_score = r.best;
      }
      rep.rows.push_back(row);
    }
  }
  return rep;
}

std::string bench_to_csv(const BenchReport& r) {
  std::string out = fmt::format("# schema_version={}\n# evaluator_digest={}\n# budget={}\n", kSchemaVersion,
                                r.evaluator_digest, r.budget);
  out += "method,goal,seed,evals_to_goal,best_score,evaluations\n";
  for (const auto& row : r.rows) {
    const std::string e2g = row.evals_to_goal ? std::to_string(*row.evals_to_goal) : fmt::format(">{}", r.budget);
    out += fmt::format("{},{},{},{},{:.17g},{}\n", row.method, r.goal, row.seed, e2g, row.best_score,
                       row.evaluations);
  }
  return out;
}

int cmd_bench(const RunConfig& cfg) {
  const auto rep = run_bench(cfg);
  fs::create_directories(cfg.out_dir);
  write_file(cfg.out_dir / "bench.csv", bench_to_csv(rep));
  return kExitOk;
}

}  // namespace antgen
