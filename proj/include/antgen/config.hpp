#pragma once

// Run configuration documents and the seed / evolve / bench commands.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "antgen/evolution.hpp"
#include "antgen/goal.hpp"

namespace antgen {

inline constexpr int kSchemaVersion = 1;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BenchConfig {
  std::vector<std::string> methods = {"proposed", "nelder_mead", "cma_es", "pso", "ga", "trust_region"};
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::size_t budget = 1000;
};

struct RunConfig {
  std::string evaluator = "surrogate";
  nlohmann::json evaluator_options = nlohmann::json::object();
  GoalSpec goal = GoalSpec::dual_resonance();
  EvolutionConfig evolution = EvolutionConfig::example1();
  BenchConfig bench;
  std::filesystem::path out_dir = "out";
  std::optional<std::filesystem::path> seed_dataset;  // reuse evaluated seeds instead of sampling
  std::uint64_t seed = 0;
  int threads = 1;

  // Pushes the master seed and thread count into the evolution config.
  void sync();
  void validate() const;
};

// Throws ConfigError on unknown keys, wrong schema versions or invalid values.
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& c);

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitBudget = 3;

// Writes seed_dataset.jsonl, seed_gallery.svg and seed_manifest.json.
int cmd_seed(const RunConfig& cfg);
// Writes manifest.json, dataset.jsonl, the model dumps and the performance
// space CSVs. Returns kExitOk when the goal is met, kExitBudget otherwise.
int cmd_evolve(const RunConfig& cfg);
// Writes bench.csv: one row per (method, seed).
int cmd_bench(const RunConfig& cfg);

struct BenchRow {
  std::string method;
  std::uint64_t seed = 0;
  std::optional<std::size_t> evals_to_goal;
  double best_score = 0.0;
  std::size_t evaluations = 0;
};

struct BenchReport {
  std::string evaluator_digest;
  std::string goal;
  std::size_t budget = 0;
  std::vector<BenchRow> rows;
};

BenchReport run_bench(const RunConfig& cfg);
std::string bench_to_csv(const BenchReport& r);

}  // namespace antgen
