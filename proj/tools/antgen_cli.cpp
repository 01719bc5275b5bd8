// antgen: seed datasets, run evolutions and benchmark baselines.

#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "antgen/config.hpp"

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> parallel;
  std::optional<std::string> out;
  std::optional<std::string> evaluator;
  std::optional<std::size_t> budget;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "run configuration (JSON)")->required();
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--parallel", o.parallel, "evaluation threads")->check(CLI::PositiveNumber);
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--evaluator", o.evaluator, "evaluator name (surrogate, external)");
  cmd->add_option("--budget", o.budget, "evaluation budget");
}

antgen::RunConfig resolve(const Overrides& o) {
  auto cfg = antgen::load_run_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (o.parallel) cfg.threads = *o.parallel;
  if (o.out) cfg.out_dir = *o.out;
  if (o.evaluator) cfg.evaluator = *o.evaluator;
  if (o.budget) {
    cfg.evolution.budget = *o.budget;
    cfg.bench.budget = *o.budget;
  }
  cfg.sync();
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"antgen: generative antenna design with budgeted evaluation"};
  app.require_subcommand(1);
  Overrides o;
  auto* seed = app.add_subcommand("seed", "sample and evaluate the random seed population");
  auto* evolve = app.add_subcommand("evolve", "run the evolutionary design loop");
  auto* bench = app.add_subcommand("bench", "compare against classical optimizers");
  for (auto* c : {seed, evolve, bench}) add_common(c, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return antgen::kExitConfig;
  }

  try {
    const auto cfg = resolve(o);
    if (seed->parsed()) return antgen::cmd_seed(cfg);
    if (evolve->parsed()) return antgen::cmd_evolve(cfg);
    return antgen::cmd_bench(cfg);
  } catch (const antgen::ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return antgen::kExitConfig;
  } catch (const antgen::BudgetExhausted& e) {
    fmt::print(stderr, "budget exhausted: {}\n", e.what());
    return antgen::kExitBudget;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
}
