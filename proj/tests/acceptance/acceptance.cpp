// End-to-end acceptance: one PASS/FAIL line per criterion, exit status 1 if
// any line fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "antgen/baselines.hpp"
#include "antgen/config.hpp"
#include "antgen/evolution.hpp"
#include "antgen/neuralnet.hpp"
#include "antgen/svc.hpp"
#include "oracles.hpp"

using namespace antgen;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = fs::path(ANTGEN_SOURCE_DIR) / "configs";
const fs::path kScratch = fs::current_path() / "acceptance_out";

int failures = 0;

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

void report(const std::string& name, bool ok, const std::string& detail, const Timer& t) {
  failures += !ok;
  fmt::print("{} {} [{:.1f}s] {}\n", ok ? "PASS" : "FAIL", name, t.seconds(), detail);
  std::fflush(stdout);
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

// --- gradients -------------------------------------------------------------

std::vector<nn::LayerSpec> random_specs(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> depth(1, 3), width(1, 8), act(0, 2), coin(0, 1);
  const int layers = depth(rng);
  std::vector<nn::LayerSpec> specs;
  std::size_t in = static_cast<std::size_t>(width(rng));
  for (int l = 0; l < layers; ++l) {
    nn::LayerSpec s;
    s.in = in;
    const bool last = l == layers - 1;
    s.out = last ? 1 : static_cast<std::size_t>(width(rng) + 1);
    s.bias = coin(rng) == 1;
    s.batchnorm = !last && coin(rng) == 1;
    const nn::Activation table[3] = {nn::Activation::relu, nn::Activation::leaky_relu, nn::Activation::sigmoid};
    s.activation = last ? nn::Activation::sigmoid : table[act(rng)];
    specs.push_back(s);
    in = s.out;
  }
  return specs;
}

void gradient_correctness() {
  Timer t;
  std::mt19937_64 rng(777);
  std::normal_distribution<double> g(0, 1);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto specs = random_specs(rng);
    auto m = nn::init_model(specs, static_cast<std::uint64_t>(trial));
    for (auto& l : m.layers) {
      for (auto& b : l.bias) b = 0.3 * g(rng);
      for (auto& v : l.beta) v = 0.3 * g(rng);
    }
    Matrix x(6, specs.front().in);
    for (auto& v : x.values()) v = g(rng);
    std::vector<double> y(6);
    for (auto& v : y) v = std::bernoulli_distribution(0.5)(rng) ? 1.0 : 0.0;
    for (auto loss : {nn::Loss::bce, nn::Loss::generator, nn::Loss::generator_nonsaturating}) {
      const auto an = nn::grad(m, x, loss, y, nn::Mode::train);
      auto params = nn::parameter_views(m);
      const auto grads = nn::gradient_views(an);
      auto f = [&] { return nn::grad(m, x, loss, y, nn::Mode::train).loss; };
      for (std::size_t k = 0; k < params.size(); ++k)
        for (std::size_t i = 0; i < params[k].values.size(); ++i) {
          const double fd = oracle::central_difference(f, params[k].values[i]);
          const double a = grads[k][i];
          worst = std::max(worst, std::abs(a - fd) / std::max({std::abs(a), std::abs(fd), 1e-6}));
        }
    }
  }
  report("gradient-correctness", worst < 1e-4 && t.seconds() < 10,
         fmt::format("20 nets x 3 losses, max relative error {:.2e}", worst), t);
}

// --- geometry --------------------------------------------------------------

void geometry_oracle() {
  Timer t;
  const auto ranges = ParameterRanges::defaults();
  const auto conn = ConnectionMap::defaults();
  std::mt19937_64 rng(31337);
  int agree = 0, pass = 0;
  for (int s = 0; s < 1000; ++s) {
    const auto nodes = nodes_from(sample_random(ranges, rng), conn);
    std::vector<oracle::Disc> discs;
    for (const auto& n : nodes) discs.push_back({n.x, n.y, n.r});
    const auto o = oracle::check(discs, conn.pairs, conn.ground_node, conn.feed_node, conn.ground_y);
    const bool ok = check_geometry(nodes, conn).ok();
    agree += ok == (o == oracle::Verdict::pass);
    pass += ok;
  }
  report("geometry-oracle", agree == 1000 && t.seconds() < 5,
         fmt::format("agreement {}/1000, {} valid", agree, pass), t);
}

// --- svc -------------------------------------------------------------------

void svc_correctness() {
  Timer t;
  std::mt19937_64 rng(4242);
  std::normal_distribution<double> g(0, 1);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    Matrix x(20, 3);
    std::vector<double> y(20);
    for (std::size_t i = 0; i < 20; ++i) {
      y[i] = i % 2 ? -1.0 : 1.0;
      for (std::size_t j = 0; j < 3; ++j) x(i, j) = g(rng) + (j == 0 ? 0.8 * y[i] : 0.0);
    }
    const auto kernel = trial % 2 ? KernelSpec::linear() : KernelSpec::rbf(0.5);
    const double C = trial < 5 ? 1.0 : 10.0;
    SvcOptions opt;
    opt.tolerance = 1e-9;
    const auto fit = fit_svc(x, y, kernel, C, opt);
    Eigen::MatrixXd K(20, 20);
    for (Eigen::Index i = 0; i < 20; ++i)
      for (Eigen::Index j = 0; j < 20; ++j)
        K(i, j) = kernel(x.row(static_cast<std::size_t>(i)), x.row(static_cast<std::size_t>(j)));
    const auto ref = oracle::solve_svc_dual(K, Eigen::Map<const Eigen::VectorXd>(y.data(), 20), C);
    for (int q = 0; q < 40; ++q) {
      std::vector<double> pt = {g(rng), g(rng), g(rng)};
      double f = ref.bias;
      for (std::size_t i = 0; i < 20; ++i) f += ref.alpha(static_cast<Eigen::Index>(i)) * y[i] * kernel(x.row(i), pt);
      worst = std::max(worst, std::abs(fit.model.decision(pt) - f));
    }
  }
  std::uniform_real_distribution<double> u(-1, 1);
  Matrix x(100, 2);
  std::vector<double> y(100);
  for (std::size_t i = 0; i < 100; ++i) {
    y[i] = i % 2 ? -1.0 : 1.0;
    x(i, 0) = u(rng) + 1.5 * y[i];
    x(i, 1) = u(rng);
  }
  const auto sep = fit_svc(x, y, KernelSpec::linear(), 10.0);
  int right = 0;
  for (std::size_t i = 0; i < 100; ++i) right += sep.model.decision(x.row(i)) * y[i] > 0;
  report("svc-correctness", worst < 1e-3 && right == 100 && t.seconds() < 30,
         fmt::format("max decision gap {:.2e} over 10 problems, separable training accuracy {}/100", worst,
                     right),
         t);
}

// --- evolution runs ----------------------------------------------------------

struct SeedRun {
  std::uint64_t seed = 0;
  EvolutionState state;
  EvolutionReport report;
  double seconds = 0.0;
};

std::vector<SeedRun> example1_runs() {
  const auto base = load_run_config(kConfigs / "example1.json");
  const auto ev = make_evaluator(base.evaluator, base.evaluator_options);
  const auto ranges = ParameterRanges::defaults();
  const auto conn = ConnectionMap::defaults();
  std::vector<SeedRun> runs;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Timer t;
    auto cfg = base;
    cfg.seed = seed;
    cfg.sync();
    BudgetLedger ledger(cfg.evolution.budget);
    SeedRun r;
    r.seed = seed;
    r.state = seed_population(cfg.evolution, ranges, conn, *ev, cfg.goal, ledger);
    r.report = run_evolution(r.state, cfg.evolution, cfg.goal, *ev, ranges, conn, ledger);
    r.seconds = t.seconds();
    fmt::print("  example-1 seed {}: {} evolutions, {} evaluations, {:.0f}s\n", seed, r.report.evolutions,
               r.report.evaluations, r.seconds);
    runs.push_back(std::move(r));
  }
  return runs;
}

void discriminator_quality(const std::vector<SeedRun>& runs) {
  Timer t;
  auto all_above = [](const SeedRun& r) {
    return !r.state.stats.empty() && std::all_of(r.state.stats.begin(), r.state.stats.end(), [](const auto& s) {
      return s.disc_test_accuracy >= 0.75;
    });
  };
  const auto& canon = runs.front();
  std::string accs;
  for (const auto& s : canon.state.stats) accs += fmt::format("{}{:.2f}", accs.empty() ? "" : " ", s.disc_test_accuracy);
  const auto n = std::count_if(runs.begin(), runs.end(), all_above);
  double lo = 1.0, hi = 0.0, sum = 0.0;
  std::size_t k = 0;
  for (const auto& r : runs)
    for (const auto& s : r.state.stats) {
      lo = std::min(lo, s.disc_test_accuracy);
      hi = std::max(hi, s.disc_test_accuracy);
      sum += s.disc_test_accuracy;
      ++k;
    }
  report("discriminator-accuracy", all_above(canon) && canon.seconds < 300,
         fmt::format("seed 0 held-out accuracy per evolution [{}]; all >= 0.75 on {}/10 seeds; range {:.2f}-{:.2f}, "
                     "mean {:.3f}",
                     accs, n, lo, hi, k ? sum / static_cast<double>(k) : 0.0),
         t);
}

void generator_efficacy(const std::vector<SeedRun>& runs) {
  Timer t;
  std::vector<double> eff;
  double total = 0.0;
  for (const auto& r : runs) {
    total += r.seconds;
    if (r.state.stats.empty() || r.state.stats[0].evaluated == 0) continue;
    eff.push_back(static_cast<double>(r.state.stats[0].criterion_pass) /
                  static_cast<double>(r.state.stats[0].evaluated));
  }
  std::sort(eff.begin(), eff.end());
  const double med = eff.empty() ? 0.0
                                 : (eff.size() % 2 ? eff[eff.size() / 2]
                                                   : 0.5 * (eff[eff.size() / 2 - 1] + eff[eff.size() / 2]));
  std::string all;
  for (double e : eff) all += fmt::format("{}{:.2f}", all.empty() ? "" : " ", e);
  report("generator-efficacy", eff.size() == 10 && med >= 0.6 && total < 600,
         fmt::format("first-evolution pass fraction, 10-seed median {:.2f} [{}]; runs took {:.0f}s", med, all, total),
         t);
}

void evolution_progress(const std::vector<SeedRun>& runs) {
  Timer t;
  int ok_runs = 0;
  std::string detail;
  for (const auto& r : runs) {
    const auto& st = r.state;
    int down = 0;
    double prev = st.seed_median_score;
    for (const auto& s : st.stats) {
      down += s.batch_median_score <= prev;
      prev = s.batch_median_score;
    }
    bool strict = true;
    for (std::size_t e = 1; e < st.history.size(); ++e)
      strict = strict && st.history[e].spec.threshold < st.history[e - 1].spec.threshold;
    // Runs that stop early on the goal need the same share of non-increasing steps.
    const auto n = static_cast<int>(st.stats.size());
    const bool ok = n > 0 && 7 * down >= 5 * n && strict;
    ok_runs += ok;
    detail += fmt::format(" s{}:{}/{}{}", r.seed, down, n, strict ? "" : "!");
  }
  report("evolution-progress", ok_runs == 10,
         fmt::format("{}/10 runs with non-increasing batch medians in >= 5 of 7 evolutions and strictly decreasing "
                     "criteria;{}",
                     ok_runs, detail),
         t);
}

// --- end to end -------------------------------------------------------------

struct EndToEnd {
  int hits = 0;
  std::vector<std::string> evals;
};

EndToEnd end_to_end(const std::string& config, std::size_t limit) {
  EndToEnd out;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto cfg = load_run_config(kConfigs / (config + ".json"));
    cfg.seed = seed;
    cfg.out_dir = kScratch / fmt::format("{}_{}", config, seed);
    cfg.sync();
    cmd_evolve(cfg);
    const auto m = nlohmann::json::parse(slurp(cfg.out_dir / "manifest.json"));
    const auto& e = m.at("report").at("evals_to_goal");
    const bool hit = !e.is_null() && e.get<std::size_t>() <= limit;
    out.hits += hit;
    out.evals.push_back(e.is_null() ? fmt::format(">{}", limit) : std::to_string(e.get<std::size_t>()));
  }
  return out;
}

void goal_attainment() {
  Timer t;
  const auto dual = end_to_end("dual_resonance", 1000);
  const auto band = end_to_end("broadband", 2000);
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : " ") + x;
    return s;
  };
  report("goal-attainment", dual.hits >= 8 && band.hits >= 6 && t.seconds() < 1800,
         fmt::format("dual resonance {}/10 within 1000 [{}]; broadband {}/10 within 2000 [{}]", dual.hits,
                     join(dual.evals), band.hits, join(band.evals)),
         t);
}

// --- bench ------------------------------------------------------------------

bool baseline_bounds(std::string& detail) {
  auto box = [](std::size_t d, double lo, double hi) { return std::vector<Interval>(d, Interval{lo, hi}); };
  bool ok = true;
  auto nm = Objective::from_function(sphere, box(2, -5, 5), 200, 1e-6);
  const bool nm_ok = nelder_mead(nm, std::vector<double>{1.0, 1.0}).best < 1e-6;
  int cma_hits = 0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    auto o = Objective::from_function(sphere, box(20, -5, 5), 5000, 1e-6);
    cma_hits += cma_es(o, s).best < 1e-6;
  }
  auto tr = Objective::from_function(rosenbrock, box(5, -2, 2), 1000, 1e-3);
  const bool tr_ok = trust_region(tr, std::vector<double>(5, 0.0)).best < 1e-3;
  int pso_hits = 0, ga_hits = 0;
  double ga_worst = 0.0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    auto p = Objective::from_function(rosenbrock, box(5, -2, 2), 60000, 1e-3);
    pso_hits += pso(p, s).best < 1e-3;
    auto g = Objective::from_function(rosenbrock, box(5, -2, 2), 10000);
    const double b = ga(g, s).best;
    ga_worst = std::max(ga_worst, b);
    auto gs = Objective::from_function(sphere, box(5, -2, 2), 10000, 1e-3);
    ga_hits += ga(gs, s).best < 1e-3 && b < 5.0;
  }
  ok = nm_ok && cma_hits >= 9 && tr_ok && pso_hits == 10 && ga_hits == 10;
  detail = fmt::format(
      "NM 2-D sphere {}; CMA-ES 20-D sphere {}/10; Rosenbrock 5-D: TR <1e-3 in 1e3 {}, PSO <1e-3 in 6e4 {}/10, "
      "GA sphere <1e-3 and Rosenbrock <5 in 1e4 {}/10 (worst Rosenbrock {:.3f})",
      nm_ok ? "ok" : "missed", cma_hits, tr_ok ? "ok" : "missed", pso_hits, ga_hits, ga_worst);
  return ok;
}

void bench_harness() {
  Timer t;
  auto cfg = load_run_config(kConfigs / "bench_broadband.json");
  cfg.out_dir = kScratch / "bench";
  fs::create_directories(cfg.out_dir);
  const auto rep = run_bench(cfg);
  const auto csv = bench_to_csv(rep);
  std::ofstream(cfg.out_dir / "bench.csv") << csv;

  bool shape = rep.rows.size() == cfg.bench.methods.size() * cfg.bench.seeds.size();
  bool accounting = true;
  for (const auto& r : rep.rows) {
    accounting = accounting && r.evaluations <= rep.budget && r.evaluations >= 1;
    if (r.evals_to_goal) accounting = accounting && *r.evals_to_goal <= r.evaluations;
  }
  std::string summary;
  for (const auto& m : cfg.bench.methods) {
    std::vector<double> e;
    int hits = 0;
    for (const auto& r : rep.rows)
      if (r.method == m) {
        hits += r.evals_to_goal.has_value();
        e.push_back(r.evals_to_goal ? static_cast<double>(*r.evals_to_goal) : static_cast<double>(rep.budget + 1));
      }
    std::sort(e.begin(), e.end());
    summary += fmt::format(" {} {}/{} median {:.0f};", m, hits, e.size(), e.empty() ? 0.0 : e[e.size() / 2]);
  }
  std::string bounds;
  const bool bounds_ok = baseline_bounds(bounds);
  report("bench-harness", shape && accounting && bounds_ok,
         fmt::format("{} rows, budget {} each, accounting {};{} {}; csv {}", rep.rows.size(), rep.budget,
                     accounting ? "consistent" : "INCONSISTENT", summary, bounds,
                     (cfg.out_dir / "bench.csv").string()),
         t);
}

// --- reproducibility -----------------------------------------------------------

void reproducibility() {
  Timer t;
  bool same = true;
  for (const char* name : {"example1", "broadband"}) {
    std::string first_manifest, first_data;
    for (int rep = 0; rep < 2; ++rep) {
      auto cfg = load_run_config(kConfigs / (std::string(name) + ".json"));
      cfg.seed = 5;
      cfg.out_dir = kScratch / fmt::format("repro_{}_{}", name, rep);
      cfg.sync();
      cmd_evolve(cfg);
      const auto m = slurp(cfg.out_dir / "manifest.json");
      const auto d = slurp(cfg.out_dir / "dataset.jsonl");
      if (rep == 0) {
        first_manifest = m;
        first_data = d;
      } else {
        same = same && m == first_manifest && d == first_data && !d.empty();
      }
    }
  }
  report("reproducibility", same, "two cmd_evolve runs per config give byte-identical manifest.json and dataset.jsonl",
         t);
}

// --- target function identities ---------------------------------------------------

void target_identities() {
  Timer t;
  bool ok = true;
  S11Curve c;
  c.freq_ghz = {1.0, 2.0, 3.0, 4.0};
  c.s11_db = {-30, -3, -12, -10};
  const double hand = band_target(c, 1.5, 4.0);
  ok = ok && std::abs(hand - 7.0 / 3.0) < 1e-12;
  S11Curve pass;
  pass.freq_ghz = FrequencySweep{}.grid();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-40, -10);
  for (std::size_t i = 0; i < pass.freq_ghz.size(); ++i) pass.s11_db.push_back(u(rng));
  const auto goal = GoalSpec::broadband();
  const auto m = evaluate_metrics(pass, goal);
  ok = ok && goal.score(m) == 0.0 && band_target(pass, 2.0, 6.0) == 0.0;

  std::size_t cases = 0;
  std::vector<double> levels;
  for (int i = -20; i <= 20; ++i) levels.push_back(0.5 * i);
  for (double ta : {-2.0, 0.0, 1.5})
    for (double tb : {-1.0, 0.5}) {
      const auto pm = CriterionSpec::per_metric({ta, tb});
      const auto ws = CriterionSpec::weighted_sum({1.0, 2.0}, ta + tb);
      for (double a : levels)
        for (double b : levels) {
          const std::vector<double> p = {a, b};
          ok = ok && label(p, pm) == (a <= ta && b <= tb);
          ok = ok && label(p, ws) == (a + 2.0 * b <= ta + tb);
          ++cases;
        }
    }
  report("target-identities", ok,
         fmt::format("band target hand case {:.4f}, all-passing curve 0, {} labeling lattice points", hand, cases), t);
}

}  // namespace

int main() {
  Timer total;
  fs::create_directories(kScratch);
  try {
    gradient_correctness();
    geometry_oracle();
    svc_correctness();
    target_identities();
    {
      const auto runs = example1_runs();
      discriminator_quality(runs);
      generator_efficacy(runs);
      evolution_progress(runs);
    }
    goal_attainment();
    reproducibility();
    bench_harness();
  } catch (const std::exception& e) {
    fmt::print("FAIL aborted: {}\n", e.what());
    return 1;
  }
  fmt::print("{} failing, total {:.0f}s\n", failures, total.seconds());
  return failures ? 1 : 0;
}
