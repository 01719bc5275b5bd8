#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "antgen/evolution.hpp"
#include "antgen/generative.hpp"

using namespace antgen;

namespace {

// Blobs on either side of a random hyperplane through the unit-cube center,
// with a margin, mapped onto the parameter ranges.
struct Blobs {
  std::vector<ParameterVector> x;
  std::vector<int> y;
};

Blobs make_blobs(std::size_t n, std::uint64_t seed) {
  const auto ranges = ParameterRanges::defaults();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0, 1);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> w(kParameterCount);
  double norm = 0;
  for (auto& v : w) {
    v = g(rng);
    norm += v * v;
  }
  for (auto& v : w) v /= std::sqrt(norm);
  Blobs b;
  while (b.x.size() < n) {
    std::array<double, kParameterCount> unit{};
    double s = 0;
    for (std::size_t i = 0; i < kParameterCount; ++i) {
      unit[i] = u(rng);
      s += w[i] * (unit[i] - 0.5);
    }
    if (std::abs(s) < 0.1) continue;
    ParameterVector p;
    for (std::size_t i = 0; i < kParameterCount; ++i) p[i] = ranges.from_unit(i, unit[i]);
    b.x.push_back(p);
    b.y.push_back(s > 0 ? 1 : 0);
  }
  return b;
}

nn::TrainConfig disc_cfg(std::uint64_t seed) {
  auto c = EvolutionConfig::example1().discriminator_train;
  c.seed = seed;
  return c;
}

Discriminator constant_discriminator(double p) {
  Discriminator d;
  d.model = nn::init_model(discriminator_specs({4, 4, 4}), 1);
  for (auto& l : d.model.layers) l.weight.fill(0.0);
  d.model.layers.back().bias[0] = std::log(p / (1.0 - p));
  return d;
}

}  // namespace

TEST_CASE("normalization round trip") {
  const auto ranges = ParameterRanges::defaults();
  std::mt19937_64 rng(1);
  std::vector<ParameterVector> ps;
  for (int i = 0; i < 50; ++i) ps.push_back(sample_random(ranges, rng));
  const auto unit = normalize(ranges, ps);
  for (double v : unit.values()) CHECK((v >= 0.0 && v <= 1.0));
  const auto back = denormalize(ranges, unit);
  for (std::size_t i = 0; i < ps.size(); ++i)
    for (std::size_t k = 0; k < kParameterCount; ++k) CHECK(back[i][k] == doctest::Approx(ps[i][k]).epsilon(1e-12));
}

TEST_CASE("stratified split keeps class proportions") {
  const auto b = make_blobs(100, 3);
  const auto split = SplitDataset::stratified(b.x, b.y, 0.2, 9);
  CHECK(split.size() == 100);
  std::size_t n1 = 0, t1 = 0;
  for (int y : b.y) n1 += y;
  for (int y : split.test_y) t1 += y;
  CHECK(t1 == static_cast<std::size_t>(std::lround(0.2 * static_cast<double>(n1))));
  CHECK(split.test_y.size() - t1 == static_cast<std::size_t>(std::lround(0.2 * static_cast<double>(100 - n1))));
  CHECK(split.train_has_both_classes());

  // A class of one stays on the training side.
  std::vector<int> y(10, 0);
  y[3] = 1;
  const auto tiny = SplitDataset::stratified(std::span(b.x).first(10), y, 0.5, 1);
  CHECK(tiny.train_has_both_classes());
}

TEST_CASE("discriminator separates 20-D blobs") {
  const auto b = make_blobs(400, 7);
  const auto split = SplitDataset::stratified(b.x, b.y, 0.2, 2);
  const auto res = train_discriminator(split, ParameterRanges::defaults(), {64, 128, 256}, disc_cfg(5));
  CHECK(res.test_accuracy >= 0.95);
  CHECK(res.disc.accuracy(split.test_x, split.test_y) == res.test_accuracy);

  const auto scores = res.disc.scores(b.x);
  for (std::size_t i = 0; i < b.x.size(); ++i) {
    CHECK(scores[i] > 0.0);
    CHECK(scores[i] < 1.0);
    CHECK(res.disc.predict(b.x[i]) == (scores[i] >= 0.5));
  }

  // Duplicating the evaluation set leaves accuracy unchanged.
  auto dx = split.test_x;
  auto dy = split.test_y;
  dx.insert(dx.end(), split.test_x.begin(), split.test_x.end());
  dy.insert(dy.end(), split.test_y.begin(), split.test_y.end());
  CHECK(res.disc.accuracy(dx, dy) == doctest::Approx(res.test_accuracy));
}

TEST_CASE("discriminator training is reproducible and needs both classes") {
  const auto b = make_blobs(120, 4);
  const auto split = SplitDataset::stratified(b.x, b.y, 0.2, 2);
  const auto a = train_discriminator(split, ParameterRanges::defaults(), {16, 16, 16}, disc_cfg(3));
  const auto c = train_discriminator(split, ParameterRanges::defaults(), {16, 16, 16}, disc_cfg(3));
  CHECK(a.disc.model == c.disc.model);

  std::vector<int> ones(b.y.size(), 1);
  const auto mono = SplitDataset::stratified(b.x, ones, 0.2, 2);
  CHECK_THROWS_AS(train_discriminator(mono, ParameterRanges::defaults(), {8, 8, 8}, disc_cfg(1)),
                  TrainingError);
}

TEST_CASE("zero-weight generator emits range midpoints") {
  Generator g;
  g.model = nn::init_model(generator_specs(20), 1);
  for (auto& l : g.model.layers) l.weight.fill(0.0);
  std::mt19937_64 rng(3);
  const auto unit = g.generate_unit(g.sample_noise(10, rng));
  for (double v : unit.values()) CHECK(v == 0.5);
  const auto ranges = ParameterRanges::defaults();
  const auto mid = ranges.midpoint();
  for (const auto& p : denormalize(ranges, unit))
    for (std::size_t k = 0; k < kParameterCount; ++k) CHECK(p[k] == doctest::Approx(mid[k]).epsilon(1e-14));
}

TEST_CASE("generator outputs stay inside the ranges") {
  Generator g;
  g.model = nn::init_model(generator_specs(20), 8);
  const auto ranges = ParameterRanges::defaults();
  std::mt19937_64 rng(11);
  std::size_t total = 0;
  for (int batch = 0; batch < 10; ++batch) {
    const auto ps = denormalize(ranges, g.generate_unit(g.sample_noise(10000, rng)));
    for (const auto& p : ps) CHECK(ranges.contains(p));
    total += ps.size();
  }
  CHECK(total == 100000);
}

TEST_CASE("constant discriminator gives no signal to the generator") {
  const auto d = constant_discriminator(0.9);
  GeneratorConfig cfg;
  cfg.train.optimizer = nn::OptimizerConfig::sgd(1e-2);
  cfg.train.batch_size = 32;
  cfg.train.max_steps = 20;
  cfg.stop_threshold = 0.99;
  cfg.train.seed = 4;
  const auto res = train_generator(d, cfg);
  CHECK(res.initial_loss == doctest::Approx(std::log(0.1)));
  CHECK(res.final_loss == doctest::Approx(std::log(0.1)));

  const auto init = nn::init_model(generator_specs(cfg.noise_dim), cfg.train.seed);
  // Compare trainable parameters only; running statistics still move.
  for (std::size_t l = 0; l < init.layers.size(); ++l) {
    const auto& a = init.layers[l];
    const auto& b = res.gen.model.layers[l];
    for (std::size_t k = 0; k < a.weight.size(); ++k)
      CHECK(std::abs(a.weight.values()[k] - b.weight.values()[k]) < 1e-12);
    for (std::size_t k = 0; k < a.gamma.size(); ++k) {
      CHECK(std::abs(a.gamma[k] - b.gamma[k]) < 1e-12);
      CHECK(std::abs(a.beta[k] - b.beta[k]) < 1e-12);
    }
  }
}

TEST_CASE("generator training leaves the discriminator untouched and lowers its loss") {
  const auto ranges = ParameterRanges::defaults();
  const auto b = make_blobs(200, 21);
  const auto split = SplitDataset::stratified(b.x, b.y, 0.2, 1);
  const auto disc = train_discriminator(split, ranges, {32, 32, 32}, disc_cfg(2)).disc;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto before = disc.model;
    auto cfg = EvolutionConfig::example1().generator;
    cfg.train.seed = seed;
    cfg.train.max_steps = 60;
    const auto res = train_generator(disc, cfg);
    CHECK(disc.model == before);
    CAPTURE(seed);
    CHECK(res.final_loss < res.initial_loss);
    CHECK(res.final_mean_score > res.initial_mean_score);
  }
}

TEST_CASE("generator loss follows its definition") {
  const auto d = constant_discriminator(0.25);
  Generator g;
  g.model = nn::init_model(generator_specs(20), 2);
  std::mt19937_64 rng(1);
  CHECK(generator_loss(g, d, g.sample_noise(17, rng)) == doctest::Approx(std::log(0.75)));
}

TEST_CASE("candidate sampling passes the checker and is reproducible") {
  const auto ranges = ParameterRanges::defaults();
  const auto conn = ConnectionMap::defaults();
  Generator g;
  g.model = nn::init_model(generator_specs(20), 6);
  const auto d = constant_discriminator(0.6);
  const auto a = sample_candidates(g, 50, ranges, conn, 99, 5000, &d);
  const auto c = sample_candidates(g, 50, ranges, conn, 99, 5000, &d);
  CHECK(a.params == c.params);
  CHECK_FALSE(a.params.empty());
  for (const auto& p : a.params) {
    CHECK(ranges.contains(p));
    CHECK(check_geometry(p, conn).ok());
  }
  for (double s : a.disc_score) CHECK(s == doctest::Approx(0.6));
  CHECK(a.draws <= 5000);
  const auto text = candidates_to_jsonl(a);
  CHECK(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) == a.params.size());
}
