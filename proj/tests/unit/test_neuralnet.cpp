#include <doctest.h>

#include <cmath>
#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

#include "antgen/generative.hpp"
#include "antgen/neuralnet.hpp"
#include "oracles.hpp"

using namespace antgen;
using namespace antgen::nn;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Matrix m(r, c);
  for (auto& v : m.values()) v = n(rng);
  return m;
}

std::vector<LayerSpec> random_specs(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> depth(1, 3), width(1, 8), act(0, 2), coin(0, 1);
  const int layers = depth(rng);
  std::vector<LayerSpec> specs;
  std::size_t in = static_cast<std::size_t>(width(rng));
  for (int l = 0; l < layers; ++l) {
    LayerSpec s;
    s.in = in;
    const bool last = l == layers - 1;
    s.out = last ? 1 : static_cast<std::size_t>(width(rng) + 1);
    s.bias = coin(rng) == 1;
    s.batchnorm = !last && coin(rng) == 1;
    if (last) {
      s.activation = Activation::sigmoid;
    } else {
      const Activation table[3] = {Activation::relu, Activation::leaky_relu, Activation::sigmoid};
      s.activation = table[act(rng)];
    }
    specs.push_back(s);
    in = s.out;
  }
  return specs;
}

// Relative error with a floor that keeps near-zero components meaningful.
double rel_err(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6}); }

double max_fd_error(MlpModel& model, const Matrix& x, Loss loss, const std::vector<double>& y) {
  const auto g = grad(model, x, loss, y, Mode::train);
  auto params = parameter_views(model);
  const auto grads = gradient_views(g);
  double worst = 0.0;
  auto f = [&] { return grad(model, x, loss, y, Mode::train).loss; };
  for (std::size_t k = 0; k < params.size(); ++k)
    for (std::size_t i = 0; i < params[k].values.size(); ++i) {
      const double fd = oracle::central_difference(f, params[k].values[i]);
      worst = std::max(worst, rel_err(grads[k][i], fd));
    }
  return worst;
}

}  // namespace

TEST_CASE("init: zero biases, Kaiming bound, unit batchnorm, determinism") {
  const std::vector<LayerSpec> one = {{4, 1, false, true, Activation::sigmoid}};
  const auto m1 = init_model(one, 7);
  CHECK(m1.layers[0].bias[0] == 0.0);

  const std::vector<LayerSpec> wide = {{100, 50, true, true, Activation::relu},
                                       {50, 1, false, true, Activation::sigmoid}};
  const auto m = init_model(wide, 3);
  const double bound = std::sqrt(6.0 / 100.0);
  for (double w : m.layers[0].weight.values()) CHECK(std::abs(w) <= bound);
  for (double v : m.layers[0].gamma) CHECK(v == 1.0);
  for (double v : m.layers[0].beta) CHECK(v == 0.0);
  CHECK(init_model(wide, 3) == m);
  CHECK_FALSE(init_model(wide, 4) == m);
}

TEST_CASE("width mismatch is rejected") {
  const std::vector<LayerSpec> bad = {{3, 4, false, true, Activation::relu},
                                      {5, 1, false, true, Activation::sigmoid}};
  CHECK_THROWS_AS(init_model(bad, 0), ShapeError);
  const std::vector<LayerSpec> ok = {{3, 4, false, true, Activation::relu}};
  auto m = init_model(ok, 0);
  CHECK_THROWS_AS(forward(m, Matrix(2, 5), Mode::eval), ShapeError);
}

TEST_CASE("zero-weight net with a sigmoid head outputs one half") {
  auto m = init_model(discriminator_specs({8, 8, 8}), 1);
  for (auto& l : m.layers) l.weight.fill(0.0);
  std::mt19937_64 rng(2);
  const auto out = forward(m, random_matrix(10, 20, rng, 5.0), Mode::eval);
  for (double v : out.values()) CHECK(v == 0.5);
}

TEST_CASE("identity linear layer passes inputs through") {
  const std::vector<LayerSpec> s = {{3, 3, false, false, Activation::none}};
  auto m = init_model(s, 1);
  m.layers[0].weight.fill(0.0);
  for (std::size_t i = 0; i < 3; ++i) m.layers[0].weight(i, i) = 1.0;
  std::mt19937_64 rng(9);
  const auto x = random_matrix(4, 3, rng);
  CHECK(forward(m, x, Mode::eval) == x);
}

TEST_CASE("two-layer forward matches straight-line arithmetic") {
  const std::vector<LayerSpec> s = {{5, 7, false, true, Activation::leaky_relu},
                                    {7, 3, false, true, Activation::sigmoid}};
  auto m = init_model(s, 21);
  std::mt19937_64 rng(4);
  for (auto& l : m.layers)
    for (auto& b : l.bias) b = std::normal_distribution<double>(0, 0.5)(rng);
  const auto x = random_matrix(6, 5, rng);
  const auto out = forward(m, x, Mode::eval);
  auto as_rows = [](const Matrix& w) {
    std::vector<std::vector<double>> r(w.rows(), std::vector<double>(w.cols()));
    for (std::size_t i = 0; i < w.rows(); ++i)
      for (std::size_t j = 0; j < w.cols(); ++j) r[i][j] = w(i, j);
    return r;
  };
  const auto leaky = [](double u) { return u > 0 ? u : 0.2 * u; };
  const auto sig = [](double u) { return 1.0 / (1.0 + std::exp(-u)); };
  for (std::size_t i = 0; i < 6; ++i) {
    std::vector<double> xi(x.row(i).begin(), x.row(i).end());
    const auto h = oracle::dense_forward(xi, as_rows(m.layers[0].weight), m.layers[0].bias, leaky);
    const auto o = oracle::dense_forward(h, as_rows(m.layers[1].weight), m.layers[1].bias, sig);
    for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(out(i, j) - o[j]) < 1e-12);
  }
}

TEST_CASE("analytic gradients match central differences on random small nets") {
  std::mt19937_64 rng(12345);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto specs = random_specs(rng);
    auto m = init_model(specs, static_cast<std::uint64_t>(trial));
    for (auto& l : m.layers) {
      for (auto& b : l.bias) b = std::normal_distribution<double>(0, 0.3)(rng);
      for (auto& g : l.gamma) g = std::uniform_real_distribution<double>(0.5, 1.5)(rng);
      for (auto& b : l.beta) b = std::normal_distribution<double>(0, 0.3)(rng);
    }
    const auto x = random_matrix(6, specs.front().in, rng);
    std::vector<double> y(6);
    for (auto& v : y) v = std::bernoulli_distribution(0.5)(rng) ? 1.0 : 0.0;
    for (Loss loss : {Loss::bce, Loss::generator, Loss::generator_nonsaturating}) {
      const double e = max_fd_error(m, x, loss, y);
      CAPTURE(trial);
      CHECK(e < 1e-4);
      worst = std::max(worst, e);
    }
  }
  MESSAGE("worst relative gradient error " << worst);
}

TEST_CASE("input gradient matches central differences through batchnorm") {
  const auto specs = generator_specs(4, 3);
  auto g = init_model(specs, 5);
  std::mt19937_64 rng(8);
  Matrix z = random_matrix(5, 4, rng);
  // Scalar objective: sum of outputs weighted by fixed coefficients.
  const Matrix wts = random_matrix(5, 3, rng);
  auto f = [&] {
    const auto out = forward(g, z, Mode::train);
    double s = 0;
    for (std::size_t k = 0; k < out.size(); ++k) s += out.values()[k] * wts.values()[k];
    return s;
  };
  const auto trace = forward_trace(g, z, Mode::train);
  const auto grads = backward(g, trace, wts, Seed::output);
  for (std::size_t k = 0; k < z.size(); ++k) {
    const double fd = oracle::central_difference(f, z.values()[k]);
    CHECK(rel_err(grads.input.values()[k], fd) < 1e-4);
  }
}

TEST_CASE("bce gradient vanishes at the optimum and scales linearly") {
  const std::vector<LayerSpec> s = {{2, 1, false, true, Activation::sigmoid}};
  auto m = init_model(s, 1);
  m.layers[0].weight.fill(0.0);
  const Matrix x(4, 2, 1.0);
  const std::vector<double> half(4, 0.5);
  CHECK(grad(m, x, Loss::bce, half).norm() < 1e-8);

  std::mt19937_64 rng(3);
  auto m2 = init_model(discriminator_specs({4, 4, 4}, 3), 2);
  const auto x2 = random_matrix(5, 3, rng);
  const std::vector<double> y = {1, 0, 1, 1, 0};
  const auto trace = forward_trace(m2, x2, Mode::train);
  auto lv = loss_from_logits(trace.logits(), Loss::bce, y);
  const auto g1 = backward(m2, trace, lv.d_logits, Seed::logits);
  for (auto& v : lv.d_logits.values()) v *= 2.0;
  const auto g2 = backward(m2, trace, lv.d_logits, Seed::logits);
  const auto a = gradient_views(g1);
  const auto b = gradient_views(g2);
  for (std::size_t k = 0; k < a.size(); ++k)
    for (std::size_t i = 0; i < a[k].size(); ++i) CHECK(b[k][i] == doctest::Approx(2.0 * a[k][i]));
}

TEST_CASE("non-finite loss signals divergence") {
  const std::vector<LayerSpec> s = {{1, 1, false, false, Activation::sigmoid}};
  auto m = init_model(s, 1);
  m.layers[0].weight(0, 0) = std::numeric_limits<double>::quiet_NaN();
  const std::vector<double> y = {1.0};
  CHECK_THROWS_AS(grad(m, Matrix(1, 1, 1.0), Loss::bce, y), DivergenceError);
}

TEST_CASE("optimizer steps") {
  const std::vector<LayerSpec> s = {{1, 1, false, false, Activation::sigmoid}};
  SUBCASE("sgd") {
    auto m = init_model(s, 1);
    m.layers[0].weight(0, 0) = 1.0;
    GradientSet g;
    g.layers.resize(1);
    g.layers[0].weight = Matrix(1, 1, 2.0);
    Optimizer opt(OptimizerConfig::sgd(0.1));
    opt.step(m, g);
    CHECK(m.layers[0].weight(0, 0) == doctest::Approx(0.8).epsilon(1e-15));
  }
  SUBCASE("first adam step moves by lr") {
    const std::vector<LayerSpec> s2 = {{3, 2, false, true, Activation::relu},
                                       {2, 1, false, true, Activation::sigmoid}};
    auto m = init_model(s2, 4);
    const auto before = m;
    GradientSet g;
    g.layers.resize(2);
    for (std::size_t l = 0; l < 2; ++l) {
      g.layers[l].weight = Matrix(m.layers[l].weight.rows(), m.layers[l].weight.cols(), 1.0);
      g.layers[l].bias.assign(m.layers[l].bias.size(), 1.0);
    }
    Optimizer opt(OptimizerConfig::adam(1e-3));
    opt.step(m, g);
    for (std::size_t l = 0; l < 2; ++l)
      for (std::size_t k = 0; k < m.layers[l].weight.size(); ++k)
        CHECK(m.layers[l].weight.values()[k] - before.layers[l].weight.values()[k] ==
              doctest::Approx(-1e-3).epsilon(1e-6));
  }
  SUBCASE("zero gradient and no decay leave the model unchanged") {
    auto m = init_model(discriminator_specs({4, 4, 4}, 3), 2);
    const auto before = m;
    GradientSet g = grad(m, Matrix(2, 3, 0.5), Loss::bce, std::vector<double>{1, 0});
    for (auto& l : g.layers) {
      l.weight.fill(0.0);
      std::fill(l.bias.begin(), l.bias.end(), 0.0);
    }
    Optimizer opt(OptimizerConfig::adam(1e-3));
    for (int i = 0; i < 5; ++i) opt.step(m, g);
    CHECK(m == before);
  }
  SUBCASE("decoupled decay shrinks weights only") {
    auto m = init_model(discriminator_specs({4, 4, 4}, 3), 2);
    for (auto& l : m.layers) std::fill(l.bias.begin(), l.bias.end(), 0.25);
    const auto before = m;
    GradientSet g = grad(m, Matrix(2, 3, 0.5), Loss::bce, std::vector<double>{1, 0});
    for (auto& l : g.layers) {
      l.weight.fill(0.0);
      std::fill(l.bias.begin(), l.bias.end(), 0.0);
    }
    Optimizer opt(OptimizerConfig::adam(1e-2, 0.05));
    opt.step(m, g);
    for (std::size_t l = 0; l < m.layers.size(); ++l) {
      for (std::size_t k = 0; k < m.layers[l].weight.size(); ++k)
        CHECK(m.layers[l].weight.values()[k] ==
              doctest::Approx(before.layers[l].weight.values()[k] * (1.0 - 1e-2 * 0.05)));
      CHECK(m.layers[l].bias == before.layers[l].bias);
    }
  }
}

TEST_CASE("batchnorm train mode normalizes and eval mode is order independent") {
  const auto specs = generator_specs(6, 4);
  auto g = init_model(specs, 3);
  std::mt19937_64 rng(17);
  const auto z = random_matrix(32, 6, rng);
  const auto trace = forward_trace(g, z, Mode::train);
  for (std::size_t li = 0; li < specs.size(); ++li) {
    if (!specs[li].batchnorm) continue;
    const auto& xh = trace.layers[li].xhat;
    for (std::size_t j = 0; j < xh.cols(); ++j) {
      double mean = 0, var = 0;
      for (std::size_t i = 0; i < xh.rows(); ++i) mean += xh(i, j);
      mean /= static_cast<double>(xh.rows());
      for (std::size_t i = 0; i < xh.rows(); ++i) var += (xh(i, j) - mean) * (xh(i, j) - mean);
      var /= static_cast<double>(xh.rows());
      CHECK(std::abs(mean) < 1e-6);
      // eps in the denominator pulls the variance a hair below one
      CHECK(std::abs(var - 1.0) < 1e-6);
    }
  }
  update_running_stats(g, trace);
  const auto a = forward(g, z, Mode::eval);
  CHECK(forward(g, z, Mode::eval) == a);
  Matrix rev(z.rows(), z.cols());
  for (std::size_t i = 0; i < z.rows(); ++i)
    for (std::size_t j = 0; j < z.cols(); ++j) rev(i, j) = z(z.rows() - 1 - i, j);
  const auto b = forward(g, rev, Mode::eval);
  for (std::size_t i = 0; i < z.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) CHECK(b(z.rows() - 1 - i, j) == a(i, j));
}

TEST_CASE("discriminator parameter count follows the width chain") {
  const auto specs = discriminator_specs({64, 128, 256});
  const std::size_t want = (20 * 64 + 64) + (64 * 128 + 128) + (128 * 256 + 256) + (256 + 1);
  CHECK(parameter_count(specs) == want);
  CHECK(init_model(specs, 0).parameter_count() == want);
  const auto gen = generator_specs(20);
  const std::size_t gwant = 20 * 128 + (128 * 256 + 2 * 256) + (256 * 512 + 2 * 512) + 512 * 20;
  CHECK(parameter_count(gen) == gwant);
}

TEST_CASE("linearly separable 2-D data reaches full training accuracy") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-1, 1);
  const std::size_t n = 100;
  Matrix x(n, 2);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double a, b;
    do {
      a = u(rng);
      b = u(rng);
    } while (std::abs(a + 0.5 * b) < 0.05);
    x(i, 0) = a;
    x(i, 1) = b;
    y[i] = a + 0.5 * b > 0 ? 1.0 : 0.0;
  }
  auto m = init_model(discriminator_specs({16, 16, 16}, 2), 1);
  auto cfg = TrainConfig::discriminator_defaults();
  cfg.optimizer.lr = 1e-3;  // the lower default rate needs far more than 1000 epochs here
  Optimizer opt(cfg.optimizer);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  double acc = 0;
  for (std::size_t epoch = 0; epoch < cfg.max_epochs && acc < 0.99; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i : order) {
      Matrix xi(1, 2);
      xi(0, 0) = x(i, 0);
      xi(0, 1) = x(i, 1);
      const std::vector<double> yi = {y[i]};
      opt.step(m, grad(m, xi, Loss::bce, yi));
    }
    const auto p = forward(m, x, Mode::eval);
    std::size_t hit = 0;
    for (std::size_t i = 0; i < n; ++i) hit += (p(i, 0) >= 0.5) == (y[i] == 1.0);
    acc = static_cast<double>(hit) / static_cast<double>(n);
  }
  CHECK(acc >= 0.99);
}

TEST_CASE("json round trip reproduces eval outputs bit for bit") {
  auto g = init_model(generator_specs(5, 4), 8);
  std::mt19937_64 rng(1);
  const auto z = random_matrix(16, 5, rng);
  update_running_stats(g, forward_trace(g, z, Mode::train));
  const auto back = model_from_json(nlohmann::json::parse(to_json(g).dump()));
  CHECK(forward(back, z, Mode::eval) == forward(g, z, Mode::eval));
  CHECK(back == g);
}
