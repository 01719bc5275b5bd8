#include "antgen/generative.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

namespace antgen {

Matrix normalize(const ParameterRanges& ranges, std::span<const ParameterVector> params) {
  Matrix out(params.size(), kParameterCount);
  for (std::size_t i = 0; i < params.size(); ++i)
    for (std::size_t j = 0; j < kParameterCount; ++j) out(i, j) = ranges.to_unit(j, params[i][j]);
  return out;
}

std::vector<ParameterVector> denormalize(const ParameterRanges& ranges, const Matrix& unit) {
  if (unit.cols() != kParameterCount) throw std::invalid_argument("unit matrix needs 20 columns");
  std::vector<ParameterVector> out(unit.rows());
  for (std::size_t i = 0; i < unit.rows(); ++i)
    for (std::size_t j = 0; j < kParameterCount; ++j)
      out[i][j] = std::clamp(ranges.from_unit(j, unit(i, j)), ranges[j].lo, ranges[j].hi);
  return out;
}

SplitDataset SplitDataset::stratified(std::span<const ParameterVector> x, std::span<const int> y,
                                      double test_fraction, std::uint64_t seed) {
  if (x.size() != y.size()) throw std::invalid_argument("sample/label count mismatch");
  if (!(test_fraction >= 0.0 && test_fraction < 1.0))
    throw std::invalid_argument("test fraction must lie in [0, 1)");
  std::mt19937_64 rng(seed);
  SplitDataset s;
  s.test_fraction = test_fraction;
  for (int cls : {0, 1}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < y.size(); ++i)
      if (y[i] == cls) idx.push_back(i);
    std::shuffle(idx.begin(), idx.end(), rng);
    auto n_test = static_cast<std::size_t>(std::lround(test_fraction * static_cast<double>(idx.size())));
    if (!idx.empty()) n_test = std::min(n_test, idx.size() - 1);
    for (std::size_t k = 0; k < idx.size(); ++k) {
      auto& xs = k < n_test ? s.test_x : s.train_x;
      auto& ys = k < n_test ? s.test_y : s.train_y;
      xs.push_back(x[idx[k]]);
      ys.push_back(cls);
    }
  }
  return s;
}

bool SplitDataset::train_has_both_classes() const {
  const bool pos = std::find(train_y.begin(), train_y.end(), 1) != train_y.end();
  const bool neg = std::find(train_y.begin(), train_y.end(), 0) != train_y.end();
  return pos && neg;
}

std::vector<nn::LayerSpec> discriminator_specs(const Widths& w, std::size_t inputs) {
  using nn::Activation;
  return {{inputs, w[0], false, true, Activation::relu},
          {w[0], w[1], false, true, Activation::relu},
          {w[1], w[2], false, true, Activation::relu},
          {w[2], 1, false, true, Activation::sigmoid}};
}

std::vector<nn::LayerSpec> generator_specs(std::size_t noise_dim, std::size_t outputs) {
  using nn::Activation;
  return {{noise_dim, 128, false, false, Activation::leaky_relu, 0.2},
          {128, 256, true, false, Activation::leaky_relu, 0.2},
          {256, 512, true, false, Activation::leaky_relu, 0.2},
          {512, outputs, false, false, Activation::sigmoid}};
}

std::vector<double> Discriminator::scores_unit(const Matrix& unit) const {
  const Matrix out = nn::forward(model, unit, nn::Mode::eval);
  std::vector<double> s(out.rows());
  for (std::size_t i = 0; i < out.rows(); ++i) s[i] = out(i, 0);
  return s;
}

std::vector<double> Discriminator::scores(std::span<const ParameterVector> params) const {
  if (params.empty()) return {};
  return scores_unit(normalize(ranges, params));
}

double Discriminator::score(const ParameterVector& p) const {
  return scores(std::span<const ParameterVector>(&p, 1)).front();
}

double Discriminator::accuracy(std::span<const ParameterVector> x, std::span<const int> y) const {
  if (x.empty()) return 0.0;
  const auto s = scores(x);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < s.size(); ++i) correct += (s[i] >= 0.5 ? 1 : 0) == y[i];
  return static_cast<double>(correct) / static_cast<double>(s.size());
}

DiscriminatorResult train_discriminator(const SplitDataset& data, const ParameterRanges& ranges,
                                        const Widths& widths, const nn::TrainConfig& cfg) {
  cfg.validate();
  if (!data.train_has_both_classes())
    throw TrainingError("discriminator training needs both classes in the training split");
  const auto specs = discriminator_specs(widths);
  DiscriminatorResult r;
  r.widths = widths;
  r.disc.ranges = ranges;
  r.disc.model = nn::init_model(specs, cfg.seed);

  const Matrix x = normalize(ranges, data.train_x);
  const std::size_t n = x.rows();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(cfg.seed ^ 0x5deece66dull);
  nn::Optimizer opt(cfg.optimizer);
  const std::size_t bs = std::min(cfg.batch_size, n);

  Matrix batch(bs, kParameterCount);
  std::vector<double> targets(bs);
  for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < n; start += bs) {
      const std::size_t m = std::min(bs, n - start);
      if (batch.rows() != m) {
        batch = Matrix(m, kParameterCount);
        targets.resize(m);
      }
      for (std::size_t i = 0; i < m; ++i) {
        const auto src = x.row(order[start + i]);
        std::copy(src.begin(), src.end(), batch.row(i).begin());
        targets[i] = data.train_y[order[start + i]];
      }
      auto g = nn::grad(r.disc.model, batch, nn::Loss::bce, targets, nn::Mode::train);
      opt.step(r.disc.model, g);
      epoch_loss += g.loss;
      ++batches;
      ++r.steps;
      if (cfg.max_steps && r.steps >= cfg.max_steps) break;
    }
    r.final_loss = epoch_loss / static_cast<double>(std::max<std::size_t>(batches, 1));
    r.epochs = epoch + 1;
    if (cfg.max_steps && r.steps >= cfg.max_steps) break;
  }
  if (!r.disc.model.all_finite()) throw nn::DivergenceError("discriminator parameters diverged");
  r.train_accuracy = r.disc.accuracy(data.train_x, data.train_y);
  r.test_accuracy = data.test_x.empty() ? r.train_accuracy : r.disc.accuracy(data.test_x, data.test_y);
  return r;
}

Matrix Generator::sample_noise(std::size_t k, std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix z(k, noise_dim);
  for (auto& v : z.values()) v = u(rng);
  return z;
}

Matrix Generator::generate_unit(const Matrix& noise) const {
  return nn::forward(model, noise, nn::Mode::eval);
}

double generator_loss(const Generator& gen, const Discriminator& disc, const Matrix& noise) {
  const auto s = disc.scores_unit(gen.generate_unit(noise));
  double total = 0.0;
  for (double p : s) total += std::log1p(-std::min(p, 1.0 - 1e-16));
  return total / static_cast<double>(s.size());
}

GeneratorResult train_generator(const Discriminator& disc, const GeneratorConfig& cfg) {
  cfg.train.validate();
  if (cfg.noise_dim == 0) throw std::invalid_argument("noise dimension must be >= 1");
  if (disc.model.input_width() != kParameterCount)
    throw std::invalid_argument("discriminator input width must be 20");
  GeneratorResult r;
  r.gen.noise_dim = cfg.noise_dim;
  r.gen.model = nn::init_model(generator_specs(cfg.noise_dim), cfg.train.seed);

  std::mt19937_64 rng(cfg.train.seed ^ 0x9e3779b97f4a7c15ull);
  const Matrix probe = r.gen.sample_noise(std::max<std::size_t>(cfg.probe_size, 1), rng);
  auto mean_score = [&](const Generator& g) {
    const auto s = disc.scores_unit(g.generate_unit(probe));
    return std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
  };
  r.initial_loss = generator_loss(r.gen, disc, probe);
  r.initial_mean_score = mean_score(r.gen);
  r.final_mean_score = r.initial_mean_score;

  const auto loss = cfg.nonsaturating ? nn::Loss::generator_nonsaturating : nn::Loss::generator;
  nn::Optimizer opt(cfg.train.optimizer);
  const std::size_t iters = cfg.train.max_steps ? std::min(cfg.train.max_steps, cfg.train.max_epochs)
                                                : cfg.train.max_epochs;
  const std::size_t every = std::max<std::size_t>(cfg.probe_every, 1);
  if (r.final_mean_score >= cfg.stop_threshold) r.reached_threshold = true;

  for (std::size_t it = 0; it < iters && !r.reached_threshold; ++it) {
    const Matrix z = r.gen.sample_noise(cfg.train.batch_size, rng);
    const auto gtrace = nn::forward_trace(r.gen.model, z, nn::Mode::train);
    const auto dtrace = nn::forward_trace(disc.model, gtrace.output(), nn::Mode::eval);
    auto lv = nn::loss_from_logits(dtrace.logits(), loss, {});
    if (!std::isfinite(lv.value)) throw nn::DivergenceError("non-finite generator loss");
    const auto dgrad = nn::backward(disc.model, dtrace, lv.d_logits, nn::Seed::logits);
    auto ggrad = nn::backward(r.gen.model, gtrace, dgrad.input, nn::Seed::output);
    ggrad.loss = lv.value;
    opt.step(r.gen.model, ggrad);
    nn::update_running_stats(r.gen.model, gtrace);
    r.iterations = it + 1;
    if (r.iterations % every == 0) {
      r.final_mean_score = mean_score(r.gen);
      if (r.final_mean_score >= cfg.stop_threshold) r.reached_threshold = true;
    }
  }
  if (!r.gen.model.all_finite()) throw nn::DivergenceError("generator parameters diverged");
  r.final_mean_score = mean_score(r.gen);
  r.final_loss = generator_loss(r.gen, disc, probe);
  r.saturated = r.final_mean_score < 1e-3;
  return r;
}

CandidateBatch sample_candidates(const Generator& gen, std::size_t k, const ParameterRanges& ranges,
                                 const ConnectionMap& conn, std::uint64_t seed,
                                 std::size_t max_draws, const Discriminator* disc) {
  if (k == 0) throw std::invalid_argument("candidate count must be >= 1");
  std::mt19937_64 rng(seed);
  CandidateBatch out;
  while (out.params.size() < k && out.draws < max_draws) {
    const std::size_t want = std::min(k - out.params.size(), max_draws - out.draws);
    const Matrix z = gen.sample_noise(want, rng);
    const Matrix unit = gen.generate_unit(z);
    const auto params = denormalize(ranges, unit);
    out.draws += want;
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (!check_geometry(params[i], conn)) continue;
      out.params.push_back(params[i]);
      out.noise.emplace_back(z.row(i).begin(), z.row(i).end());
    }
  }
  out.shortfall = out.params.size() < k;
  if (disc && !out.params.empty()) out.disc_score = disc->scores(out.params);
  return out;
}

std::string candidates_to_jsonl(const CandidateBatch& batch) {
  std::string out;
  for (std::size_t i = 0; i < batch.params.size(); ++i) {
    nlohmann::json j;
    j["params"] = std::vector<double>(batch.params[i].values().begin(), batch.params[i].values().end());
    j["noise"] = batch.noise[i];
    if (i < batch.disc_score.size())
      j["disc_score"] = batch.disc_score[i];
    else
      j["disc_score"] = nullptr;
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace antgen
