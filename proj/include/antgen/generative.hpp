#pragma once

// Probabilistic discriminator over normalized geometry, generator trained
// against the frozen discriminator, and candidate sampling.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "antgen/geometry.hpp"
#include "antgen/matrix.hpp"
#include "antgen/neuralnet.hpp"

namespace antgen {

using Widths = std::array<std::size_t, 3>;

// Hidden-width triples recorded for the seven evolutions of the dual
// resonance run.
inline constexpr std::array<Widths, 7> kEvolutionWidths = {{{64, 128, 256},
                                                       {128, 128, 256},
                                                       {256, 512, 512},
                                                       {256, 512, 256},
                                                       {256, 512, 512},
                                                       {256, 256, 1024},
                                                       {256, 256, 1024}}};

// Per-parameter affine map of each range onto [0, 1].
Matrix normalize(const ParameterRanges& ranges, std::span<const ParameterVector> params);
std::vector<ParameterVector> denormalize(const ParameterRanges& ranges, const Matrix& unit);

// Stratified train/test partition of labeled geometry.
struct SplitDataset {
  std::vector<ParameterVector> train_x;
  std::vector<int> train_y;
  std::vector<ParameterVector> test_x;
  std::vector<int> test_y;
  double test_fraction = 0.2;

  // Each class contributes round(test_fraction * n_class) samples to the
  // test side, keeping at least one of each present class for training.
  static SplitDataset stratified(std::span<const ParameterVector> x, std::span<const int> y,
                                 double test_fraction, std::uint64_t seed);

  std::size_t size() const { return train_x.size() + test_x.size(); }
  bool train_has_both_classes() const;
};

// 20 -> h1 -> h2 -> h3 -> 1, ReLU hidden with bias, sigmoid head.
std::vector<nn::LayerSpec> discriminator_specs(const Widths& widths,
                                               std::size_t inputs = kParameterCount);
// noise -> 128 -> 256(BN) -> 512(BN) -> 20, LeakyReLU(0.2), sigmoid output, no biases.
std::vector<nn::LayerSpec> generator_specs(std::size_t noise_dim,
                                           std::size_t outputs = kParameterCount);

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Discriminator {
  nn::MlpModel model;
  ParameterRanges ranges = ParameterRanges::defaults();

  // Probability of a valid design, in (0, 1).
  std::vector<double> scores(std::span<const ParameterVector> params) const;
  std::vector<double> scores_unit(const Matrix& unit) const;
  double score(const ParameterVector& p) const;
  // Hard label: valid iff score >= 0.5.
  bool predict(const ParameterVector& p) const { return score(p) >= 0.5; }
  double accuracy(std::span<const ParameterVector> x, std::span<const int> y) const;
};

struct DiscriminatorResult {
  Discriminator disc;
  Widths widths{};
  double test_accuracy = 0.0;
  double train_accuracy = 0.0;
  double final_loss = 0.0;
  std::size_t epochs = 0;
  std::size_t steps = 0;
};

// BCE training with shuffled minibatches. Throws TrainingError when the
// training split lacks a class and nn::DivergenceError on a non-finite loss.
DiscriminatorResult train_discriminator(const SplitDataset& data, const ParameterRanges& ranges,
                                        const Widths& widths, const nn::TrainConfig& cfg);

struct GeneratorConfig {
  nn::TrainConfig train = nn::TrainConfig::generator_defaults();
  std::size_t noise_dim = kParameterCount;
  double stop_threshold = 0.95;  // mean D(G(z)) on the probe
  std::size_t probe_size = 500;
  std::size_t probe_every = 10;
  bool nonsaturating = false;  // optimize -log D instead of log(1 - D)
};

struct Generator {
  nn::MlpModel model;
  std::size_t noise_dim = kParameterCount;

  // Uniform(-1, 1) noise, k x noise_dim.
  Matrix sample_noise(std::size_t k, std::mt19937_64& rng) const;
  // Eval-mode map from noise to the unit cube.
  Matrix generate_unit(const Matrix& noise) const;
};

struct GeneratorResult {
  Generator gen;
  std::size_t iterations = 0;
  double initial_loss = 0.0;  // mean log(1 - D(G(z))) on the fixed probe
  double final_loss = 0.0;
  double initial_mean_score = 0.0;
  double final_mean_score = 0.0;
  bool reached_threshold = false;
  bool saturated = false;  // D(G(z)) stayed ~0 everywhere
};

// The discriminator is read-only for the whole call.
GeneratorResult train_generator(const Discriminator& disc, const GeneratorConfig& cfg);

// Minimax generator loss on fixed noise: mean log(1 - D(G(z))).
double generator_loss(const Generator& gen, const Discriminator& disc, const Matrix& noise);

struct CandidateBatch {
  std::vector<ParameterVector> params;
  std::vector<std::vector<double>> noise;
  std::vector<double> disc_score;  // filled when a discriminator is supplied
  std::size_t draws = 0;
  bool shortfall = false;
};

// Draws noise, maps through the generator, rescales onto the ranges and keeps
// checker-passing designs until k survive or max_draws is spent.
CandidateBatch sample_candidates(const Generator& gen, std::size_t k, const ParameterRanges& ranges,
                                 const ConnectionMap& conn, std::uint64_t seed,
                                 std::size_t max_draws, const Discriminator* disc = nullptr);

// One JSON object per line: {"params":[...],"noise":[...],"disc_score":x}.
std::string candidates_to_jsonl(const CandidateBatch& batch);

}  // namespace antgen
