#pragma once

// Two-class C-SVC trained with SMO (second-order working set selection).

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "antgen/generative.hpp"
#include "antgen/geometry.hpp"
#include "antgen/matrix.hpp"

namespace antgen {

struct KernelSpec {
  enum class Kind { linear, rbf };

  Kind kind = Kind::rbf;
  double gamma = 1.0;

  static KernelSpec linear() { return {Kind::linear, 0.0}; }
  static KernelSpec rbf(double gamma);

  double operator()(std::span<const double> a, std::span<const double> b) const;
  void validate() const;
  bool operator==(const KernelSpec&) const = default;
};

// gamma = 1 / (d * variance of all entries of x).
KernelSpec default_kernel(const Matrix& x);

struct SvcOptions {
  double tolerance = 1e-3;   // stop when the maximal KKT violation is below this
  std::size_t max_iter = 0;  // 0: max(10^7, 100 n)
};

struct SvcModel {
  KernelSpec kernel;
  double C = 1.0;
  Matrix support_vectors;   // normalized inputs, one per row
  std::vector<double> coef; // alpha_i * y_i
  double bias = 0.0;

  double decision(std::span<const double> x) const;
  std::vector<double> decisions(const Matrix& x) const;
};

struct SvcFit {
  SvcModel model;
  std::vector<double> alpha;  // one per training sample
  std::vector<double> y;      // +1 / -1
  std::size_t iterations = 0;
  double max_violation = 0.0;
  bool converged = false;
};

// Labels are +1/-1. Throws std::invalid_argument unless both classes are present and C > 0.
SvcFit fit_svc(const Matrix& x, std::span<const double> y, const KernelSpec& kernel, double C,
               const SvcOptions& opts = {});

struct SvcResult {
  SvcFit fit;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
};

// Inputs are mapped onto [0, 1] with the parameter ranges; class 1 -> +1.
SvcResult train_svc(const SplitDataset& data, const ParameterRanges& ranges,
                    std::optional<KernelSpec> kernel = std::nullopt, double C = 1.0,
                    const SvcOptions& opts = {});

double svc_decision(const SvcModel& model, const ParameterRanges& ranges, const ParameterVector& p);

// Keeps the candidates with decision value >= 0.
std::vector<ParameterVector> svc_filter(const SvcModel& model, const ParameterRanges& ranges,
                                        std::span<const ParameterVector> candidates);

double svc_accuracy(const SvcModel& model, const ParameterRanges& ranges,
                    std::span<const ParameterVector> x, std::span<const int> y);

nlohmann::json to_json(const SvcModel& m);
SvcModel svc_from_json(const nlohmann::json& j);

}  // namespace antgen
