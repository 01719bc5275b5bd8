#include "antgen/svc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "antgen/kernels.hpp"

namespace antgen {

KernelSpec KernelSpec::rbf(double gamma) {
  KernelSpec k{Kind::rbf, gamma};
  k.validate();
  return k;
}

void KernelSpec::validate() const {
  if (kind == Kind::rbf && !(gamma > 0.0 && std::isfinite(gamma)))
    throw std::invalid_argument("rbf gamma must be positive");
}

double KernelSpec::operator()(std::span<const double> a, std::span<const double> b) const {
  double s = 0.0;
  if (kind == Kind::linear) {
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::exp(-gamma * s);
}

KernelSpec default_kernel(const Matrix& x) {
  const auto v = x.values();
  if (v.empty()) throw std::invalid_argument("cannot pick a kernel for an empty matrix");
  double mean = 0.0;
  for (double e : v) mean += e;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (double e : v) var += (e - mean) * (e - mean);
  var /= static_cast<double>(v.size());
  if (!(var > 0.0)) var = 1.0;
  return KernelSpec::rbf(1.0 / (static_cast<double>(x.cols()) * var));
}

double SvcModel::decision(std::span<const double> x) const {
  double s = bias;
  for (std::size_t i = 0; i < coef.size(); ++i) s += coef[i] * kernel(support_vectors.row(i), x);
  return s;
}

std::vector<double> SvcModel::decisions(const Matrix& x) const {
  std::vector<double> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = decision(x.row(i));
  return out;
}

SvcFit fit_svc(const Matrix& x, std::span<const double> y, const KernelSpec& kernel, double C,
               const SvcOptions& opts) {
  kernel.validate();
  const std::size_t n = x.rows();
  if (y.size() != n) throw std::invalid_argument("sample/label count mismatch");
  if (!(C > 0.0)) throw std::invalid_argument("C must be positive");
  bool pos = false, neg = false;
  for (double v : y) {
    if (v == 1.0)
      pos = true;
    else if (v == -1.0)
      neg = true;
    else
      throw std::invalid_argument("labels must be +1 or -1");
  }
  if (!pos || !neg) throw std::invalid_argument("SVC training needs both classes");

  Matrix K(n, n);
  if (kernel.kind == KernelSpec::Kind::linear)
    kernels::linear_gram(x, K);
  else
    kernels::rbf_gram(x, kernel.gamma, K);

  constexpr double tau = 1e-12;
  std::vector<double> alpha(n, 0.0), G(n, -1.0);
  auto upper = [&](std::size_t t) { return alpha[t] >= C; };
  auto lower = [&](std::size_t t) { return alpha[t] <= 0.0; };
  auto in_up = [&](std::size_t t) { return (y[t] > 0 && !upper(t)) || (y[t] < 0 && !lower(t)); };
  auto in_low = [&](std::size_t t) { return (y[t] > 0 && !lower(t)) || (y[t] < 0 && !upper(t)); };

  SvcFit fit;
  const std::size_t cap = opts.max_iter ? opts.max_iter : std::max<std::size_t>(10000000, 100 * n);
  for (;;) {
    double gmax = -std::numeric_limits<double>::infinity();
    std::size_t i = n;
    for (std::size_t t = 0; t < n; ++t)
      if (in_up(t) && -y[t] * G[t] >= gmax) {
        gmax = -y[t] * G[t];
        i = t;
      }
    double gmin = std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    std::size_t j = n;
    for (std::size_t t = 0; t < n; ++t) {
      if (!in_low(t)) continue;
      const double v = -y[t] * G[t];
      gmin = std::min(gmin, v);
      if (i == n || v >= gmax) continue;
      const double b = gmax - v;
      double a = K(i, i) + K(t, t) - 2.0 * K(i, t);
      if (a <= 0.0) a = tau;
      const double obj = -(b * b) / a;
      if (obj <= best) {
        best = obj;
        j = t;
      }
    }
    fit.max_violation = gmax - gmin;
    if (i == n || j == n || fit.max_violation < opts.tolerance) {
      fit.converged = true;
      break;
    }
    if (fit.iterations >= cap) break;
    ++fit.iterations;

    const double old_i = alpha[i], old_j = alpha[j];
    double quad = K(i, i) + K(j, j) - 2.0 * K(i, j);
    if (quad <= 0.0) quad = tau;
    if (y[i] != y[j]) {
      const double delta = (-G[i] - G[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) {
          alpha[j] = 0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = -diff;
      }
      if (diff > 0) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = C - diff;
        }
      } else if (alpha[j] > C) {
        alpha[j] = C;
        alpha[i] = C + diff;
      }
    } else {
      const double delta = (G[i] - G[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > C) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = sum - C;
        }
      } else if (alpha[j] < 0) {
        alpha[j] = 0;
        alpha[i] = sum;
      }
      if (sum > C) {
        if (alpha[j] > C) {
          alpha[j] = C;
          alpha[i] = sum - C;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = sum;
      }
    }
    const double di = alpha[i] - old_i, dj = alpha[j] - old_j;
    for (std::size_t t = 0; t < n; ++t) G[t] += y[t] * (y[i] * K(t, i) * di + y[j] * K(t, j) * dj);
  }

  // Intercept: average over free vectors, else midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity(), lb = -ub, sum_free = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * G[t];
    if (upper(t)) {
      if (y[t] < 0)
        ub = std::min(ub, yg);
      else
        lb = std::max(lb, yg);
    } else if (lower(t)) {
      if (y[t] > 0)
        ub = std::min(ub, yg);
      else
        lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  const double rho = n_free ? sum_free / static_cast<double>(n_free) : 0.5 * (ub + lb);

  fit.alpha = alpha;
  fit.y.assign(y.begin(), y.end());
  auto& m = fit.model;
  m.kernel = kernel;
  m.C = C;
  m.bias = -rho;
  std::size_t n_sv = 0;
  for (double a : alpha) n_sv += a > 0.0;
  m.support_vectors = Matrix(n_sv, x.cols());
  for (std::size_t t = 0, k = 0; t < n; ++t) {
    if (!(alpha[t] > 0.0)) continue;
    std::copy(x.row(t).begin(), x.row(t).end(), m.support_vectors.row(k).begin());
    m.coef.push_back(alpha[t] * y[t]);
    ++k;
  }
  return fit;
}

double svc_decision(const SvcModel& model, const ParameterRanges& ranges, const ParameterVector& p) {
  const Matrix u = normalize(ranges, std::span<const ParameterVector>(&p, 1));
  return model.decision(u.row(0));
}

double svc_accuracy(const SvcModel& model, const ParameterRanges& ranges,
                    std::span<const ParameterVector> x, std::span<const int> y) {
  if (x.empty()) return 0.0;
  const auto d = model.decisions(normalize(ranges, x));
  std::size_t correct = 0;
  for (std::size_t i = 0; i < d.size(); ++i) correct += (d[i] >= 0.0 ? 1 : 0) == y[i];
  return static_cast<double>(correct) / static_cast<double>(d.size());
}

SvcResult train_svc(const SplitDataset& data, const ParameterRanges& ranges,
                    std::optional<KernelSpec> kernel, double C, const SvcOptions& opts) {
  if (!data.train_has_both_classes())
    throw TrainingError("SVC training needs both classes in the training split");
  const Matrix x = normalize(ranges, data.train_x);
  std::vector<double> y(data.train_y.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = data.train_y[i] == 1 ? 1.0 : -1.0;
  SvcResult r;
  r.fit = fit_svc(x, y, kernel ? *kernel : default_kernel(x), C, opts);
  r.train_accuracy = svc_accuracy(r.fit.model, ranges, data.train_x, data.train_y);
  r.test_accuracy = data.test_x.empty() ? r.train_accuracy
                                        : svc_accuracy(r.fit.model, ranges, data.test_x, data.test_y);
  return r;
}

std::vector<ParameterVector> svc_filter(const SvcModel& model, const ParameterRanges& ranges,
                                        std::span<const ParameterVector> candidates) {
  std::vector<ParameterVector> out;
  if (candidates.empty()) return out;
  const auto d = model.decisions(normalize(ranges, candidates));
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d[i] >= 0.0) out.push_back(candidates[i]);
  return out;
}

nlohmann::json to_json(const SvcModel& m) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["kernel"] = {{"kind", m.kernel.kind == KernelSpec::Kind::linear ? "linear" : "rbf"},
                 {"gamma", m.kernel.gamma}};
  j["C"] = m.C;
  j["intercept"] = m.bias;
  j["coefficients"] = m.coef;
  auto sv = nlohmann::json::array();
  for (std::size_t i = 0; i < m.support_vectors.rows(); ++i)
    sv.push_back(std::vector<double>(m.support_vectors.row(i).begin(), m.support_vectors.row(i).end()));
  j["support_vectors"] = sv;
  return j;
}

SvcModel svc_from_json(const nlohmann::json& j) {
  if (j.value("schema_version", 0) != 1) throw std::invalid_argument("unsupported SVC schema version");
  SvcModel m;
  const auto kind = j.at("kernel").at("kind").get<std::string>();
  if (kind == "linear")
    m.kernel = KernelSpec::linear();
  else if (kind == "rbf")
    m.kernel = KernelSpec::rbf(j.at("kernel").at("gamma").get<double>());
  else
    throw std::invalid_argument("unknown kernel kind: " + kind);
  m.C = j.at("C").get<double>();
  m.bias = j.at("intercept").get<double>();
  m.coef = j.at("coefficients").get<std::vector<double>>();
  const auto& sv = j.at("support_vectors");
  const std::size_t d = sv.empty() ? 0 : sv.front().size();
  m.support_vectors = Matrix(sv.size(), d);
  for (std::size_t i = 0; i < sv.size(); ++i) {
    const auto row = sv[i].get<std::vector<double>>();
    if (row.size() != d) throw std::invalid_argument("ragged support vector rows");
    std::copy(row.begin(), row.end(), m.support_vectors.row(i).begin());
  }
  if (m.coef.size() != sv.size()) throw std::invalid_argument("coefficient count mismatch");
  return m;
}

}  // namespace antgen
