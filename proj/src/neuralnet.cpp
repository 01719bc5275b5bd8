#include "antgen/neuralnet.hpp"

#include <algorithm>
#include <cmath>

#include "antgen/kernels.hpp"

namespace antgen::nn {

using kernels::Op;

namespace {

constexpr int kSchemaVersion = 1;

double activate(Activation a, double u, double slope) {
  switch (a) {
    case Activation::relu:
      return u > 0.0 ? u : 0.0;
    case Activation::leaky_relu:
      return u > 0.0 ? u : slope * u;
    case Activation::sigmoid:
      return sigmoid(u);
    case Activation::none:
      break;
  }
  return u;
}

// Derivative in terms of the pre-activation u and the activation a.
double activate_grad(Activation act, double u, double a, double slope) {
  switch (act) {
    case Activation::relu:
      return u > 0.0 ? 1.0 : 0.0;
    case Activation::leaky_relu:
      return u > 0.0 ? 1.0 : slope;
    case Activation::sigmoid:
      return a * (1.0 - a);
    case Activation::none:
      break;
  }
  return 1.0;
}

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

bool finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

std::string to_string(Activation a) {
  switch (a) {
    case Activation::relu:
      return "relu";
    case Activation::leaky_relu:
      return "leaky_relu";
    case Activation::sigmoid:
      return "sigmoid";
    case Activation::none:
      break;
  }
  return "none";
}

Activation activation_from_string(const std::string& s) {
  if (s == "relu") return Activation::relu;
  if (s == "leaky_relu") return Activation::leaky_relu;
  if (s == "sigmoid") return Activation::sigmoid;
  if (s == "none") return Activation::none;
  throw std::invalid_argument("unknown activation: " + s);
}

std::size_t parameter_count(std::span<const LayerSpec> specs) {
  std::size_t n = 0;
  for (const auto& s : specs) {
    n += s.in * s.out;
    if (s.bias) n += s.out;
    if (s.batchnorm) n += 2 * s.out;
  }
  return n;
}

std::size_t MlpModel::parameter_count() const { return nn::parameter_count(specs()); }

std::vector<LayerSpec> MlpModel::specs() const {
  std::vector<LayerSpec> out;
  out.reserve(layers.size());
  for (const auto& l : layers) out.push_back(l.spec);
  return out;
}

bool MlpModel::all_finite() const {
  for (const auto& l : layers) {
    if (!finite(l.weight.values()) || !finite(l.bias) || !finite(l.gamma) || !finite(l.beta))
      return false;
  }
  return true;
}

bool MlpModel::operator==(const MlpModel& other) const {
  if (layers.size() != other.layers.size()) return false;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& a = layers[i];
    const auto& b = other.layers[i];
    if (a.spec.in != b.spec.in || a.spec.out != b.spec.out || a.spec.bias != b.spec.bias ||
        a.spec.batchnorm != b.spec.batchnorm || a.spec.activation != b.spec.activation ||
        a.spec.slope != b.spec.slope)
      return false;
    if (a.weight != b.weight || a.bias != b.bias || a.gamma != b.gamma || a.beta != b.beta ||
        a.running_mean != b.running_mean || a.running_var != b.running_var)
      return false;
  }
  return true;
}

void validate_specs(std::span<const LayerSpec> specs) {
  if (specs.empty()) throw ShapeError("model needs at least one layer");
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (specs[i].in == 0 || specs[i].out == 0) throw ShapeError("layer widths must be >= 1");
    if (i > 0 && specs[i].in != specs[i - 1].out)
      throw ShapeError("layer " + std::to_string(i) + " input width does not match previous output");
  }
}

MlpModel init_model(std::span<const LayerSpec> specs, std::uint64_t seed) {
  validate_specs(specs);
  std::mt19937_64 rng(seed);
  MlpModel model;
  for (const auto& s : specs) {
    DenseLayer layer;
    layer.spec = s;
    layer.weight = Matrix(s.out, s.in);
    const double bound = std::sqrt(6.0 / static_cast<double>(s.in));
    std::uniform_real_distribution<double> u(-bound, bound);
    for (auto& w : layer.weight.values()) w = u(rng);
    if (s.bias) layer.bias.assign(s.out, 0.0);
    if (s.batchnorm) {
      layer.gamma.assign(s.out, 1.0);
      layer.beta.assign(s.out, 0.0);
      layer.running_mean.assign(s.out, 0.0);
      layer.running_var.assign(s.out, 1.0);
    }
    model.layers.push_back(std::move(layer));
  }
  return model;
}

ForwardTrace forward_trace(const MlpModel& model, const Matrix& batch, Mode mode) {
  if (model.layers.empty()) throw ShapeError("empty model");
  if (batch.cols() != model.input_width())
    throw ShapeError("batch width " + std::to_string(batch.cols()) + " != model input width " +
                     std::to_string(model.input_width()));
  ForwardTrace trace;
  trace.mode = mode;
  trace.layers.resize(model.layers.size());
  const std::size_t m = batch.rows();
  const Matrix* x = &batch;
  for (std::size_t li = 0; li < model.layers.size(); ++li) {
    const auto& layer = model.layers[li];
    const auto& s = layer.spec;
    auto& t = trace.layers[li];
    t.input = *x;
    t.linear = Matrix(m, s.out);
    kernels::gemm(Op::none, Op::transpose, 1.0, t.input, layer.weight, 0.0, t.linear);
    if (s.bias) {
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < s.out; ++j) t.linear(i, j) += layer.bias[j];
    }
    if (s.batchnorm) {
      t.mean.assign(s.out, 0.0);
      t.var.assign(s.out, 0.0);
      t.inv_std.assign(s.out, 0.0);
      if (mode == Mode::train) {
        if (m == 0) throw ShapeError("batchnorm needs a non-empty batch");
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < s.out; ++j) t.mean[j] += t.linear(i, j);
        for (auto& v : t.mean) v /= static_cast<double>(m);
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < s.out; ++j) {
            const double d = t.linear(i, j) - t.mean[j];
            t.var[j] += d * d;
          }
        for (auto& v : t.var) v /= static_cast<double>(m);
      } else {
        t.mean = layer.running_mean;
        t.var = layer.running_var;
      }
      for (std::size_t j = 0; j < s.out; ++j) t.inv_std[j] = 1.0 / std::sqrt(t.var[j] + kBatchNormEps);
      t.xhat = Matrix(m, s.out);
      t.pre_activation = Matrix(m, s.out);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < s.out; ++j) {
          const double xh = (t.linear(i, j) - t.mean[j]) * t.inv_std[j];
          t.xhat(i, j) = xh;
          t.pre_activation(i, j) = layer.gamma[j] * xh + layer.beta[j];
        }
    } else {
      t.pre_activation = t.linear;
    }
    t.output = Matrix(m, s.out);
    for (std::size_t k = 0; k < t.output.size(); ++k)
      t.output.values()[k] = activate(s.activation, t.pre_activation.values()[k], s.slope);
    x = &t.output;
  }
  return trace;
}

Matrix forward(const MlpModel& model, const Matrix& batch, Mode mode) {
  auto trace = forward_trace(model, batch, mode);
  return std::move(trace.layers.back().output);
}

void update_running_stats(MlpModel& model, const ForwardTrace& trace, double momentum) {
  if (trace.mode != Mode::train) return;
  for (std::size_t li = 0; li < model.layers.size(); ++li) {
    auto& layer = model.layers[li];
    if (!layer.spec.batchnorm) continue;
    const auto& t = trace.layers[li];
    const double m = static_cast<double>(t.input.rows());
    const double unbias = m > 1.0 ? m / (m - 1.0) : 1.0;
    for (std::size_t j = 0; j < layer.spec.out; ++j) {
      layer.running_mean[j] = (1.0 - momentum) * layer.running_mean[j] + momentum * t.mean[j];
      layer.running_var[j] = (1.0 - momentum) * layer.running_var[j] + momentum * t.var[j] * unbias;
    }
  }
}

double GradientSet::norm() const {
  double s = 0.0;
  for (auto view : gradient_views(*this))
    for (double v : view) s += v * v;
  return std::sqrt(s);
}

GradientSet backward(const MlpModel& model, const ForwardTrace& trace, const Matrix& upstream,
                     Seed seed) {
  const std::size_t nl = model.layers.size();
  if (trace.layers.size() != nl) throw ShapeError("trace does not belong to this model");
  const auto& last = trace.layers.back();
  if (upstream.rows() != last.output.rows() || upstream.cols() != last.output.cols())
    throw ShapeError("upstream gradient shape mismatch");

  GradientSet g;
  g.layers.resize(nl);
  Matrix d_out = upstream;
  bool at_logits = seed == Seed::logits;
  for (std::size_t li = nl; li-- > 0;) {
    const auto& layer = model.layers[li];
    const auto& s = layer.spec;
    const auto& t = trace.layers[li];
    const std::size_t m = t.input.rows();
    auto& lg = g.layers[li];

    Matrix d_pre = std::move(d_out);
    if (!at_logits) {
      for (std::size_t k = 0; k < d_pre.size(); ++k)
        d_pre.values()[k] *= activate_grad(s.activation, t.pre_activation.values()[k],
                                           t.output.values()[k], s.slope);
    }
    at_logits = false;

    Matrix d_lin;
    if (s.batchnorm) {
      lg.gamma.assign(s.out, 0.0);
      lg.beta.assign(s.out, 0.0);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < s.out; ++j) {
          lg.gamma[j] += d_pre(i, j) * t.xhat(i, j);
          lg.beta[j] += d_pre(i, j);
        }
      d_lin = Matrix(m, s.out);
      if (trace.mode == Mode::train) {
        std::vector<double> sum_dxh(s.out, 0.0), sum_dxh_xh(s.out, 0.0);
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < s.out; ++j) {
            const double dxh = d_pre(i, j) * layer.gamma[j];
            sum_dxh[j] += dxh;
            sum_dxh_xh[j] += dxh * t.xhat(i, j);
          }
        const double md = static_cast<double>(m);
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < s.out; ++j) {
            const double dxh = d_pre(i, j) * layer.gamma[j];
            d_lin(i, j) =
                t.inv_std[j] / md * (md * dxh - sum_dxh[j] - t.xhat(i, j) * sum_dxh_xh[j]);
          }
      } else {
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < s.out; ++j)
            d_lin(i, j) = d_pre(i, j) * layer.gamma[j] * t.inv_std[j];
      }
    } else {
      d_lin = std::move(d_pre);
    }

    lg.weight = Matrix(s.out, s.in);
    kernels::gemm(Op::transpose, Op::none, 1.0, d_lin, t.input, 0.0, lg.weight);
    if (s.bias) {
      lg.bias.assign(s.out, 0.0);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < s.out; ++j) lg.bias[j] += d_lin(i, j);
    }
    d_out = Matrix(m, s.in);
    kernels::gemm(Op::none, Op::none, 1.0, d_lin, layer.weight, 0.0, d_out);
  }
  g.input = std::move(d_out);
  return g;
}

LossValue loss_from_logits(const Matrix& logits, Loss loss, std::span<const double> targets) {
  if (logits.cols() != 1) throw ShapeError("loss expects a single-output model");
  const std::size_t m = logits.rows();
  if (m == 0) throw ShapeError("empty batch");
  if (loss == Loss::bce && targets.size() != m) throw ShapeError("target count mismatch");
  LossValue out;
  out.d_logits = Matrix(m, 1);
  const double inv_m = 1.0 / static_cast<double>(m);
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double u = logits(i, 0);
    const double p = sigmoid(u);
    switch (loss) {
      case Loss::bce:
        // -(y log p + (1-y) log(1-p)) = softplus(u) - y u
        total += softplus(u) - targets[i] * u;
        out.d_logits(i, 0) = (p - targets[i]) * inv_m;
        break;
      case Loss::generator:
        // log(1 - p) = -softplus(u)
        total += -softplus(u);
        out.d_logits(i, 0) = -p * inv_m;
        break;
      case Loss::generator_nonsaturating:
        // -log p = softplus(-u)
        total += softplus(-u);
        out.d_logits(i, 0) = (p - 1.0) * inv_m;
        break;
    }
  }
  out.value = total * inv_m;
  return out;
}

GradientSet grad(const MlpModel& model, const Matrix& batch, Loss loss,
                 std::span<const double> targets, Mode mode) {
  if (model.layers.back().spec.activation != Activation::sigmoid || model.output_width() != 1)
    throw ShapeError("grad expects a single sigmoid output unit");
  const auto trace = forward_trace(model, batch, mode);
  auto lv = loss_from_logits(trace.logits(), loss, targets);
  if (!std::isfinite(lv.value)) throw DivergenceError("non-finite loss");
  auto g = backward(model, trace, lv.d_logits, Seed::logits);
  g.loss = lv.value;
  return g;
}

std::vector<ParamView> parameter_views(MlpModel& model) {
  std::vector<ParamView> views;
  for (auto& l : model.layers) {
    views.push_back({l.weight.values(), true});
    if (l.spec.bias) views.push_back({l.bias, false});
    if (l.spec.batchnorm) {
      views.push_back({l.gamma, false});
      views.push_back({l.beta, false});
    }
  }
  return views;
}

std::vector<std::span<const double>> gradient_views(const GradientSet& g) {
  std::vector<std::span<const double>> views;
  for (const auto& l : g.layers) {
    views.emplace_back(l.weight.values());
    if (!l.bias.empty()) views.emplace_back(l.bias);
    if (!l.gamma.empty()) {
      views.emplace_back(l.gamma);
      views.emplace_back(l.beta);
    }
  }
  return views;
}

OptimizerConfig OptimizerConfig::adam(double lr, double weight_decay, bool decoupled) {
  OptimizerConfig c;
  c.kind = Kind::adam;
  c.lr = lr;
  c.weight_decay = weight_decay;
  c.decoupled_decay = decoupled;
  return c;
}

OptimizerConfig OptimizerConfig::sgd(double lr) {
  OptimizerConfig c;
  c.kind = Kind::sgd;
  c.lr = lr;
  return c;
}

TrainConfig TrainConfig::discriminator_defaults() {
  TrainConfig c;
  c.optimizer = OptimizerConfig::adam(1e-5, 0.05, true);
  c.batch_size = 1;
  c.max_epochs = 1000;
  return c;
}

TrainConfig TrainConfig::generator_defaults() {
  TrainConfig c;
  c.optimizer = OptimizerConfig::sgd(1e-4);
  c.batch_size = 500;
  c.max_epochs = 30000;
  return c;
}

void TrainConfig::validate() const {
  if (!(optimizer.lr > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (batch_size == 0) throw std::invalid_argument("batch size must be >= 1");
  if (max_epochs == 0) throw std::invalid_argument("epoch count must be >= 1");
}

void Optimizer::step(MlpModel& model, const GradientSet& g) {
  auto params = parameter_views(model);
  const auto grads = gradient_views(g);
  if (params.size() != grads.size()) throw ShapeError("gradient set does not match model");
  ++t_;
  if (cfg_.kind == OptimizerConfig::Kind::sgd) {
    for (std::size_t k = 0; k < params.size(); ++k) {
      auto w = params[k].values;
      const auto d = grads[k];
      if (w.size() != d.size()) throw ShapeError("gradient tensor size mismatch");
      for (std::size_t i = 0; i < w.size(); ++i) w[i] -= cfg_.lr * d[i];
    }
    return;
  }
  if (m_.empty()) {
    m_.resize(params.size());
    v_.resize(params.size());
    for (std::size_t k = 0; k < params.size(); ++k) {
      m_[k].assign(params[k].values.size(), 0.0);
      v_[k].assign(params[k].values.size(), 0.0);
    }
  }
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto w = params[k].values;
    const auto d = grads[k];
    if (w.size() != d.size() || m_[k].size() != w.size())
      throw ShapeError("gradient tensor size mismatch");
    const bool decay = params[k].is_weight && cfg_.weight_decay != 0.0;
    auto& m = m_[k];
    auto& v = v_[k];
    for (std::size_t i = 0; i < w.size(); ++i) {
      double gi = d[i];
      if (decay) {
        if (cfg_.decoupled_decay)
          w[i] -= cfg_.lr * cfg_.weight_decay * w[i];
        else
          gi += cfg_.weight_decay * w[i];
      }
      m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * gi;
      v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * gi * gi;
      const double mh = m[i] / bc1;
      const double vh = v[i] / bc2;
      w[i] -= cfg_.lr * mh / (std::sqrt(vh) + cfg_.eps);
    }
  }
}

nlohmann::json to_json(const MlpModel& model) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : model.layers) {
    nlohmann::json jl;
    jl["in"] = l.spec.in;
    jl["out"] = l.spec.out;
    jl["batchnorm"] = l.spec.batchnorm;
    jl["bias"] = l.spec.bias;
    jl["activation"] = to_string(l.spec.activation);
    jl["slope"] = l.spec.slope;
    jl["weight"] = l.weight.values();
    if (l.spec.bias) jl["bias_values"] = l.bias;
    if (l.spec.batchnorm) {
      jl["gamma"] = l.gamma;
      jl["beta"] = l.beta;
      jl["running_mean"] = l.running_mean;
      jl["running_var"] = l.running_var;
    }
    layers.push_back(std::move(jl));
  }
  return {{"schema_version", kSchemaVersion}, {"kind", "mlp"}, {"layers", std::move(layers)}};
}

MlpModel model_from_json(const nlohmann::json& j) {
  if (j.value("schema_version", -1) != kSchemaVersion)
    throw std::invalid_argument("unsupported model schema version");
  MlpModel model;
  std::vector<LayerSpec> specs;
  for (const auto& jl : j.at("layers")) {
    LayerSpec s;
    s.in = jl.at("in").get<std::size_t>();
    s.out = jl.at("out").get<std::size_t>();
    s.batchnorm = jl.at("batchnorm").get<bool>();
    s.bias = jl.at("bias").get<bool>();
    s.activation = activation_from_string(jl.at("activation").get<std::string>());
    s.slope = jl.at("slope").get<double>();
    specs.push_back(s);
  }
  validate_specs(specs);
  std::size_t i = 0;
  for (const auto& jl : j.at("layers")) {
    DenseLayer l;
    l.spec = specs[i++];
    l.weight = Matrix(l.spec.out, l.spec.in);
    auto w = jl.at("weight").get<std::vector<double>>();
    if (w.size() != l.weight.size()) throw ShapeError("weight size mismatch in model dump");
    l.weight.values() = std::move(w);
    auto load = [&](const char* key, std::vector<double>& dst) {
      dst = jl.at(key).get<std::vector<double>>();
      if (dst.size() != l.spec.out) throw ShapeError(std::string("size mismatch for ") + key);
    };
    if (l.spec.bias) load("bias_values", l.bias);
    if (l.spec.batchnorm) {
      load("gamma", l.gamma);
      load("beta", l.beta);
      load("running_mean", l.running_mean);
      load("running_var", l.running_var);
    }
    model.layers.push_back(std::move(l));
  }
  return model;
}

}  // namespace antgen::nn
