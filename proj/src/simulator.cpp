#include "antgen/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>

#include <fmt/format.h>

#include "antgen/hash.hpp"

namespace antgen {

std::string hex_digest(std::uint64_t h) { return fmt::format("{:016x}", h); }

void BudgetLedger::charge(std::size_t n) {
  if (!try_charge(n))
    throw BudgetExhausted(fmt::format("evaluation budget of {} exhausted", limit_));
}

bool BudgetLedger::try_charge(std::size_t n) {
  std::size_t cur = used_.load();
  do {
    if (n > limit_ - cur) return false;
  } while (!used_.compare_exchange_weak(cur, cur + n));
  return true;
}

SurrogateEvaluator::SurrogateEvaluator(FrequencySweep sweep, ConnectionMap conn,
                                       SurrogateConstants constants)
    : sweep_(sweep), conn_(std::move(conn)), constants_(constants) {
  sweep_.validate();
  conn_.validate();
  grid_ = sweep_.grid();
}

std::vector<Notch> SurrogateEvaluator::notches(std::span<const Node> nodes) const {
  const std::size_t n = conn_.node_count;
  if (nodes.size() != n) throw std::invalid_argument("node table size mismatch");
  std::vector<std::vector<std::size_t>> adj(n);
  for (const auto& [a, b] : conn_.pairs) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  const std::size_t src = conn_.feed_node;

  // Shortest center-line paths from the feed (the default map is a tree).
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> prev(n, n);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[src] = 0.0;
  pq.emplace(0.0, src);
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[u]) continue;
    for (std::size_t v : adj[u]) {
      const double w = std::hypot(nodes[u].x - nodes[v].x, nodes[u].y - nodes[v].y);
      if (dist[u] + w < dist[v]) {
        dist[v] = dist[u] + w;
        prev[v] = u;
        pq.emplace(dist[v], v);
      }
    }
  }

  const auto& c = constants_;
  std::vector<Notch> out;
  for (std::size_t t = 0; t < n; ++t) {
    if (t == src || adj[t].size() != 1 || !std::isfinite(dist[t])) continue;
    double rsum = 0.0;
    std::size_t count = 0;
    for (std::size_t v = t; v != src; v = prev[v]) {
      rsum += nodes[v].r;
      ++count;
    }
    Notch k;
    k.terminal = t;
    k.length_mm = dist[t];
    k.mean_radius_mm = rsum / static_cast<double>(count);
    k.freq_ghz = c.velocity_ghz_mm / k.length_mm;
    k.depth_db = std::min(c.depth_base_db + c.depth_per_mm_db * k.mean_radius_mm, c.depth_cap_db);
    k.width_ghz = c.width_base_ghz + c.width_per_mm_ghz * k.mean_radius_mm;
    out.push_back(k);
  }
  return out;
}

S11Curve SurrogateEvaluator::evaluate_nodes(std::span<const Node> nodes) const {
  const auto ks = notches(nodes);
  S11Curve curve;
  curve.freq_ghz = grid_;
  curve.s11_db.resize(grid_.size());
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    double sum = 0.0;
    for (const auto& k : ks) {
      const double x = (grid_[i] - k.freq_ghz) / k.width_ghz;
      sum += k.depth_db / (1.0 + x * x);
    }
    curve.s11_db[i] = std::min(0.0, std::max(constants_.floor_db, -sum));
  }
  return curve;
}

S11Curve SurrogateEvaluator::evaluate(const ParameterVector& params) const {
  const auto nodes = nodes_from(params, conn_);
  const auto verdict = check_geometry(nodes, conn_);
  if (!verdict) throw GeometryError("invalid geometry: " + verdict.reason);
  return evaluate_nodes(nodes);
}

std::string SurrogateEvaluator::digest() const {
  const auto& c = constants_;
  std::string key = fmt::format("surrogate;{};{};{};{};{};{};{};{};{};{}", sweep_.f_start,
                                sweep_.f_stop, sweep_.count, c.velocity_ghz_mm, c.depth_base_db,
                                c.depth_per_mm_db, c.depth_cap_db, c.width_base_ghz,
                                c.width_per_mm_ghz, c.floor_db);
  for (const auto& [a, b] : conn_.pairs) key += fmt::format(";{}-{}", a, b);
  return "surrogate-" + hex_digest(fnv1a64(key));
}

ExternalEvaluator::ExternalEvaluator(std::string command, FrequencySweep sweep, std::string work_dir)
    : command_(std::move(command)), sweep_(sweep), work_dir_(std::move(work_dir)) {
  sweep_.validate();
  if (command_.empty()) throw std::invalid_argument("external evaluator needs a command");
  std::filesystem::create_directories(work_dir_);
}

S11Curve ExternalEvaluator::evaluate(const ParameterVector& params) const {
  namespace fs = std::filesystem;
  const std::size_t id = calls_.fetch_add(1);
  const fs::path in = fs::path(work_dir_) / fmt::format("eval-{}.json", id);
  const fs::path out = fs::path(work_dir_) / fmt::format("eval-{}.csv", id);
  {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["params"] = std::vector<double>(params.values().begin(), params.values().end());
    std::ofstream f(in);
    f << j.dump() << '\n';
  }
  const std::string cmd = fmt::format("{} '{}' '{}'", command_, in.string(), out.string());
  if (std::system(cmd.c_str()) != 0)
    throw std::runtime_error("external evaluator failed: " + cmd);
  std::ifstream f(out);
  if (!f) throw std::runtime_error("external evaluator wrote no curve: " + out.string());
  std::stringstream ss;
  ss << f.rdbuf();
  auto curve = curve_from_csv(ss.str());
  curve.validate();
  if (curve.size() < 2) throw std::runtime_error("external evaluator returned an empty curve");
  return curve;
}

std::string ExternalEvaluator::digest() const {
  return "external-" + hex_digest(fnv1a64(fmt::format("{};{};{};{}", command_, sweep_.f_start,
                                                      sweep_.f_stop, sweep_.count)));
}

std::unique_ptr<Evaluator> make_evaluator(const std::string& name, const nlohmann::json& options) {
  FrequencySweep sweep;
  if (options.is_object() && options.contains("sweep")) {
    const auto& s = options.at("sweep");
    sweep.f_start = s.value("f_start", sweep.f_start);
    sweep.f_stop = s.value("f_stop", sweep.f_stop);
    sweep.count = s.value("count", sweep.count);
  }
  if (name == "surrogate") return std::make_unique<SurrogateEvaluator>(sweep);
  if (name == "external") {
    if (!options.is_object() || !options.contains("command"))
      throw std::invalid_argument("external evaluator needs options.command");
    return std::make_unique<ExternalEvaluator>(options.at("command").get<std::string>(), sweep,
                                               options.value("work_dir", std::string("external_eval")));
  }
  throw std::invalid_argument("unknown evaluator: " + name);
}

std::vector<S11Curve> evaluate_batch(const Evaluator& evaluator,
                                     std::span<const ParameterVector> params, BudgetLedger& ledger,
                                     int threads) {
  ledger.charge(params.size());
  std::vector<S11Curve> out(params.size());
  std::vector<std::exception_ptr> errors(params.size());
  const auto n = static_cast<std::int64_t>(params.size());
#pragma omp parallel for schedule(dynamic) num_threads(std::max(threads, 1)) if (threads > 1)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = evaluator.evaluate(params[static_cast<std::size_t>(i)]);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::vector<S11Curve> evaluate_batch_serial(const Evaluator& evaluator,
                                            std::span<const ParameterVector> params,
                                            BudgetLedger& ledger) {
  ledger.charge(params.size());
  std::vector<S11Curve> out;
  out.reserve(params.size());
  for (const auto& p : params) out.push_back(evaluator.evaluate(p));
  return out;
}

}  // namespace antgen
