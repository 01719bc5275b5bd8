#pragma once

// Black-box evaluator boundary and the deterministic surrogate used in place
// of a full-wave solver.

#include <atomic>
#include <cstddef>
#include <limits>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "antgen/geometry.hpp"
#include "antgen/goal.hpp"
#include "antgen/sweep.hpp"

namespace antgen {

class BudgetExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Counts evaluator calls. Thread-safe.
class BudgetLedger {
 public:
  explicit BudgetLedger(std::size_t limit = std::numeric_limits<std::size_t>::max())
      : limit_(limit) {}

  // Reserves n evaluations or throws BudgetExhausted without reserving any.
  void charge(std::size_t n = 1);
  bool try_charge(std::size_t n = 1);

  std::size_t used() const { return used_.load(); }
  std::size_t limit() const { return limit_; }
  std::size_t remaining() const { return limit_ - used(); }

 private:
  std::size_t limit_;
  std::atomic<std::size_t> used_{0};
};

class Evaluator {
 public:
  virtual ~Evaluator() = default;

  // Deterministic: identical parameters give identical curves.
  virtual S11Curve evaluate(const ParameterVector& params) const = 0;
  virtual const FrequencySweep& sweep() const = 0;
  virtual std::string name() const = 0;
  // Stable identifier of the evaluator and its settings.
  virtual std::string digest() const = 0;
  std::string cost_unit() const { return "simulation"; }
};

struct SurrogateConstants {
  double velocity_ghz_mm = 75.0;  // f = velocity / L
  double depth_base_db = 3.0;
  double depth_per_mm_db = 20.0;
  double depth_cap_db = 30.0;
  double width_base_ghz = 0.15;
  double width_per_mm_ghz = 0.5;
  double floor_db = -60.0;
};

struct Notch {
  std::size_t terminal = 0;  // 0-based node index the path ends at
  double length_mm = 0.0;
  double mean_radius_mm = 0.0;
  double freq_ghz = 0.0;
  double depth_db = 0.0;
  double width_ghz = 0.0;
};

// Each feed-to-terminal path along the connection center lines (terminals
// are the degree-1 nodes other than the feed, which includes the ground
// node) contributes a Lorentzian notch at velocity / L. Depth and width grow
// with the mean radius of the path's nodes, excluding the fixed feed.
class SurrogateEvaluator final : public Evaluator {
 public:
  explicit SurrogateEvaluator(FrequencySweep sweep = {},
                              ConnectionMap conn = ConnectionMap::defaults(),
                              SurrogateConstants constants = {});

  std::vector<Notch> notches(std::span<const Node> nodes) const;
  S11Curve evaluate_nodes(std::span<const Node> nodes) const;

  // Throws GeometryError when the geometry fails the checker.
  S11Curve evaluate(const ParameterVector& params) const override;
  const FrequencySweep& sweep() const override { return sweep_; }
  std::string name() const override { return "surrogate"; }
  std::string digest() const override;

  const SurrogateConstants& constants() const { return constants_; }
  const ConnectionMap& connections() const { return conn_; }

 private:
  FrequencySweep sweep_;
  ConnectionMap conn_;
  SurrogateConstants constants_;
  std::vector<double> grid_;
};

// Runs `command <params.json> <curve.csv>` and reads the curve back; the
// params file is {"schema_version":1,"params":[20 values]}.
class ExternalEvaluator final : public Evaluator {
 public:
  ExternalEvaluator(std::string command, FrequencySweep sweep, std::string work_dir);

  S11Curve evaluate(const ParameterVector& params) const override;
  const FrequencySweep& sweep() const override { return sweep_; }
  std::string name() const override { return "external"; }
  std::string digest() const override;

 private:
  std::string command_;
  FrequencySweep sweep_;
  std::string work_dir_;
  mutable std::atomic<std::size_t> calls_{0};
};

// name: "surrogate" or "external" (options: command, work_dir, sweep).
std::unique_ptr<Evaluator> make_evaluator(const std::string& name,
                                          const nlohmann::json& options = {});

// Charges the ledger for the whole batch up front, then evaluates with up
// to `threads` workers. Results are ordered by input index.
std::vector<S11Curve> evaluate_batch(const Evaluator& evaluator,
                                     std::span<const ParameterVector> params,
                                     BudgetLedger& ledger, int threads = 1);

// Reference path for the batch kernel: one evaluation after another.
std::vector<S11Curve> evaluate_batch_serial(const Evaluator& evaluator,
                                            std::span<const ParameterVector> params,
                                            BudgetLedger& ledger);

}  // namespace antgen
