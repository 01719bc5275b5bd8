#include "antgen/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

namespace antgen {

Objective::Objective(Fn fn, std::vector<Interval> bounds, std::size_t budget, double penalty)
    : fn_(std::move(fn)), bounds_(std::move(bounds)), ledger_(budget), penalty_(penalty) {
  if (bounds_.empty()) throw std::invalid_argument("objective needs at least one dimension");
  for (const auto& b : bounds_)
    if (!(b.lo < b.hi)) throw std::invalid_argument("objective bounds need lo < hi");
}

Objective Objective::from_goal(const Evaluator& evaluator, const GoalSpec& goal,
                               const ParameterRanges& ranges, const ConnectionMap& conn,
                               std::size_t budget, double penalty) {
  goal.validate(evaluator.sweep());
  auto fn = [&evaluator, goal, conn, penalty](std::span<const double> x) -> ObjectiveValue {
    const auto p = ParameterVector::from_span(x);
    if (!check_geometry(p, conn)) return {penalty, false};
    const auto metrics = evaluate_metrics(evaluator.evaluate(p), goal);
    return {goal.score(metrics), goal.satisfied(metrics)};
  };
  return Objective(fn, {ranges.bounds().begin(), ranges.bounds().end()}, budget, penalty);
}

Objective Objective::from_function(std::function<double(std::span<const double>)> f,
                                   std::vector<Interval> bounds, std::size_t budget, double target) {
  auto fn = [f = std::move(f), target](std::span<const double> x) -> ObjectiveValue {
    const double v = f(x);
    return {v, v <= target};
  };
  return Objective(fn, std::move(bounds), budget);
}

bool Objective::in_bounds(std::span<const double> x) const {
  if (x.size() != bounds_.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!(x[i] >= bounds_[i].lo && x[i] <= bounds_[i].hi)) return false;
  return true;
}

std::vector<double> Objective::clip(std::span<const double> x) const {
  std::vector<double> out(x.begin(), x.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::clamp(out[i], bounds_[i].lo, bounds_[i].hi);
  return out;
}

double Objective::operator()(std::span<const double> x) {
  if (!in_bounds(x)) throw std::invalid_argument("objective called outside its bounds");
  ledger_.charge(1);
  ObjectiveValue v = fn_(x);
  if (v.value == penalty_ && !v.goal) ++penalties_;
  if (!std::isfinite(v.value)) {
    v.value = penalty_;
    ++penalties_;
  }
  history_.emplace_back(x.begin(), x.end());
  if (v.value < best_) {
    best_ = v.value;
    best_x_.assign(x.begin(), x.end());
  }
  if (v.goal && !first_goal_) first_goal_ = ledger_.used();
  trace_.push_back(best_);
  return v.value;
}

namespace {

RunRecord finish(const std::string& method, const Objective& obj, bool exhausted) {
  RunRecord r;
  r.method = method;
  r.evals_to_goal = obj.evals_to_goal();
  r.evaluations = obj.evaluations();
  r.budget = obj.budget();
  r.penalties = obj.penalties();
  r.best = obj.best();
  r.best_x = obj.best_x();
  r.trace = obj.trace();
  r.budget_exhausted = exhausted;
  return r;
}

using Vec = std::vector<double>;

// Maps between the box and the unit cube.
struct UnitBox {
  const std::vector<Interval>& b;
  Vec to_x(const Vec& u) const {
    Vec x(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
      x[i] = std::clamp(b[i].lo + std::clamp(u[i], 0.0, 1.0) * b[i].width(), b[i].lo, b[i].hi);
    return x;
  }
  Vec to_u(std::span<const double> x) const {
    Vec u(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) u[i] = (x[i] - b[i].lo) / b[i].width();
    return u;
  }
};

}  // namespace

RunRecord nelder_mead(Objective& obj, std::span<const double> start, const NelderMeadOptions& opts) {
  const std::size_t n = obj.dim();
  if (start.size() != n || !obj.in_bounds(start))
    throw std::invalid_argument("Nelder-Mead start must lie within the bounds");
  const auto& b = obj.bounds();
  std::vector<Vec> s(n + 1, Vec(start.begin(), start.end()));
  Vec f(n + 1);
  bool exhausted = false;
  try {
    for (std::size_t i = 0; i < n; ++i) {
      const double step = opts.initial_step * b[i].width();
      s[i + 1][i] = s[i + 1][i] + step <= b[i].hi ? s[i + 1][i] + step : s[i + 1][i] - step;
    }
    for (std::size_t i = 0; i <= n && !obj.done(); ++i) f[i] = obj(s[i]);
    std::vector<std::size_t> order(n + 1);
    while (!obj.done()) {
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](auto a, auto c) { return f[a] < f[c]; });
      std::vector<Vec> s2;
      Vec f2;
      for (auto k : order) {
        s2.push_back(s[k]);
        f2.push_back(f[k]);
      }
      s.swap(s2);
      f.swap(f2);

      double spread_x = 0.0;
      for (std::size_t k = 1; k <= n; ++k)
        for (std::size_t i = 0; i < n; ++i) spread_x = std::max(spread_x, std::abs(s[k][i] - s[0][i]));
      if (f[n] - f[0] <= opts.tolerance && spread_x <= opts.tolerance) break;

      Vec c(n, 0.0);
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i) c[i] += s[k][i] / static_cast<double>(n);
      auto along = [&](const Vec& from, double t) {
        Vec x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = c[i] + t * (from[i] - c[i]);
        return obj.clip(x);
      };

      const Vec xr = along(s[n], -1.0);
      const double fr = obj(xr);
      if (fr < f[0]) {
        const Vec xe = along(s[n], -2.0);
        const double fe = obj.done() ? fr + 1.0 : obj(xe);
        if (fe < fr) {
          s[n] = xe;
          f[n] = fe;
        } else {
          s[n] = xr;
          f[n] = fr;
        }
        continue;
      }
      if (fr < f[n - 1]) {
        s[n] = xr;
        f[n] = fr;
        continue;
      }
      bool shrink = false;
      if (fr < f[n]) {
        const Vec xc = along(s[n], -0.5);
        const double fc = obj(xc);
        if (fc <= fr) {
          s[n] = xc;
          f[n] = fc;
        } else {
          shrink = true;
        }
      } else {
        const Vec xc = along(s[n], 0.5);
        const double fc = obj(xc);
        if (fc < f[n]) {
          s[n] = xc;
          f[n] = fc;
        } else {
          shrink = true;
        }
      }
      if (shrink) {
        for (std::size_t k = 1; k <= n && !obj.done(); ++k) {
          for (std::size_t i = 0; i < n; ++i) s[k][i] = s[0][i] + 0.5 * (s[k][i] - s[0][i]);
          f[k] = obj(s[k]);
        }
      }
    }
  } catch (const BudgetExhausted&) {
    exhausted = true;
  }
  return finish("nelder_mead", obj, exhausted);
}

RunRecord cma_es(Objective& obj, std::uint64_t seed, const CmaEsOptions& opts) {
  using Eigen::MatrixXd;
  using Eigen::VectorXd;
  const std::size_t d = obj.dim();
  const int n = static_cast<int>(d);
  const std::size_t lambda = 4 + static_cast<std::size_t>(std::floor(3.0 * std::log(static_cast<double>(d))));
  const std::size_t mu = lambda / 2;
  if (obj.remaining() < lambda) throw std::invalid_argument("CMA-ES budget is below one population");

  Vec w(mu);
  for (std::size_t i = 0; i < mu; ++i)
    w[i] = std::log(static_cast<double>(mu) + 0.5) - std::log(static_cast<double>(i + 1));
  const double wsum = std::accumulate(w.begin(), w.end(), 0.0);
  for (auto& v : w) v /= wsum;
  double w2 = 0.0;
  for (double v : w) w2 += v * v;
  const double mueff = 1.0 / w2;
  const double dd = static_cast<double>(d);
  const double cc = (4.0 + mueff / dd) / (dd + 4.0 + 2.0 * mueff / dd);
  const double cs = (mueff + 2.0) / (dd + mueff + 5.0);
  const double c1 = 2.0 / ((dd + 1.3) * (dd + 1.3) + mueff);
  const double cmu = std::min(1.0 - c1, 2.0 * (mueff - 2.0 + 1.0 / mueff) / ((dd + 2.0) * (dd + 2.0) + mueff));
  const double damps = 1.0 + 2.0 * std::max(0.0, std::sqrt((mueff - 1.0) / (dd + 1.0)) - 1.0) + cs;
  const double chi_n = std::sqrt(dd) * (1.0 - 1.0 / (4.0 * dd) + 1.0 / (21.0 * dd * dd));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const UnitBox box{obj.bounds()};

  VectorXd m(n);
  if (opts.start) {
    if (opts.start->size() != d || !obj.in_bounds(*opts.start))
      throw std::invalid_argument("CMA-ES start must lie within the bounds");
    const Vec u = box.to_u(*opts.start);
    for (int i = 0; i < n; ++i) m(i) = u[static_cast<std::size_t>(i)];
  } else {
    for (int i = 0; i < n; ++i) m(i) = unif(rng);
  }
  double sigma = opts.sigma0;
  MatrixXd C = MatrixXd::Identity(n, n);
  VectorXd pc = VectorXd::Zero(n), ps = VectorXd::Zero(n);
  std::vector<double> min_eig;
  bool exhausted = false;
  try {
    for (std::size_t gen = 0; !obj.done(); ++gen) {
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(C);
      VectorXd evals = es.eigenvalues().cwiseMax(1e-300);
      const MatrixXd B = es.eigenvectors();
      const VectorXd D = evals.cwiseSqrt();
      min_eig.push_back(es.eigenvalues().minCoeff());
      if (sigma * D.maxCoeff() < 1e-14) break;

      std::vector<VectorXd> ys(lambda);
      std::vector<double> fs(lambda);
      for (std::size_t k = 0; k < lambda; ++k) {
        VectorXd u;
        for (std::size_t tries = 0;; ++tries) {
          VectorXd z(n);
          for (int i = 0; i < n; ++i) z(i) = normal(rng);
          u = m + sigma * (B * D.asDiagonal() * z);
          if ((u.array() >= 0.0).all() && (u.array() <= 1.0).all()) break;
          if (tries + 1 >= opts.max_resample) {
            u = u.cwiseMax(0.0).cwiseMin(1.0);
            break;
          }
        }
        ys[k] = (u - m) / sigma;
        fs[k] = obj(box.to_x(Vec(u.data(), u.data() + n)));
        if (obj.done()) break;
      }
      if (obj.done()) break;

      std::vector<std::size_t> order(lambda);
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return fs[a] < fs[b]; });
      VectorXd yw = VectorXd::Zero(n);
      for (std::size_t i = 0; i < mu; ++i) yw += w[i] * ys[order[i]];
      m += sigma * yw;

      const MatrixXd c_inv_sqrt = B * evals.cwiseSqrt().cwiseInverse().asDiagonal() * B.transpose();
      ps = (1.0 - cs) * ps + std::sqrt(cs * (2.0 - cs) * mueff) * (c_inv_sqrt * yw);
      const double ps_norm = ps.norm();
      const double denom = std::sqrt(1.0 - std::pow(1.0 - cs, 2.0 * static_cast<double>(gen + 1)));
      const bool hsig = ps_norm / denom / chi_n < 1.4 + 2.0 / (dd + 1.0);
      pc = (1.0 - cc) * pc + (hsig ? std::sqrt(cc * (2.0 - cc) * mueff) : 0.0) * yw;
      MatrixXd rank_mu = MatrixXd::Zero(n, n);
      for (std::size_t i = 0; i < mu; ++i) rank_mu += w[i] * ys[order[i]] * ys[order[i]].transpose();
      C = (1.0 - c1 - cmu) * C + c1 * (pc * pc.transpose() + (hsig ? 0.0 : cc * (2.0 - cc)) * C) +
          cmu * rank_mu;
      C = 0.5 * (C + C.transpose());
      sigma *= std::exp((cs / damps) * (ps_norm / chi_n - 1.0));
      sigma = std::min(sigma, 1.0);
    }
  } catch (const BudgetExhausted&) {
    exhausted = true;
  }
  auto r = finish("cma_es", obj, exhausted);
  r.diagnostics = std::move(min_eig);
  return r;
}

RunRecord pso(Objective& obj, std::uint64_t seed, const PsoOptions& opts) {
  if (opts.particles == 0) throw std::invalid_argument("PSO needs at least one particle");
  const std::size_t d = obj.dim();
  const auto& b = obj.bounds();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Vec> x(opts.particles, Vec(d)), v(opts.particles, Vec(d)), pbest;
  Vec pf(opts.particles, std::numeric_limits<double>::infinity());
  for (auto& p : x)
    for (std::size_t i = 0; i < d; ++i) p[i] = b[i].lo + unif(rng) * b[i].width();
  for (auto& p : v)
    for (std::size_t i = 0; i < d; ++i) p[i] = (unif(rng) - 0.5) * 0.2 * b[i].width();
  pbest = x;
  Vec gbest = x[0];
  double gf = std::numeric_limits<double>::infinity();
  bool exhausted = false;
  try {
    for (std::size_t k = 0; k < opts.particles && !obj.done(); ++k) {
      pf[k] = obj(x[k]);
      if (pf[k] < gf) {
        gf = pf[k];
        gbest = x[k];
      }
    }
    while (!obj.done()) {
      for (std::size_t k = 0; k < opts.particles; ++k)
        for (std::size_t i = 0; i < d; ++i) {
          const double vmax = 0.5 * b[i].width();
          double vi = opts.inertia * v[k][i] + opts.cognitive * unif(rng) * (pbest[k][i] - x[k][i]) +
                      opts.social * unif(rng) * (gbest[i] - x[k][i]);
          vi = std::clamp(vi, -vmax, vmax);
          double xi = x[k][i] + vi;
          if (xi < b[i].lo || xi > b[i].hi) {
            xi = std::clamp(xi, b[i].lo, b[i].hi);
            vi = 0.0;
          }
          v[k][i] = vi;
          x[k][i] = xi;
        }
      Vec fx(opts.particles);
      for (std::size_t k = 0; k < opts.particles && !obj.done(); ++k) fx[k] = obj(x[k]);
      if (obj.done()) break;
      for (std::size_t k = 0; k < opts.particles; ++k)
        if (fx[k] < pf[k]) {
          pf[k] = fx[k];
          pbest[k] = x[k];
          if (fx[k] < gf) {
            gf = fx[k];
            gbest = x[k];
          }
        }
    }
  } catch (const BudgetExhausted&) {
    exhausted = true;
  }
  return finish("pso", obj, exhausted);
}

RunRecord ga(Objective& obj, std::uint64_t seed, const GaOptions& opts) {
  if (opts.population < 2) throw std::invalid_argument("GA population must be >= 2");
  const std::size_t d = obj.dim();
  const auto& b = obj.bounds();
  const double pm = opts.mutation_prob < 0.0 ? 1.0 / static_cast<double>(d) : opts.mutation_prob;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const std::size_t n = opts.population;
  std::vector<Vec> pop(n, Vec(d));
  Vec fit(n, std::numeric_limits<double>::infinity());
  for (auto& p : pop)
    for (std::size_t i = 0; i < d; ++i) p[i] = b[i].lo + unif(rng) * b[i].width();

  auto tournament = [&]() {
    const std::size_t a = rng() % n, c = rng() % n;
    return fit[a] <= fit[c] ? a : c;
  };
  // Simulated binary crossover on one variable pair, bounded form.
  auto sbx = [&](double& y1, double& y2, const Interval& iv) {
    if (std::abs(y1 - y2) < 1e-14) return;
    const double lo = iv.lo, hi = iv.hi, eta = opts.eta_crossover;
    const double a = std::min(y1, y2), c = std::max(y1, y2);
    const double u = unif(rng);
    auto child = [&](double beta) {
      const double alpha = 2.0 - std::pow(beta, -(eta + 1.0));
      const double betaq = u <= 1.0 / alpha ? std::pow(u * alpha, 1.0 / (eta + 1.0))
                                            : std::pow(1.0 / (2.0 - u * alpha), 1.0 / (eta + 1.0));
      return betaq;
    };
    const double bq1 = child(1.0 + 2.0 * (a - lo) / (c - a));
    const double bq2 = child(1.0 + 2.0 * (hi - c) / (c - a));
    double c1 = std::clamp(0.5 * ((a + c) - bq1 * (c - a)), lo, hi);
    double c2 = std::clamp(0.5 * ((a + c) + bq2 * (c - a)), lo, hi);
    if (unif(rng) < 0.5) std::swap(c1, c2);
    y1 = c1;
    y2 = c2;
  };
  auto mutate = [&](double& y, const Interval& iv) {
    const double lo = iv.lo, hi = iv.hi, eta = opts.eta_mutation;
    const double d1 = (y - lo) / (hi - lo), d2 = (hi - y) / (hi - lo);
    const double u = unif(rng), p = 1.0 / (eta + 1.0);
    double dq;
    if (u < 0.5)
      dq = std::pow(2.0 * u + (1.0 - 2.0 * u) * std::pow(1.0 - d1, eta + 1.0), p) - 1.0;
    else
      dq = 1.0 - std::pow(2.0 * (1.0 - u) + 2.0 * (u - 0.5) * std::pow(1.0 - d2, eta + 1.0), p);
    y = std::clamp(y + dq * (hi - lo), lo, hi);
  };

  bool exhausted = false;
  try {
    for (std::size_t k = 0; k < n && !obj.done(); ++k) fit[k] = obj(pop[k]);
    std::size_t stalled = 0;
    for (std::size_t g = 0; g < opts.max_generations && !obj.done() && stalled < 50; ++g) {
      std::vector<Vec> kids;
      while (kids.size() < n) {
        const std::size_t i1 = tournament(), i2 = tournament();
        Vec a = pop[i1], c = pop[i2];
        if (unif(rng) < opts.crossover_prob)
          for (std::size_t i = 0; i < d; ++i)
            if (unif(rng) < 0.5) sbx(a[i], c[i], b[i]);
        for (std::size_t i = 0; i < d; ++i) {
          if (unif(rng) < pm) mutate(a[i], b[i]);
          if (unif(rng) < pm) mutate(c[i], b[i]);
        }
        // Unchanged copies are not new individuals.
        if (a != pop[i1] && a != pop[i2]) kids.push_back(std::move(a));
        if (kids.size() < n && c != pop[i1] && c != pop[i2]) kids.push_back(std::move(c));
        if (opts.crossover_prob == 0.0 && pm == 0.0) break;
      }
      if (kids.empty()) {
        ++stalled;
        continue;
      }
      stalled = 0;
      Vec kf;
      for (const auto& kid : kids) {
        if (obj.done()) break;
        kf.push_back(obj(kid));
      }
      kids.resize(kf.size());
      // Elitist (mu + lambda) survival.
      std::vector<Vec> all = pop;
      Vec allf = fit;
      all.insert(all.end(), kids.begin(), kids.end());
      allf.insert(allf.end(), kf.begin(), kf.end());
      std::vector<std::size_t> order(all.size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return allf[x] < allf[y]; });
      for (std::size_t k = 0; k < n; ++k) {
        pop[k] = all[order[k]];
        fit[k] = allf[order[k]];
      }
    }
  } catch (const BudgetExhausted&) {
    exhausted = true;
  }
  auto r = finish("ga", obj, exhausted);
  return r;
}

RunRecord trust_region(Objective& obj, std::span<const double> start, const TrustRegionOptions& opts) {
  using Eigen::MatrixXd;
  using Eigen::VectorXd;
  const std::size_t d = obj.dim();
  const int n = static_cast<int>(d);
  if (start.size() != d || !obj.in_bounds(start))
    throw std::invalid_argument("trust-region start must lie within the bounds");
  const UnitBox box{obj.bounds()};
  auto f_at = [&](const VectorXd& u) {
    return obj(box.to_x(Vec(u.data(), u.data() + n)));
  };
  const Vec u0 = box.to_u(start);
  VectorXd x = Eigen::Map<const VectorXd>(u0.data(), n);
  bool exhausted = false;
  try {
    double fx = f_at(x);
    auto gradient = [&](const VectorXd& at, double f0) {
      VectorXd g(n);
      for (int i = 0; i < n && !obj.done(); ++i) {
        VectorXd y = at;
        double h = opts.fd_step;
        if (y(i) + h > 1.0) h = -h;
        y(i) += h;
        g(i) = (f_at(y) - f0) / h;
      }
      return g;
    };
    if (obj.done()) return finish("trust_region", obj, false);
    VectorXd g = gradient(x, fx);
    MatrixXd B = MatrixXd::Identity(n, n);
    double radius = opts.initial_radius;
    while (!obj.done() && radius > opts.min_radius && g.norm() > 1e-14) {
      // Dogleg on the quasi-Newton model.
      VectorXd p;
      const double gBg = g.dot(B * g);
      const VectorXd pu = gBg > 0.0 ? VectorXd(-(g.squaredNorm() / gBg) * g) : VectorXd(-radius / g.norm() * g);
      Eigen::LLT<MatrixXd> llt(B);
      const VectorXd pb = llt.info() == Eigen::Success ? VectorXd(-llt.solve(g)) : pu;
      if (pb.norm() <= radius) {
        p = pb;
      } else if (pu.norm() >= radius) {
        p = -radius / g.norm() * g;
      } else {
        const VectorXd dlt = pb - pu;
        const double a = dlt.squaredNorm(), bb = 2.0 * pu.dot(dlt), c = pu.squaredNorm() - radius * radius;
        const double tau = (-bb + std::sqrt(std::max(bb * bb - 4.0 * a * c, 0.0))) / (2.0 * a);
        p = pu + tau * dlt;
      }
      const VectorXd xn = (x + p).cwiseMax(0.0).cwiseMin(1.0);
      p = xn - x;
      if (p.norm() < 1e-300) {
        radius *= 0.25;
        continue;
      }
      const double pred = -(g.dot(p) + 0.5 * p.dot(B * p));
      const double fn = f_at(xn);
      const double rho = pred > 0.0 ? (fx - fn) / pred : -1.0;
      if (rho < 0.25)
        radius *= 0.25;
      else if (rho > 0.75 && p.norm() >= 0.99 * radius)
        radius = std::min(2.0 * radius, opts.max_radius);
      if (rho > opts.eta && fn < fx) {
        const VectorXd gn = gradient(xn, fn);
        if (obj.done()) break;
        const VectorXd s = p, yv = gn - g;
        const double sy = s.dot(yv);
        if (sy > 1e-12 * s.norm() * yv.norm()) {
          const VectorXd Bs = B * s;
          B += (yv * yv.transpose()) / sy - (Bs * Bs.transpose()) / s.dot(Bs);
        }
        x = xn;
        fx = fn;
        g = gn;
      }
    }
  } catch (const BudgetExhausted&) {
    exhausted = true;
  }
  return finish("trust_region", obj, exhausted);
}

const std::vector<std::string>& baseline_names() {
  static const std::vector<std::string> names = {"nelder_mead", "cma_es", "pso", "ga", "trust_region"};
  return names;
}

RunRecord run_baseline(const std::string& method, Objective& obj, std::span<const double> start,
                       std::uint64_t seed) {
  if (method == "nelder_mead") return nelder_mead(obj, start);
  if (method == "cma_es") {
    CmaEsOptions o;
    o.start = Vec(start.begin(), start.end());
    return cma_es(obj, seed, o);
  }
  if (method == "pso") return pso(obj, seed);
  if (method == "ga") return ga(obj, seed);
  if (method == "trust_region") return trust_region(obj, start);
  throw std::invalid_argument("unknown baseline method: " + method);
}

double sphere(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

double rosenbrock(std::span<const double> x) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double a = x[i + 1] - x[i] * x[i], c = 1.0 - x[i];
    s += 100.0 * a * a + c * c;
  }
  return s;
}

}  // namespace antgen
