#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "isus/density.hpp"
#include "isus/rng.hpp"

namespace isus {

using PerformanceFn = std::function<double(const std::vector<double>&)>;

struct SusConfig {
  std::size_t samples_per_level = 1000;
  double p0 = 0.1;
  std::size_t max_levels = 20;
  double stretch_a = 2.0;
  std::uint64_t seed = 0;

  std::size_t seeds_per_level() const {
    double k = p0 * static_cast<double>(samples_per_level);
    double kr = std::round(k);
    if (std::fabs(k - kr) > 1e-9 || kr < 2.0)
      throw std::invalid_argument("SusConfig: p0 * N must be an integer >= 2");
    return static_cast<std::size_t>(kr);
  }

  void validate() const {
    if (!(p0 > 0.0 && p0 < 1.0)) throw std::invalid_argument("SusConfig: p0 in (0,1)");
    if (max_levels < 1) throw std::invalid_argument("SusConfig: max_levels >= 1");
    (void)seeds_per_level();
  }
};

// One conditional level. threshold is computed from this level's own
// g-values; exactly p0*N of them fall at or below it. Samples are stored in
// step-major order for the MCMC levels (chains recoverable as
// g[step * n_seeds + walker]).
struct Level {
  std::size_t index = 0;
  double threshold = 0.0;
  std::vector<std::vector<double>> samples;
  std::vector<double> g_values;
  std::vector<std::size_t> seed_indices;
  double acceptance_rate = 1.0;
};

struct SusRun {
  std::vector<Level> levels;
  double pf_baseline = 0.0;
  double cov_baseline = 0.0;
  JointDensity density;
  std::size_t g_evaluations = 0;
  bool converged = true;
};

// Midpoint threshold between the (p0 N)-th and (p0 N + 1)-th order
// statistics; ties in g break by original sample index.
inline std::pair<double, std::vector<std::size_t>> level_threshold(
    const std::vector<double>& g_values, double p0) {
  const std::size_t n = g_values.size();
  double k = p0 * static_cast<double>(n);
  std::size_t ns = static_cast<std::size_t>(std::round(k));
  if (std::fabs(k - ns) > 1e-9 || ns < 1)
    throw std::invalid_argument("level_threshold: p0 * N must be a positive integer");
  for (double g : g_values)
    if (!std::isfinite(g)) throw std::invalid_argument("level_threshold: non-finite g");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (g_values[a] != g_values[b]) return g_values[a] < g_values[b];
    return a < b;
  });
  if (g_values[order[0]] == g_values[order[n - 1]])
    throw std::runtime_error("level_threshold: degenerate threshold");
  double lo = g_values[order[ns - 1]];
  double hi = g_values[order[ns]];
  // repeated MCMC states can tie across the quantile boundary; the tied
  // value itself is then the only consistent threshold
  double b = (lo == hi) ? lo : 0.5 * (lo + hi);
  std::vector<std::size_t> seeds(order.begin(), order.begin() + ns);
  return {b, seeds};
}

namespace detail {

struct ConditionalResult {
  std::vector<std::vector<double>> samples;
  std::vector<double> g_values;
  double acceptance_rate = 0.0;
};

// Stretch-move sampling of Q restricted to {g <= b}. The seeds form the
// walker ensemble and each walker advances 1/p0 steps; every post-move state
// is retained, so the level holds N states again. Proposals failing g <= b
// are rejected outright.
inline ConditionalResult conditional_mcmc(const std::vector<std::vector<double>>& seeds,
                                          const std::vector<double>& seed_g,
                                          const PerformanceFn& g, const JointDensity& Q,
                                          double b, std::size_t n_total, double a, Rng& rng,
                                          std::size_t* g_evaluations) {
  const std::size_t n_w = seeds.size();
  if (n_w < 2) throw std::invalid_argument("conditional_mcmc: need at least 2 seeds");
  const std::size_t d = Q.dim();
  const std::size_t steps = n_total / n_w;

  std::vector<std::vector<double>> walkers = seeds;
  std::vector<double> walker_g = seed_g;
  std::vector<double> walker_lq(n_w);
  for (std::size_t i = 0; i < n_w; ++i) {
    if (!(walker_g[i] <= b)) throw std::invalid_argument("conditional_mcmc: seed outside level");
    walker_lq[i] = joint_log_pdf(Q, walkers[i]);
  }

  ConditionalResult out;
  out.samples.reserve(steps * n_w);
  out.g_values.reserve(steps * n_w);
  const std::size_t half = n_w / 2;
  std::size_t accepted = 0, proposed = 0;
  std::vector<double> y(d);

  for (std::size_t step = 0; step < steps; ++step) {
    for (int side = 0; side < 2; ++side) {
      std::size_t begin = side == 0 ? 0 : half;
      std::size_t end = side == 0 ? half : n_w;
      std::size_t o_begin = side == 0 ? half : 0;
      std::size_t o_count = side == 0 ? n_w - half : half;
      for (std::size_t j = begin; j < end; ++j) {
        std::size_t k = o_begin + rng.below(o_count);
        double u = rng.uniform();
        double z = 1.0 + (a - 1.0) * u;
        z = z * z / a;
        for (std::size_t t = 0; t < d; ++t)
          y[t] = walkers[k][t] + z * (walkers[j][t] - walkers[k][t]);
        ++proposed;
        double lq_y = joint_log_pdf(Q, y);
        if (lq_y == -kInf) continue;
        double gy = g(y);
        ++(*g_evaluations);
        if (!std::isfinite(gy))
          throw std::runtime_error("conditional_mcmc: non-finite performance value");
        if (!(gy <= b)) continue;
        double log_acc = (static_cast<double>(d) - 1.0) * std::log(z) + lq_y - walker_lq[j];
        if (log_acc >= 0.0 || std::log(rng.uniform() + 1e-300) < log_acc) {
          walkers[j] = y;
          walker_g[j] = gy;
          walker_lq[j] = lq_y;
          ++accepted;
        }
      }
    }
    for (std::size_t j = 0; j < n_w; ++j) {
      out.samples.push_back(walkers[j]);
      out.g_values.push_back(walker_g[j]);
    }
  }
  out.acceptance_rate = proposed ? static_cast<double>(accepted) / proposed : 0.0;
  return out;
}

// Au-Beck correlation factor gamma for an MCMC level, from the indicator
// chains I(g <= b_next) laid out step-major over n_w walkers.
inline double chain_gamma(const std::vector<double>& g_values, double b_next,
                          std::size_t n_w) {
  const std::size_t n = g_values.size();
  const std::size_t steps = n / n_w;
  if (steps < 2) return 0.0;
  double p = 0.0;
  for (double g : g_values) p += (g <= b_next) ? 1.0 : 0.0;
  p /= static_cast<double>(n);
  double r0 = p - p * p;
  if (r0 <= 0.0) return 0.0;
  double gamma = 0.0;
  for (std::size_t k = 1; k < steps; ++k) {
    double rk = 0.0;
    std::size_t count = 0;
    for (std::size_t w = 0; w < n_w; ++w) {
      for (std::size_t s = 0; s + k < steps; ++s) {
        double i1 = g_values[s * n_w + w] <= b_next ? 1.0 : 0.0;
        double i2 = g_values[(s + k) * n_w + w] <= b_next ? 1.0 : 0.0;
        rk += i1 * i2;
        ++count;
      }
    }
    rk = rk / static_cast<double>(count) - p * p;
    gamma += 2.0 * (1.0 - static_cast<double>(k) / static_cast<double>(steps)) * rk / r0;
  }
  return std::max(gamma, 0.0);
}

}  // namespace detail

inline double cov_estimate(const SusRun& run);

// The subset-simulation engine. Level 1 samples Q directly; each further
// level runs conditional stretch-move MCMC from the p0*N retained seeds.
// Terminates when the computed threshold drops to or below zero, where the
// final conditional probability is the fraction of that level's samples with
// g <= 0.
inline SusRun run_sus(const PerformanceFn& g, const JointDensity& Q, const SusConfig& cfg) {
  cfg.validate();
  const std::size_t N = cfg.samples_per_level;
  const std::size_t n_seeds = cfg.seeds_per_level();

  SusRun run;
  run.density = Q;

  Rng sample_rng(cfg.seed, "sus-level", std::size_t{0});
  Level level;
  level.index = 0;
  level.samples = joint_sample(Q, N, sample_rng);
  level.g_values.reserve(N);
  for (const auto& x : level.samples) {
    double gv = g(x);
    ++run.g_evaluations;
    if (!std::isfinite(gv)) throw std::runtime_error("run_sus: non-finite performance value");
    level.g_values.push_back(gv);
  }

  for (std::size_t i = 0;; ++i) {
    auto [b, seeds] = level_threshold(level.g_values, cfg.p0);
    level.threshold = b;
    level.seed_indices = seeds;
    run.levels.push_back(level);

    if (b <= 0.0) break;  // final level reached
    if (i + 1 >= cfg.max_levels) {
      run.converged = false;
      break;
    }

    std::vector<std::vector<double>> seed_states;
    std::vector<double> seed_g;
    seed_states.reserve(n_seeds);
    for (std::size_t s : seeds) {
      seed_states.push_back(level.samples[s]);
      seed_g.push_back(level.g_values[s]);
    }
    Rng level_rng(cfg.seed, "sus-level", i + 1);
    detail::ConditionalResult cr = detail::conditional_mcmc(
        seed_states, seed_g, g, Q, b, N, cfg.stretch_a, level_rng, &run.g_evaluations);
    Level next;
    next.index = i + 1;
    next.samples = std::move(cr.samples);
    next.g_values = std::move(cr.g_values);
    next.acceptance_rate = cr.acceptance_rate;
    level = std::move(next);
  }

  // product of the empirical conditional fractions; equal to p0^{m-1} times
  // the final exceedance whenever no level ties at its threshold
  run.pf_baseline = 1.0;
  for (std::size_t i = 0; i < run.levels.size(); ++i) {
    const Level& lv = run.levels[i];
    double b_next = (i + 1 == run.levels.size()) ? 0.0 : lv.threshold;
    double frac = 0.0;
    for (double gv : lv.g_values) frac += (gv <= b_next) ? 1.0 : 0.0;
    run.pf_baseline *= frac / static_cast<double>(lv.g_values.size());
  }
  run.cov_baseline = cov_estimate(run);
  return run;
}

// Standard SuS coefficient-of-variation estimate: per-level binomial c.o.v.
// inflated by the chain correlation factor, combined in quadrature.
inline double cov_estimate(const SusRun& run) {
  double delta2 = 0.0;
  for (std::size_t i = 0; i < run.levels.size(); ++i) {
    const Level& lv = run.levels[i];
    const bool final_level = (i + 1 == run.levels.size());
    double b_next = final_level ? 0.0 : lv.threshold;
    double p = 0.0;
    for (double g : lv.g_values) p += (g <= b_next) ? 1.0 : 0.0;
    p /= static_cast<double>(lv.g_values.size());
    if (p <= 0.0) return kInf;
    if (p >= 1.0) continue;
    double gamma = 0.0;
    if (i > 0) {
      std::size_t n_w = run.levels[i - 1].seed_indices.size();
      gamma = detail::chain_gamma(lv.g_values, b_next, n_w);
    }
    delta2 += (1.0 - p) / (p * static_cast<double>(lv.g_values.size())) * (1.0 + gamma);
  }
  return std::sqrt(delta2);
}

}  // namespace isus
