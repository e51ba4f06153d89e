#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include "isus/distributions.hpp"
#include "isus/fitting.hpp"
#include "isus/rng.hpp"
#include "isus/special.hpp"

namespace isus {

inline double aic(double loglik, std::size_t k) {
  if (k < 1) throw std::invalid_argument("aic: k must be >= 1");
  return -2.0 * loglik + 2.0 * static_cast<double>(k);
}

inline double aicc(double loglik, std::size_t k, std::size_t n) {
  if (n <= k + 1) throw std::invalid_argument("aicc: need n > k + 1");
  double kk = static_cast<double>(k);
  return aic(loglik, k) + (2.0 * kk * kk + kk) / (static_cast<double>(n) - kk - 1.0);
}

// Akaike weights: pi_l = exp(-Delta_l/2) / sum, Delta_l = aicc_l - min(aicc).
inline std::vector<double> model_probabilities(const std::vector<double>& aicc_values) {
  if (aicc_values.empty()) throw std::invalid_argument("model_probabilities: empty input");
  double mn = kInf;
  for (double a : aicc_values) {
    if (!std::isfinite(a)) throw std::invalid_argument("model_probabilities: non-finite AICc");
    mn = std::min(mn, a);
  }
  std::vector<double> w(aicc_values.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = std::exp(-0.5 * (aicc_values[i] - mn));
    sum += w[i];
  }
  for (double& x : w) x /= sum;
  return w;
}

// Uniform box prior over the two parameters.
struct PriorSpec {
  std::array<double, 2> lo;
  std::array<double, 2> hi;

  bool contains(const std::array<double, 2>& t) const {
    return t[0] >= lo[0] && t[0] <= hi[0] && t[1] >= lo[1] && t[1] <= hi[1];
  }
};

// Box construction: [theta*/5, 5 theta*] for positive parameters, theta* +/-
// 5 asymptotic-MLE-std for location parameters.
inline PriorSpec default_prior(FamilyTag family, const std::array<double, 2>& theta_star,
                               const Dataset& data) {
  std::array<double, 2> asd = mle_asymptotic_std(family, theta_star, data);
  PriorSpec p{};
  auto positive_box = [&](int i) {
    double a = std::fabs(theta_star[i]);
    p.lo[i] = a / 5.0;
    p.hi[i] = a * 5.0;
  };
  auto location_box = [&](int i) {
    double w = 5.0 * std::max(asd[i], 1e-12);
    p.lo[i] = theta_star[i] - w;
    p.hi[i] = theta_star[i] + w;
  };
  switch (family) {
    case FamilyTag::Gamma:
    case FamilyTag::InverseGaussian:
      positive_box(0);
      positive_box(1);
      break;
    default:
      location_box(0);  // normal/logistic loc, lognormal mu_log, maxwell/levy loc
      positive_box(1);
      break;
  }
  return p;
}

// Unnormalized log posterior under a uniform box prior.
inline double log_posterior(const std::array<double, 2>& theta, const Dataset& data,
                            FamilyTag family, const PriorSpec& prior) {
  if (!prior.contains(theta)) return -kInf;
  if (!theta_valid(family, theta)) return -kInf;
  return log_likelihood({family, theta}, data.values);
}

struct StretchResult {
  std::vector<std::vector<double>> samples;  // post-burn-in, step-major order
  double acceptance_rate = 0.0;
};

using LogTargetFn = std::function<double(const std::vector<double>&)>;

// Affine-invariant ensemble sampler with stretch moves. The two half
// ensembles update sequentially; within a sweep each walker draws a partner
// from the complementary half, z ~ g(z) on [1/a, a] with g(z) ~ 1/sqrt(z),
// proposes Y = Xk + z (Xj - Xk) and accepts with probability
// min(1, z^{d-1} exp(logp(Y) - logp(Xj))).
inline StretchResult stretch_sampler(const LogTargetFn& log_target,
                                     std::vector<std::vector<double>> walkers,
                                     std::size_t steps, double a, Rng& rng,
                                     std::size_t burn_in = 0) {
  const std::size_t n_w = walkers.size();
  if (n_w < 2) throw std::invalid_argument("stretch_sampler: need at least 2 walkers");
  const std::size_t d = walkers[0].size();
  if (n_w < 2 * d) throw std::invalid_argument("stretch_sampler: need >= 2*d walkers");
  if (!(a > 1.0)) throw std::invalid_argument("stretch_sampler: stretch scale must exceed 1");

  bool all_same = true;
  for (std::size_t i = 1; i < n_w && all_same; ++i) all_same = walkers[i] == walkers[0];
  if (all_same) throw std::runtime_error("stretch_sampler: degenerate ensemble");

  std::vector<double> logp(n_w);
  for (std::size_t i = 0; i < n_w; ++i) {
    logp[i] = log_target(walkers[i]);
    if (!std::isfinite(logp[i]))
      throw std::invalid_argument("stretch_sampler: walker with non-finite log target");
  }

  const std::size_t half = n_w / 2;
  std::size_t accepted = 0, proposed = 0;
  StretchResult out;
  out.samples.reserve((steps > burn_in ? steps - burn_in : 0) * n_w);

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
        double z = (1.0 + (a - 1.0) * u);
        z = z * z / a;
        for (std::size_t t = 0; t < d; ++t)
          y[t] = walkers[k][t] + z * (walkers[j][t] - walkers[k][t]);
        double lp_y = log_target(y);
        ++proposed;
        double log_acc = (static_cast<double>(d) - 1.0) * std::log(z) + lp_y - logp[j];
        if (log_acc >= 0.0 || std::log(rng.uniform() + 1e-300) < log_acc) {
          walkers[j] = y;
          logp[j] = lp_y;
          ++accepted;
        }
      }
    }
    if (step >= burn_in)
      for (std::size_t j = 0; j < n_w; ++j) out.samples.push_back(walkers[j]);
  }
  out.acceptance_rate = proposed ? static_cast<double>(accepted) / proposed : 0.0;
  return out;
}

struct FittedModel {
  FamilyTag family;
  std::array<double, 2> theta_star;
  double loglik;
  double aicc;
  double delta;  // relative information loss
  double prob;   // pi_l
};

struct PosteriorCloud {
  FamilyTag family;
  std::vector<std::array<double, 2>> samples;
  double acceptance_rate = 0.0;
  std::size_t burn_in = 0;
};

struct ModelPool {
  std::string variable;
  std::vector<FittedModel> fitted;
  std::map<FamilyTag, PosteriorCloud> clouds;
  std::size_t n = 0;  // dataset size
};

// One concrete joint model: a spec per input random variable.
struct CandidateModel {
  std::vector<DistributionSpec> specs;
};

struct InferenceConfig {
  std::size_t n_theta = 10000;          // posterior draws retained per family
  std::size_t thin = 2;                 // keep every thin-th post-burn-in state
  double stretch_a = 2.0;               // stretch scale
  double prob_floor = 1e-3;             // drop families below this pi_l
  std::vector<FamilyTag> families{kAllFamilies.begin(), kAllFamilies.end()};
};

// Posterior sampling for one family: walkers start from 1% relative jitter
// around the MLE, clipped to the prior box; burn-in is half the chain.
inline PosteriorCloud posterior_cloud(FamilyTag family, const Dataset& data,
                                      const PriorSpec& prior, std::size_t n_theta, Rng& rng,
                                      double stretch_a = 2.0, std::size_t thin = 2) {
  if (n_theta == 0) throw std::invalid_argument("posterior_cloud: n_theta must be positive");
  auto fit = fit_mle(family, data);
  if (!fit) throw std::runtime_error("posterior_cloud: family not fit-feasible");

  const std::size_t d = 2;
  const std::size_t n_w = 2 * std::max<std::size_t>(4, 2 * d);
  LogTargetFn target = [&](const std::vector<double>& t) {
    return log_posterior({t[0], t[1]}, data, family, prior);
  };

  std::vector<std::vector<double>> walkers(n_w, std::vector<double>(d));
  for (std::size_t i = 0; i < n_w; ++i) {
    for (;;) {
      for (std::size_t j = 0; j < d; ++j) {
        double scale = 0.01 * std::max(std::fabs(fit->theta[j]), 1e-8);
        double v = fit->theta[j] + scale * detail::sample_standard_normal(rng);
        v = std::clamp(v, prior.lo[j], prior.hi[j]);
        walkers[i][j] = v;
      }
      if (std::isfinite(target(walkers[i]))) break;
    }
  }

  // steps/2 burn-in; enough retained states for n_theta after thinning.
  std::size_t keep_steps = (n_theta * thin + n_w - 1) / n_w;
  std::size_t steps = 2 * std::max<std::size_t>(keep_steps, 50);
  StretchResult res = stretch_sampler(target, std::move(walkers), steps, stretch_a, rng,
                                      steps / 2);

  PosteriorCloud cloud;
  cloud.family = family;
  cloud.acceptance_rate = res.acceptance_rate;
  cloud.burn_in = steps / 2;
  cloud.samples.reserve(n_theta);
  for (std::size_t i = 0; i < res.samples.size() && cloud.samples.size() < n_theta;
       i += thin)
    cloud.samples.push_back({res.samples[i][0], res.samples[i][1]});
  return cloud;
}

// Full multimodel inference for one variable: MLE fits, AICc probabilities,
// and posterior clouds for every family kept above the probability floor.
inline ModelPool build_model_pool(const Dataset& data, const InferenceConfig& cfg,
                                  std::uint64_t master_seed, std::size_t variable_index) {
  ModelPool pool;
  pool.variable = data.name;
  pool.n = data.size();

  std::vector<double> aiccs;
  for (FamilyTag f : cfg.families) {
    if (data.size() <= param_count(f) + 1) continue;  // AICc domain
    auto fit = fit_mle(f, data);
    if (!fit) continue;
    FittedModel m{};
    m.family = f;
    m.theta_star = fit->theta;
    m.loglik = fit->loglik;
    m.aicc = aicc(fit->loglik, param_count(f), data.size());
    pool.fitted.push_back(m);
    aiccs.push_back(m.aicc);
  }
  if (pool.fitted.empty()) throw std::runtime_error("build_model_pool: no feasible family");

  std::vector<double> probs = model_probabilities(aiccs);
  double mn = *std::min_element(aiccs.begin(), aiccs.end());
  for (std::size_t i = 0; i < pool.fitted.size(); ++i) {
    pool.fitted[i].delta = aiccs[i] - mn;
    pool.fitted[i].prob = probs[i];
  }

  for (std::size_t i = 0; i < pool.fitted.size(); ++i) {
    const FittedModel& m = pool.fitted[i];
    if (m.prob < cfg.prob_floor) continue;
    PriorSpec prior = default_prior(m.family, m.theta_star, data);
    Rng rng(master_seed, "posterior", variable_index, static_cast<std::size_t>(m.family));
    pool.clouds[m.family] = posterior_cloud(m.family, data, prior, cfg.n_theta, rng,
                                            cfg.stretch_a, cfg.thin);
  }
  return pool;
}

// Monte Carlo draw of n_c equally weighted candidate models: per variable,
// pick a family proportional to pi_l among families with clouds, then a
// uniformly random posterior member of that family's cloud.
inline std::vector<CandidateModel> draw_candidates(const std::vector<ModelPool>& pools,
                                                   std::size_t n_c, Rng& rng) {
  std::vector<CandidateModel> out;
  out.reserve(n_c);
  // Per-variable renormalized weights over families that kept a cloud.
  std::vector<std::vector<std::pair<FamilyTag, double>>> weights(pools.size());
  for (std::size_t v = 0; v < pools.size(); ++v) {
    double sum = 0.0;
    for (const FittedModel& m : pools[v].fitted) {
      if (pools[v].clouds.count(m.family)) {
        weights[v].push_back({m.family, m.prob});
        sum += m.prob;
      }
    }
    if (weights[v].empty())
      throw std::runtime_error("draw_candidates: pool has no posterior clouds");
    for (auto& w : weights[v]) w.second /= sum;
  }

  for (std::size_t c = 0; c < n_c; ++c) {
    CandidateModel cand;
    cand.specs.reserve(pools.size());
    for (std::size_t v = 0; v < pools.size(); ++v) {
      double u = rng.uniform();
      double acc = 0.0;
      FamilyTag chosen = weights[v].back().first;
      for (const auto& [fam, w] : weights[v]) {
        acc += w;
        if (u < acc) {
          chosen = fam;
          break;
        }
      }
      const PosteriorCloud& cloud = pools[v].clouds.at(chosen);
      if (cloud.samples.empty()) throw std::runtime_error("draw_candidates: empty cloud");
      const auto& theta = cloud.samples[rng.below(cloud.samples.size())];
      cand.specs.push_back({chosen, theta});
    }
    out.push_back(std::move(cand));
  }
  return out;
}

}  // namespace isus
