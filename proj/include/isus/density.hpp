#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "isus/distributions.hpp"
#include "isus/inference.hpp"
#include "isus/special.hpp"

namespace isus {

// Optimal per-variable sampling density: a pi-weighted, posterior-averaged
// mixture over the retained families.
struct MixtureDensity {
  std::vector<std::pair<DistributionSpec, double>> components;
  std::string variable;
};

struct JointDensity {
  std::vector<MixtureDensity> marginals;

  std::size_t dim() const { return marginals.size(); }
};

// The posterior expectation is approximated by an equal-weight average over
// n_mix cloud subsamples per family, so component weights are pi_l / n_mix.
inline MixtureDensity optimal_marginal(const ModelPool& pool, std::size_t n_mix, Rng& rng) {
  if (pool.clouds.empty()) throw std::invalid_argument("optimal_marginal: empty pool");
  double kept_prob = 0.0;
  for (const FittedModel& m : pool.fitted)
    if (pool.clouds.count(m.family)) kept_prob += m.prob;

  MixtureDensity q;
  q.variable = pool.variable;
  for (const FittedModel& m : pool.fitted) {
    auto it = pool.clouds.find(m.family);
    if (it == pool.clouds.end()) continue;
    const PosteriorCloud& cloud = it->second;
    double w = (m.prob / kept_prob) / static_cast<double>(n_mix);
    for (std::size_t i = 0; i < n_mix; ++i) {
      const auto& theta = cloud.samples[rng.below(cloud.samples.size())];
      q.components.push_back({{m.family, theta}, w});
    }
  }
  return q;
}

// ln sum_c w_c pdf_c(x) with a max-shift reduction in fixed component order.
inline double mixture_log_pdf(const MixtureDensity& q, double x) {
  double mx = -kInf;
  thread_local std::vector<double> terms;
  terms.clear();
  for (const auto& [spec, w] : q.components) {
    double t = std::log(w) + log_pdf(spec, x);
    terms.push_back(t);
    if (t > mx) mx = t;
  }
  if (mx == -kInf) return -kInf;
  double s = 0.0;
  for (double t : terms) s += std::exp(t - mx);
  return mx + std::log(s);
}

inline double joint_log_pdf(const JointDensity& Q, const std::vector<double>& x) {
  if (x.size() != Q.dim()) throw std::invalid_argument("joint_log_pdf: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s += mixture_log_pdf(Q.marginals[i], x[i]);
    if (s == -kInf) return -kInf;
  }
  return s;
}

// Joint log-pdf of a single candidate model (independent marginals).
inline double candidate_log_pdf(const CandidateModel& cand, const std::vector<double>& x) {
  if (x.size() != cand.specs.size())
    throw std::invalid_argument("candidate_log_pdf: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s += log_pdf(cand.specs[i], x[i]);
    if (s == -kInf) return -kInf;
  }
  return s;
}

inline double mixture_sample_one(const MixtureDensity& q, Rng& rng) {
  double u = rng.uniform();
  double acc = 0.0;
  for (const auto& [spec, w] : q.components) {
    acc += w;
    if (u < acc) return sample_one(spec, rng);
  }
  return sample_one(q.components.back().first, rng);
}

inline std::vector<std::vector<double>> joint_sample(const JointDensity& Q, std::size_t n,
                                                     Rng& rng) {
  std::vector<std::vector<double>> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> x(Q.dim());
    for (std::size_t j = 0; j < Q.dim(); ++j) x[j] = mixture_sample_one(Q.marginals[j], rng);
    out.push_back(std::move(x));
  }
  return out;
}

// Wraps a single candidate model as a joint density of one-component
// mixtures, so the SuS engine can sample any candidate directly.
inline JointDensity candidate_as_joint(const CandidateModel& cand) {
  JointDensity Q;
  for (const DistributionSpec& s : cand.specs) {
    MixtureDensity m;
    m.components.push_back({s, 1.0});
    Q.marginals.push_back(std::move(m));
  }
  return Q;
}

}  // namespace isus
