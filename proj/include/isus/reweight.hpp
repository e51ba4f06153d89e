#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

#include "isus/density.hpp"
#include "isus/sus.hpp"

namespace isus {

enum class WeightMode {
  Raw,             // P_ij = (1/N_i) sum w I
  SelfNormalized,  // P_ij = sum w I / sum w
};

// Log-density floor for the IS denominator: below this the sample gets
// weight 0 and a diagnostic count, never an Inf weight.
inline constexpr double kLogDensityFloor = -690.775527898;  // ln 1e-300

struct WeightedLevel {
  std::size_t level_index = 0;
  std::vector<double> weights;
  std::size_t n = 0;
  double p_ij = 0.0;
  std::size_t floored_count = 0;
  double ess = 0.0;
  bool degenerate = false;  // all weights zero
};

struct CandidateResult {
  double pf = 0.0;
  std::vector<WeightedLevel> levels;
  double min_ess = 0.0;
  bool ess_flagged = false;   // min-level ESS < 10
  bool clipped = false;       // raw product exceeded 1
  std::size_t floored_count = 0;
};

// Right-continuous empirical CDF over a value set.
struct Ecdf {
  std::vector<double> sorted;

  explicit Ecdf(std::vector<double> values) : sorted(std::move(values)) {
    if (sorted.empty()) throw std::invalid_argument("Ecdf: empty input");
    std::sort(sorted.begin(), sorted.end());
  }

  double operator()(double t) const {
    auto it = std::upper_bound(sorted.begin(), sorted.end(), t);
    return static_cast<double>(it - sorted.begin()) / static_cast<double>(sorted.size());
  }

  double quantile(double q) const {
    q = std::clamp(q, 0.0, 1.0);
    std::size_t idx = static_cast<std::size_t>(
        std::ceil(q * static_cast<double>(sorted.size())));
    if (idx > 0) --idx;
    return sorted[idx];
  }
};

struct FailureDistribution {
  std::vector<double> values;  // P_Fj in candidate order
  std::vector<double> sorted;
  double median = 0.0;
  double q05 = 0.0;
  double q95 = 0.0;
  std::size_t zero_count = 0;
  std::size_t flagged_unreliable = 0;  // candidates with min-level ESS < 10
  std::size_t floored_total = 0;

  Ecdf ecdf() const { return Ecdf(values); }
};

inline FailureDistribution make_failure_distribution(std::vector<double> values) {
  FailureDistribution fd;
  fd.values = std::move(values);
  fd.sorted = fd.values;
  std::sort(fd.sorted.begin(), fd.sorted.end());
  Ecdf e(fd.sorted);
  fd.median = e.quantile(0.5);
  fd.q05 = e.quantile(0.05);
  fd.q95 = e.quantile(0.95);
  fd.zero_count = static_cast<std::size_t>(
      std::count(fd.values.begin(), fd.values.end(), 0.0));
  return fd;
}

// Candidate densities are any callable giving the joint log-pdf, so the
// sampling mixture itself can be passed through the identical code path.
using JointLogPdfFn = std::function<double(const std::vector<double>&)>;

inline JointLogPdfFn as_log_pdf(const CandidateModel& cand) {
  return [&cand](const std::vector<double>& x) { return candidate_log_pdf(cand, x); };
}

inline JointLogPdfFn as_log_pdf(const JointDensity& Q) {
  return [&Q](const std::vector<double>& x) { return joint_log_pdf(Q, x); };
}

// w = p_j(x) / q_n*(x), computed in log space. Returns 0 for points outside
// the candidate support and 0 (with *floored incremented) when the sampling
// density underflows the floor.
inline double importance_weight(const std::vector<double>& x, const JointLogPdfFn& cand_lp,
                                const JointDensity& Q, std::size_t* floored = nullptr) {
  double lq = joint_log_pdf(Q, x);
  if (lq < kLogDensityFloor) {
    if (floored) ++(*floored);
    return 0.0;
  }
  double lp = cand_lp(x);
  if (lp == -kInf) return 0.0;
  return std::exp(lp - lq);
}

// Per-level log q(x) of every stored baseline sample. The sampling density
// is candidate-independent, so precomputing this once makes re-weighting a
// whole candidate set linear in the candidate densities only.
inline std::vector<std::vector<double>> baseline_log_density(const SusRun& run) {
  std::vector<std::vector<double>> logq(run.levels.size());
  for (std::size_t i = 0; i < run.levels.size(); ++i) {
    logq[i].reserve(run.levels[i].samples.size());
    for (const auto& x : run.levels[i].samples)
      logq[i].push_back(joint_log_pdf(run.density, x));
  }
  return logq;
}

inline WeightedLevel conditional_probability(const Level& level, const JointLogPdfFn& cand_lp,
                                             const std::vector<double>& logq, double b_next,
                                             WeightMode mode = WeightMode::Raw) {
  WeightedLevel wl;
  wl.level_index = level.index;
  wl.n = level.g_values.size();
  wl.weights.reserve(wl.n);
  double sum_wi = 0.0, sum_w = 0.0, sum_w2 = 0.0;
  for (std::size_t k = 0; k < wl.n; ++k) {
    double w = 0.0;
    if (logq[k] < kLogDensityFloor) {
      ++wl.floored_count;
    } else {
      double lp = cand_lp(level.samples[k]);
      if (lp != -kInf) w = std::exp(lp - logq[k]);
    }
    wl.weights.push_back(w);
    sum_w += w;
    sum_w2 += w * w;
    if (level.g_values[k] <= b_next) sum_wi += w;
  }
  if (sum_w == 0.0) {
    wl.degenerate = true;
    wl.p_ij = 0.0;
    wl.ess = 0.0;
    return wl;
  }
  wl.ess = sum_w * sum_w / sum_w2;
  wl.p_ij = (mode == WeightMode::Raw) ? sum_wi / static_cast<double>(wl.n) : sum_wi / sum_w;
  return wl;
}

inline CandidateResult failure_probability(const SusRun& run, const JointLogPdfFn& cand_lp,
                                           const std::vector<std::vector<double>>& logq,
                                           WeightMode mode = WeightMode::Raw) {
  CandidateResult res;
  res.min_ess = kInf;
  double product = 1.0;
  for (std::size_t i = 0; i < run.levels.size(); ++i) {
    const bool final_level = (i + 1 == run.levels.size());
    double b_next = final_level ? 0.0 : run.levels[i].threshold;
    WeightedLevel wl =
        conditional_probability(run.levels[i], cand_lp, logq[i], b_next, mode);
    product *= wl.p_ij;
    res.min_ess = std::min(res.min_ess, wl.ess);
    res.floored_count += wl.floored_count;
    res.levels.push_back(std::move(wl));
    if (product == 0.0) break;
  }
  if (product > 1.0) {
    product = 1.0;
    res.clipped = true;
  }
  res.pf = product;
  res.ess_flagged = res.min_ess < 10.0;
  return res;
}

inline CandidateResult failure_probability(const SusRun& run, const JointLogPdfFn& cand_lp,
                                           WeightMode mode = WeightMode::Raw) {
  return failure_probability(run, cand_lp, baseline_log_density(run), mode);
}

inline CandidateResult failure_probability(const SusRun& run, const CandidateModel& cand,
                                           WeightMode mode = WeightMode::Raw) {
  return failure_probability(run, as_log_pdf(cand), mode);
}

// Re-weights the baseline run for every candidate. Results land in candidate
// index order regardless of worker count.
inline FailureDistribution reweight_all(const SusRun& run,
                                        const std::vector<CandidateModel>& candidates,
                                        WeightMode mode = WeightMode::Raw,
                                        std::size_t workers = 1) {
  if (candidates.empty()) throw std::invalid_argument("reweight_all: no candidates");
  std::vector<double> pf(candidates.size());
  std::vector<unsigned char> flagged(candidates.size(), 0);
  std::vector<std::size_t> floored(candidates.size(), 0);
  const std::vector<std::vector<double>> logq = baseline_log_density(run);

  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      CandidateResult r = failure_probability(run, as_log_pdf(candidates[j]), logq, mode);
      pf[j] = r.pf;
      flagged[j] = r.ess_flagged ? 1 : 0;
      floored[j] = r.floored_count;
    }
  };

  workers = std::max<std::size_t>(workers, 1);
  if (workers == 1 || candidates.size() < 2 * workers) {
    work(0, candidates.size());
  } else {
    std::vector<std::thread> pool;
    std::size_t chunk = (candidates.size() + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      std::size_t b = w * chunk;
      std::size_t e = std::min(b + chunk, candidates.size());
      if (b < e) pool.emplace_back(work, b, e);
    }
    for (auto& t : pool) t.join();
  }

  FailureDistribution fd = make_failure_distribution(std::move(pf));
  for (std::size_t j = 0; j < candidates.size(); ++j) {
    fd.flagged_unreliable += flagged[j];
    fd.floored_total += floored[j];
  }
  return fd;
}

}  // namespace isus
