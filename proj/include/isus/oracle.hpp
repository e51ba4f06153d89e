#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "isus/reweight.hpp"
#include "isus/sus.hpp"

namespace isus {

// Brute-force baselines used only to certify the re-weighting path.

struct OracleReport {
  std::string method;  // "repeated-sus" | "plain-mc"
  FailureDistribution distribution;
  std::size_t g_evaluations = 0;
  double wall_seconds = 0.0;
};

// One independent SuS per candidate, each sampling its own joint density.
// Per-candidate seeds derive from (master seed, candidate index).
inline OracleReport repeated_sus(const PerformanceFn& g,
                                 const std::vector<CandidateModel>& candidates,
                                 const SusConfig& cfg) {
  if (candidates.empty()) throw std::invalid_argument("repeated_sus: no candidates");
  auto t0 = std::chrono::steady_clock::now();
  OracleReport report;
  report.method = "repeated-sus";
  std::vector<double> pfs;
  pfs.reserve(candidates.size());
  for (std::size_t j = 0; j < candidates.size(); ++j) {
    JointDensity Qj = candidate_as_joint(candidates[j]);
    SusConfig cj = cfg;
    cj.seed = derive_seed(cfg.seed, "oracle-candidate", j);
    SusRun run = run_sus(g, Qj, cj);
    pfs.push_back(run.pf_baseline);
    report.g_evaluations += run.g_evaluations;
  }
  report.distribution = make_failure_distribution(std::move(pfs));
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    double x;
    if (i < a.size() && j < b.size())
      x = std::min(a[i], b[j]);
    else
      x = (i < a.size()) ? a[i] : b[j];
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    double fa = static_cast<double>(i) / static_cast<double>(a.size());
    double fb = static_cast<double>(j) / static_cast<double>(b.size());
    d = std::max(d, std::fabs(fa - fb));
  }
  return d;
}

struct EcdfComparison {
  double log10_median_diff = 0.0;       // log10(median a) - log10(median b)
  double ks_statistic = 0.0;
  double band_width_ratio = 0.0;        // (q95-q05)_a / (q95-q05)_b in log10
  double band_overlap = 0.0;            // overlap fraction of 5-95% log10 bands
};

inline EcdfComparison compare_ecdf(const FailureDistribution& a,
                                   const FailureDistribution& b) {
  if (a.values.empty() || b.values.empty())
    throw std::invalid_argument("compare_ecdf: empty distribution");
  EcdfComparison c;
  auto safe_log10 = [](double v) { return std::log10(std::max(v, 1e-300)); };
  c.log10_median_diff = safe_log10(a.median) - safe_log10(b.median);
  c.ks_statistic = ks_two_sample(a.values, b.values);
  double wa = safe_log10(a.q95) - safe_log10(a.q05);
  double wb = safe_log10(b.q95) - safe_log10(b.q05);
  c.band_width_ratio = wb != 0.0 ? wa / wb : kInf;
  double lo = std::max(safe_log10(a.q05), safe_log10(b.q05));
  double hi = std::min(safe_log10(a.q95), safe_log10(b.q95));
  double uni = std::max(safe_log10(a.q95), safe_log10(b.q95)) -
               std::min(safe_log10(a.q05), safe_log10(b.q05));
  c.band_overlap = uni > 0.0 ? std::max(hi - lo, 0.0) / uni : 1.0;
  return c;
}

}  // namespace isus
