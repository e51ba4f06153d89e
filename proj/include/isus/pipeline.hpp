#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "isus/benchmarks.hpp"
#include "isus/density.hpp"
#include "isus/inference.hpp"
#include "isus/oracle.hpp"
#include "isus/reweight.hpp"
#include "isus/sus.hpp"

namespace isus {

// Resolved run configuration; embedded verbatim in every output document.
struct RunConfig {
  std::vector<std::pair<std::string, std::string>> datasets;  // (variable, path)
  std::vector<FamilyTag> families{kAllFamilies.begin(), kAllFamilies.end()};
  std::size_t n_theta = 10000;
  std::size_t n_c = 1000;
  std::size_t n_mix = 500;
  std::size_t samples_per_level = 1000;
  double p0 = 0.1;
  std::size_t max_levels = 20;
  double stretch_a = 2.0;
  std::string benchmark;
  std::string model_cmd;
  std::size_t model_batch = 1000;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  WeightMode weight_mode = WeightMode::Raw;
  std::size_t workers = 1;
  std::size_t oracle_cap = 100;

  SusConfig sus() const {
    SusConfig c;
    c.samples_per_level = samples_per_level;
    c.p0 = p0;
    c.max_levels = max_levels;
    c.stretch_a = stretch_a;
    c.seed = derive_seed(seed, "sus-baseline");
    return c;
  }

  InferenceConfig inference() const {
    InferenceConfig c;
    c.n_theta = n_theta;
    c.stretch_a = stretch_a;
    c.families = families;
    return c;
  }
};

// Step 1: multimodel inference per variable.
inline std::vector<ModelPool> fit_pools(const std::vector<Dataset>& datasets,
                                        const RunConfig& cfg) {
  std::vector<ModelPool> pools;
  pools.reserve(datasets.size());
  for (std::size_t v = 0; v < datasets.size(); ++v)
    pools.push_back(build_model_pool(datasets[v], cfg.inference(), cfg.seed, v));
  return pools;
}

// Step 2: optimal joint sampling density from the pools.
inline JointDensity optimal_joint_density(const std::vector<ModelPool>& pools,
                                          std::size_t n_mix, std::uint64_t master_seed) {
  JointDensity Q;
  for (std::size_t v = 0; v < pools.size(); ++v) {
    Rng rng(master_seed, "mixture", v);
    Q.marginals.push_back(optimal_marginal(pools[v], n_mix, rng));
  }
  return Q;
}

struct IsusResult {
  SusRun run;
  std::vector<CandidateModel> candidates;
  FailureDistribution distribution;
  double pf_identity = 0.0;  // re-weighting with the mixture itself
};

// Steps 2-4 given fitted pools: build the density, run one SuS, draw the
// candidate set and re-weight.
inline IsusResult run_isus(const PerformanceFn& g, const std::vector<ModelPool>& pools,
                           const RunConfig& cfg) {
  IsusResult res;
  JointDensity Q = optimal_joint_density(pools, cfg.n_mix, cfg.seed);
  res.run = run_sus(g, Q, cfg.sus());
  Rng cand_rng(cfg.seed, "candidates");
  res.candidates = draw_candidates(pools, cfg.n_c, cand_rng);
  res.distribution = reweight_all(res.run, res.candidates, cfg.weight_mode, cfg.workers);
  res.pf_identity = failure_probability(res.run, as_log_pdf(res.run.density)).pf;
  return res;
}

}  // namespace isus
