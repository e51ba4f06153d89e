// Command-line front end: multimodel fitting, imprecise subset simulation,
// brute-force oracle runs, Monte Carlo benchmark checks and plot exports.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "isus/io.hpp"
#include "isus/pipeline.hpp"
#include "isus/subprocess_model.hpp"

namespace fs = std::filesystem;
using isus::json;

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitDataError = 3;
constexpr int kExitNotConverged = 4;

struct CommonOpts {
  std::vector<std::string> data;  // var=path
  std::vector<std::string> families;
  std::string pools_dir;
  std::string out_dir = "isus-out";
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--data", o.data, "Dataset as var=path (repeatable, ordered)");
  cmd->add_option("--families", o.families, "Family whitelist (default: all seven)");
  cmd->add_option("--pools", o.pools_dir, "Directory with previously fitted pool files");
  cmd->add_option("--out", o.out_dir, "Output directory");
  cmd->add_option("--seed", o.seed, "Master seed (mandatory, no implicit entropy)")
      ->required();
}

std::vector<std::pair<std::string, std::string>> parse_data(const std::vector<std::string>& kv) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const std::string& s : kv) {
    auto eq = s.find('=');
    if (eq == std::string::npos)
      throw CLI::ValidationError("--data", "expected var=path, got " + s);
    out.push_back({s.substr(0, eq), s.substr(eq + 1)});
  }
  return out;
}

json config_json(const isus::RunConfig& cfg) {
  json d = json::array();
  for (const auto& [var, path] : cfg.datasets) d.push_back({{"variable", var}, {"path", path}});
  json fams = json::array();
  for (isus::FamilyTag f : cfg.families) fams.push_back(isus::family_name(f));
  return {{"datasets", d},
          {"families", fams},
          {"n_theta", cfg.n_theta},
          {"n_c", cfg.n_c},
          {"n_mix", cfg.n_mix},
          {"samples_per_level", cfg.samples_per_level},
          {"p0", cfg.p0},
          {"max_levels", cfg.max_levels},
          {"stretch_a", cfg.stretch_a},
          {"benchmark", cfg.benchmark},
          {"model_cmd", cfg.model_cmd},
          {"model_batch", cfg.model_batch},
          {"weight_mode", cfg.weight_mode == isus::WeightMode::Raw ? "raw" : "self-normalized"},
          {"workers", cfg.workers},
          {"seed", cfg.seed}};
}

std::vector<isus::Dataset> load_datasets(const isus::RunConfig& cfg) {
  std::vector<isus::Dataset> out;
  for (const auto& [var, path] : cfg.datasets) out.push_back(isus::read_dataset(path, var));
  return out;
}

std::vector<isus::ModelPool> load_pools(const std::string& dir,
                                        const std::vector<std::string>& order) {
  std::vector<isus::ModelPool> pools;
  if (!order.empty()) {
    for (const std::string& var : order)
      pools.push_back(isus::pool_from_json(isus::read_json_file(dir + "/pool_" + var + ".json")));
    return pools;
  }
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    std::string name = e.path().filename().string();
    if (name.rfind("pool_", 0) == 0 && e.path().extension() == ".json")
      files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) pools.push_back(isus::pool_from_json(isus::read_json_file(f.string())));
  if (pools.empty()) throw isus::DataError("no pool_*.json files in " + dir);
  return pools;
}

void print_probability_table(const std::vector<isus::ModelPool>& pools) {
  for (const isus::ModelPool& pool : pools) {
    std::printf("variable %s (n = %zu)\n", pool.variable.c_str(), pool.n);
    std::printf("  %-18s %12s %10s %10s\n", "family", "AICc", "delta", "prob");
    for (const isus::FittedModel& m : pool.fitted)
      std::printf("  %-18s %12.4f %10.4f %10.6f\n", std::string(isus::family_name(m.family)).c_str(),
                  m.aicc, m.delta, m.prob);
  }
}

isus::PerformanceFn resolve_model(const isus::RunConfig& cfg,
                                  std::shared_ptr<isus::SubprocessModel>& keepalive) {
  if (!cfg.benchmark.empty()) return isus::make_benchmark(cfg.benchmark).g;
  if (!cfg.model_cmd.empty()) {
    keepalive = std::make_shared<isus::SubprocessModel>(cfg.model_cmd, cfg.model_batch);
    return keepalive->as_performance_fn();
  }
  throw CLI::ValidationError("model", "need --benchmark or --model-cmd");
}

void apply_families(isus::RunConfig& cfg, const std::vector<std::string>& fams) {
  if (fams.empty()) return;
  cfg.families.clear();
  for (const std::string& f : fams) cfg.families.push_back(isus::family_from_name(f));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Imprecise subset simulation: failure-probability uncertainty from small data"};
  app.require_subcommand(1);
  app.set_config("--config");

  CommonOpts common;
  isus::RunConfig cfg;
  std::string weight_mode = "raw";
  std::string benchmark, model_cmd;
  bool oracle_force = false;
  std::string against, export_from, export_out;
  std::string bench_name;
  std::size_t bench_n = 0;

  auto* fit = app.add_subcommand("fit", "Multimodel inference: fit families, AICc "
                                        "probabilities and posterior clouds per variable");
  add_common(fit, common);
  fit->add_option("--n-theta", cfg.n_theta, "Posterior draws per retained family");

  auto* isus_cmd = app.add_subcommand(
      "isus", "Full pipeline: optimal density, one SuS, candidate re-weighting");
  add_common(isus_cmd, common);
  isus_cmd->add_option("--benchmark", benchmark, "Registered performance function");
  isus_cmd->add_option("--model-cmd", model_cmd, "External model command (line protocol)");
  isus_cmd->add_option("--model-batch", cfg.model_batch, "Points per external-model batch");
  isus_cmd->add_option("--n-theta", cfg.n_theta, "Posterior draws per retained family");
  isus_cmd->add_option("--n-c", cfg.n_c, "Number of candidate models");
  isus_cmd->add_option("--n-mix", cfg.n_mix, "Posterior subsamples per mixture family");
  isus_cmd->add_option("-N,--samples-per-level", cfg.samples_per_level, "SuS samples per level");
  isus_cmd->add_option("--p0", cfg.p0, "SuS conditional probability target");
  isus_cmd->add_option("--max-levels", cfg.max_levels, "SuS level cap");
  isus_cmd->add_option("--stretch-a", cfg.stretch_a, "Stretch-move scale");
  isus_cmd->add_option("--weight-mode", weight_mode, "raw | self-normalized")
      ->check(CLI::IsMember({"raw", "self-normalized"}));
  isus_cmd->add_option("--workers", cfg.workers, "Re-weighting worker threads");

  auto* sus_cmd = app.add_subcommand("sus", "Baseline SuS only (truth or optimal density)");
  add_common(sus_cmd, common);
  sus_cmd->add_option("--benchmark", benchmark, "Registered performance function")->required();
  bool use_truth = false;
  sus_cmd->add_flag("--truth", use_truth, "Sample the benchmark's true distributions");
  sus_cmd->add_option("-N,--samples-per-level", cfg.samples_per_level, "SuS samples per level");
  sus_cmd->add_option("--p0", cfg.p0, "SuS conditional probability target");
  sus_cmd->add_option("--max-levels", cfg.max_levels, "SuS level cap");
  sus_cmd->add_option("--n-mix", cfg.n_mix, "Posterior subsamples per mixture family");

  auto* oracle_cmd = app.add_subcommand(
      "oracle", "Brute force: one SuS per candidate model (validation only)");
  add_common(oracle_cmd, common);
  oracle_cmd->add_option("--benchmark", benchmark, "Registered performance function");
  oracle_cmd->add_option("--model-cmd", model_cmd, "External model command");
  oracle_cmd->add_option("--n-c", cfg.n_c, "Candidate count");
  oracle_cmd->add_option("--cap", cfg.oracle_cap, "Candidate cap (0 refuses immediately)");
  oracle_cmd->add_flag("--force", oracle_force, "Override the candidate cap");
  oracle_cmd->add_option("--against", against, "isus summary.json to compare against");
  oracle_cmd->add_option("-N,--samples-per-level", cfg.samples_per_level, "SuS samples per level");
  oracle_cmd->add_option("--p0", cfg.p0, "SuS conditional probability target");

  auto* bench_cmd = app.add_subcommand("bench", "Plain Monte Carlo on a registered benchmark");
  bench_cmd->add_option("name", bench_name, "Benchmark name")->required();
  bench_cmd->add_option("n", bench_n, "Sample count")->required();
  bench_cmd->add_option("--seed", common.seed, "Master seed")->required();

  auto* export_cmd = app.add_subcommand("export-plot", "Plot-ready ECDF table from a summary");
  export_cmd->add_option("--from", export_from, "summary.json of a previous run")->required();
  export_cmd->add_option("--out", export_out, "Output CSV path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    cfg.datasets = parse_data(common.data);
    apply_families(cfg, common.families);
    cfg.seed = common.seed;
    cfg.benchmark = benchmark;
    cfg.model_cmd = model_cmd;
    cfg.out_dir = common.out_dir;
    cfg.weight_mode =
        weight_mode == "raw" ? isus::WeightMode::Raw : isus::WeightMode::SelfNormalized;

    if (app.got_subcommand(bench_cmd)) {
      isus::Benchmark b = isus::make_benchmark(bench_name);
      isus::Rng rng(common.seed, "bench", bench_name.size());
      isus::McResult r = isus::mc_oracle(b.g, b.truth, bench_n, rng);
      std::printf("%s: pf = %.6e (c.o.v. %s, n = %zu)\n", bench_name.c_str(), r.pf,
                  std::isfinite(r.cov) ? std::to_string(r.cov).c_str() : "undefined", r.n);
      return 0;
    }

    if (app.got_subcommand(export_cmd)) {
      json j = isus::read_json_file(export_from);
      isus::FailureDistribution fd =
          isus::failure_distribution_from_json(j.at("failure_distribution"));
      isus::write_ecdf_csv(fd, export_out);
      return 0;
    }

    fs::create_directories(cfg.out_dir);

    if (app.got_subcommand(fit)) {
      std::vector<isus::Dataset> data = load_datasets(cfg);
      std::vector<isus::ModelPool> pools = isus::fit_pools(data, cfg);
      print_probability_table(pools);
      for (const isus::ModelPool& p : pools) {
        json doc = isus::to_json(p);
        doc["config"] = config_json(cfg);
        isus::write_json_file(doc, cfg.out_dir + "/pool_" + p.variable + ".json");
      }
      return 0;
    }

    if (app.got_subcommand(sus_cmd)) {
      isus::Benchmark b = isus::make_benchmark(cfg.benchmark);
      isus::JointDensity Q;
      if (use_truth) {
        Q = isus::candidate_as_joint(b.truth);
      } else {
        std::vector<isus::ModelPool> pools =
            common.pools_dir.empty() ? isus::fit_pools(load_datasets(cfg), cfg)
                                     : load_pools(common.pools_dir, {});
        Q = isus::optimal_joint_density(pools, cfg.n_mix, cfg.seed);
      }
      isus::SusRun run = isus::run_sus(b.g, Q, cfg.sus());
      json doc = isus::to_json(run);
      doc["config"] = config_json(cfg);
      isus::write_json_file(doc, cfg.out_dir + "/susrun.json");
      std::printf("pf_baseline = %.6e  cov = %.4f  levels = %zu  g_evals = %zu%s\n",
                  run.pf_baseline, run.cov_baseline, run.levels.size(), run.g_evaluations,
                  run.converged ? "" : "  [NOT CONVERGED]");
      return run.converged ? 0 : kExitNotConverged;
    }

    if (app.got_subcommand(isus_cmd)) {
      std::shared_ptr<isus::SubprocessModel> keepalive;
      isus::PerformanceFn g = resolve_model(cfg, keepalive);
      std::vector<isus::ModelPool> pools =
          common.pools_dir.empty() ? isus::fit_pools(load_datasets(cfg), cfg)
                                   : load_pools(common.pools_dir, {});
      isus::IsusResult res = isus::run_isus(g, pools, cfg);

      json run_doc = isus::to_json(res.run);
      run_doc["config"] = config_json(cfg);
      isus::write_json_file(run_doc, cfg.out_dir + "/susrun.json");
      isus::write_ecdf_csv(res.distribution, cfg.out_dir + "/ecdf.csv");
      json summary = {{"format_version", isus::kFormatVersion},
                      {"config", config_json(cfg)},
                      {"pf_baseline", res.run.pf_baseline},
                      {"cov_baseline", res.run.cov_baseline},
                      {"pf_identity", res.pf_identity},
                      {"g_evaluations", res.run.g_evaluations},
                      {"converged", res.run.converged},
                      {"failure_distribution", isus::to_json(res.distribution)}};
      isus::write_json_file(summary, cfg.out_dir + "/summary.json");
      std::printf("pf_baseline = %.6e  median P_F = %.6e  90%% band = [%.6e, %.6e]\n",
                  res.run.pf_baseline, res.distribution.median, res.distribution.q05,
                  res.distribution.q95);
      return res.run.converged ? 0 : kExitNotConverged;
    }

    if (app.got_subcommand(oracle_cmd)) {
      if (cfg.oracle_cap == 0) {
        std::fprintf(stderr, "oracle: candidate cap is 0; nothing to do "
                             "(raise --cap or pass --force)\n");
        return kExitConfigError;
      }
      if (cfg.n_c > cfg.oracle_cap && !oracle_force) {
        std::fprintf(stderr,
                     "oracle: n_c = %zu exceeds cap %zu; repeated SuS is expensive by "
                     "design, pass --force to override\n",
                     cfg.n_c, cfg.oracle_cap);
        return kExitConfigError;
      }
      std::shared_ptr<isus::SubprocessModel> keepalive;
      isus::PerformanceFn g = resolve_model(cfg, keepalive);
      std::vector<isus::ModelPool> pools =
          common.pools_dir.empty() ? isus::fit_pools(load_datasets(cfg), cfg)
                                   : load_pools(common.pools_dir, {});
      isus::Rng cand_rng(cfg.seed, "candidates");
      std::vector<isus::CandidateModel> candidates =
          isus::draw_candidates(pools, cfg.n_c, cand_rng);
      isus::OracleReport report = isus::repeated_sus(g, candidates, cfg.sus());

      isus::write_ecdf_csv(report.distribution, cfg.out_dir + "/oracle_ecdf.csv");
      json doc = {{"format_version", isus::kFormatVersion},
                  {"config", config_json(cfg)},
                  {"method", report.method},
                  {"g_evaluations", report.g_evaluations},
                  {"wall_seconds", report.wall_seconds},
                  {"failure_distribution", isus::to_json(report.distribution)}};
      isus::write_json_file(doc, cfg.out_dir + "/oracle_report.json");
      if (!against.empty()) {
        json prev = isus::read_json_file(against);
        isus::FailureDistribution other =
            isus::failure_distribution_from_json(prev.at("failure_distribution"));
        isus::EcdfComparison cmp = isus::compare_ecdf(report.distribution, other);
        json cj = {{"log10_median_diff", cmp.log10_median_diff},
                   {"ks_statistic", cmp.ks_statistic},
                   {"band_width_ratio", cmp.band_width_ratio},
                   {"band_overlap", cmp.band_overlap}};
        isus::write_json_file(cj, cfg.out_dir + "/compare.json");
      }
      std::printf("oracle median P_F = %.6e over %zu candidates (%zu g-evals)\n",
                  report.distribution.median, cfg.n_c, report.g_evaluations);
      return 0;
    }
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfigError;
  } catch (const isus::DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kExitDataError;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
