#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "isus/benchmarks.hpp"
#include "isus/density.hpp"
#include "isus/inference.hpp"
#include "isus/reweight.hpp"
#include "isus/sus.hpp"

namespace isus {

using nlohmann::json;

inline constexpr int kFormatVersion = 1;

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One numeric column of delimited text; '#' comments, optional header line.
inline Dataset read_dataset(const std::string& path, const std::string& name) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset: " + path);
  Dataset d;
  d.name = name;
  std::string line;
  bool first_content = true;
  while (std::getline(in, line)) {
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string tok;
    if (!(ss >> tok)) continue;
    try {
      std::size_t pos = 0;
      double v = std::stod(tok, &pos);
      if (pos != tok.size()) throw std::invalid_argument(tok);
      d.values.push_back(v);
    } catch (const std::exception&) {
      if (first_content) {  // header line
        first_content = false;
        continue;
      }
      throw DataError("non-numeric value '" + tok + "' in " + path);
    }
    first_content = false;
  }
  if (d.values.empty()) throw DataError("empty dataset: " + path);
  return d;
}

inline json to_json(const DistributionSpec& s) {
  return {{"family", family_name(s.family)}, {"theta", s.theta}};
}

inline DistributionSpec spec_from_json(const json& j) {
  DistributionSpec s;
  s.family = family_from_name(j.at("family").get<std::string>());
  auto t = j.at("theta").get<std::vector<double>>();
  s.theta = {t.at(0), t.at(1)};
  return s;
}

inline json to_json(const ModelPool& pool) {
  json fitted = json::array();
  for (const FittedModel& m : pool.fitted) {
    fitted.push_back({{"family", family_name(m.family)},
                      {"theta_star", m.theta_star},
                      {"loglik", m.loglik},
                      {"aicc", m.aicc},
                      {"delta", m.delta},
                      {"prob", m.prob}});
  }
  json clouds = json::object();
  for (const auto& [fam, cloud] : pool.clouds) {
    json samples = json::array();
    for (const auto& t : cloud.samples) samples.push_back(t);
    clouds[std::string(family_name(fam))] = {{"samples", samples},
                                             {"acceptance_rate", cloud.acceptance_rate},
                                             {"burn_in", cloud.burn_in}};
  }
  return {{"format_version", kFormatVersion},
          {"variable", pool.variable},
          {"n", pool.n},
          {"fitted", fitted},
          {"clouds", clouds}};
}

inline ModelPool pool_from_json(const json& j) {
  ModelPool pool;
  pool.variable = j.at("variable").get<std::string>();
  pool.n = j.at("n").get<std::size_t>();
  for (const json& m : j.at("fitted")) {
    FittedModel f{};
    f.family = family_from_name(m.at("family").get<std::string>());
    auto t = m.at("theta_star").get<std::vector<double>>();
    f.theta_star = {t.at(0), t.at(1)};
    f.loglik = m.at("loglik").get<double>();
    f.aicc = m.at("aicc").get<double>();
    f.delta = m.at("delta").get<double>();
    f.prob = m.at("prob").get<double>();
    pool.fitted.push_back(f);
  }
  for (auto it = j.at("clouds").begin(); it != j.at("clouds").end(); ++it) {
    PosteriorCloud c;
    c.family = family_from_name(it.key());
    for (const json& s : it.value().at("samples")) {
      auto t = s.get<std::vector<double>>();
      c.samples.push_back({t.at(0), t.at(1)});
    }
    c.acceptance_rate = it.value().at("acceptance_rate").get<double>();
    c.burn_in = it.value().at("burn_in").get<std::size_t>();
    pool.clouds[c.family] = std::move(c);
  }
  return pool;
}

inline json to_json(const MixtureDensity& m) {
  json comps = json::array();
  for (const auto& [spec, w] : m.components) {
    json c = to_json(spec);
    c["weight"] = w;
    comps.push_back(c);
  }
  return {{"variable", m.variable}, {"components", comps}};
}

inline MixtureDensity mixture_from_json(const json& j) {
  MixtureDensity m;
  m.variable = j.at("variable").get<std::string>();
  for (const json& c : j.at("components"))
    m.components.push_back({spec_from_json(c), c.at("weight").get<double>()});
  return m;
}

inline json to_json(const JointDensity& q) {
  json marg = json::array();
  for (const MixtureDensity& m : q.marginals) marg.push_back(to_json(m));
  return {{"format_version", kFormatVersion}, {"marginals", marg}};
}

inline JointDensity joint_from_json(const json& j) {
  JointDensity q;
  for (const json& m : j.at("marginals")) q.marginals.push_back(mixture_from_json(m));
  return q;
}

inline json to_json(const SusRun& run) {
  json levels = json::array();
  for (const Level& lv : run.levels) {
    levels.push_back({{"index", lv.index},
                      {"threshold", lv.threshold},
                      {"samples", lv.samples},
                      {"g_values", lv.g_values},
                      {"seed_indices", lv.seed_indices},
                      {"acceptance_rate", lv.acceptance_rate}});
  }
  return {{"format_version", kFormatVersion},
          {"levels", levels},
          {"pf_baseline", run.pf_baseline},
          {"cov_baseline", run.cov_baseline},
          {"g_evaluations", run.g_evaluations},
          {"converged", run.converged},
          {"density", to_json(run.density)}};
}

inline SusRun susrun_from_json(const json& j) {
  SusRun run;
  for (const json& l : j.at("levels")) {
    Level lv;
    lv.index = l.at("index").get<std::size_t>();
    lv.threshold = l.at("threshold").get<double>();
    lv.samples = l.at("samples").get<std::vector<std::vector<double>>>();
    lv.g_values = l.at("g_values").get<std::vector<double>>();
    lv.seed_indices = l.at("seed_indices").get<std::vector<std::size_t>>();
    lv.acceptance_rate = l.at("acceptance_rate").get<double>();
    run.levels.push_back(std::move(lv));
  }
  run.pf_baseline = j.at("pf_baseline").get<double>();
  run.cov_baseline = j.at("cov_baseline").get<double>();
  run.g_evaluations = j.at("g_evaluations").get<std::size_t>();
  run.converged = j.at("converged").get<bool>();
  run.density = joint_from_json(j.at("density"));
  return run;
}

inline json to_json(const FailureDistribution& fd) {
  return {{"format_version", kFormatVersion},
          {"values", fd.values},
          {"median", fd.median},
          {"q05", fd.q05},
          {"q95", fd.q95},
          {"zero_count", fd.zero_count},
          {"flagged_unreliable", fd.flagged_unreliable},
          {"floored_total", fd.floored_total}};
}

inline FailureDistribution failure_distribution_from_json(const json& j) {
  FailureDistribution fd = make_failure_distribution(j.at("values").get<std::vector<double>>());
  fd.flagged_unreliable = j.at("flagged_unreliable").get<std::size_t>();
  fd.floored_total = j.at("floored_total").get<std::size_t>();
  return fd;
}

// Two-column plot-ready ECDF table: P_F, F-hat.
inline void write_ecdf_csv(const FailureDistribution& fd, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write: " + path);
  out << "# pf,ecdf\n";
  const double n = static_cast<double>(fd.sorted.size());
  for (std::size_t i = 0; i < fd.sorted.size(); ++i) {
    out.precision(17);
    out << fd.sorted[i] << "," << (static_cast<double>(i + 1) / n) << "\n";
  }
}

inline void write_ground_motion_csv(const GroundMotion& gm, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write: " + path);
  out << "# t,a\n";
  out.precision(17);
  for (std::size_t i = 0; i < gm.accel.size(); ++i)
    out << static_cast<double>(i) * gm.dt << "," << gm.accel[i] << "\n";
}

inline void write_json_file(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write: " + path);
  out << j.dump(2) << "\n";
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path);
  json j;
  in >> j;
  return j;
}

}  // namespace isus
