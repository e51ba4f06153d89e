#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <map>

#include "isus/inference.hpp"
#include "support/helpers.hpp"

using namespace isus;
namespace ts = test_support;

TEST_CASE("aic and aicc formulas") {
  CHECK(aic(-10.0, 2) == Catch::Approx(24.0).epsilon(1e-14));
  // correction term for k = 2, n = 25: (2*4 + 2) / 22
  CHECK(aicc(-10.0, 2, 25) == Catch::Approx(24.0 + 10.0 / 22.0).epsilon(1e-12));
  CHECK_THROWS_AS(aic(-10.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(aicc(-10.0, 2, 3), std::invalid_argument);
}

TEST_CASE("model probabilities") {
  SECTION("two models, delta of 2") {
    auto w = model_probabilities({100.0, 102.0});
    CHECK(w[0] == Catch::Approx(1.0 / (1.0 + std::exp(-1.0))).epsilon(1e-12));
    CHECK(w[1] == Catch::Approx(std::exp(-1.0) / (1.0 + std::exp(-1.0))).epsilon(1e-12));
    CHECK(w[0] + w[1] == Catch::Approx(1.0).epsilon(1e-14));
  }
  SECTION("huge delta stays finite") {
    auto w = model_probabilities({0.0, 200.0});
    CHECK(w[0] == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(w[1] >= 0.0);
    CHECK(w[1] < 1e-20);
  }
  SECTION("invariant under a constant shift") {
    auto a = model_probabilities({3.0, 5.5, 4.0});
    auto b = model_probabilities({3.0 + 1e6, 5.5 + 1e6, 4.0 + 1e6});
    for (std::size_t i = 0; i < a.size(); ++i)
      CHECK(a[i] == Catch::Approx(b[i]).epsilon(1e-9));
  }
  SECTION("rejects bad input") {
    CHECK_THROWS_AS(model_probabilities({}), std::invalid_argument);
    CHECK_THROWS_AS(model_probabilities({1.0, kInf}), std::invalid_argument);
  }
}

TEST_CASE("stretch sampler recovers a 2-d gaussian") {
  // independent N(0,1) x N(3, 2^2)
  LogTargetFn target = [](const std::vector<double>& x) {
    double a = x[0], b = (x[1] - 3.0) / 2.0;
    return -0.5 * (a * a + b * b);
  };
  Rng rng(11, "stretch-gauss");
  std::vector<std::vector<double>> walkers;
  for (int i = 0; i < 16; ++i)
    walkers.push_back({rng.uniform(-1.0, 1.0), 3.0 + rng.uniform(-1.0, 1.0)});
  auto res = stretch_sampler(target, walkers, 13000, 2.0, rng, 3000);
  REQUIRE(res.samples.size() == 10000u * 16u);
  CHECK(res.acceptance_rate > 0.2);
  CHECK(res.acceptance_rate < 0.9);

  std::vector<double> c0, c1;
  for (const auto& s : res.samples) {
    c0.push_back(s[0]);
    c1.push_back(s[1]);
  }
  CHECK(ts::mean(c0) == Catch::Approx(0.0).margin(0.05));
  CHECK(ts::mean(c1) == Catch::Approx(3.0).margin(0.1));
  CHECK(ts::variance(c0) == Catch::Approx(1.0).epsilon(0.05));
  CHECK(ts::variance(c1) == Catch::Approx(4.0).epsilon(0.05));
}

TEST_CASE("stretch sampler input validation") {
  LogTargetFn target = [](const std::vector<double>& x) { return -0.5 * x[0] * x[0]; };
  Rng rng(5, "stretch-bad");
  std::vector<std::vector<double>> one = {{0.0}};
  CHECK_THROWS_AS(stretch_sampler(target, one, 10, 2.0, rng), std::invalid_argument);
  std::vector<std::vector<double>> two = {{0.0}, {1.0}};
  CHECK_THROWS_AS(stretch_sampler(target, two, 10, 1.0, rng), std::invalid_argument);
  std::vector<std::vector<double>> same = {{0.5}, {0.5}, {0.5}};
  CHECK_THROWS_AS(stretch_sampler(target, same, 10, 2.0, rng), std::runtime_error);
  LogTargetFn bad = [](const std::vector<double>&) { return kInf; };
  CHECK_THROWS_AS(stretch_sampler(bad, two, 10, 2.0, rng), std::invalid_argument);
}

TEST_CASE("stretch sampler 1-d marginal passes KS against N(0,1)") {
  LogTargetFn target = [](const std::vector<double>& x) { return -0.5 * x[0] * x[0]; };
  std::size_t passes = 0;
  for (std::uint64_t rep = 0; rep < 20; ++rep) {
    Rng rng(301, "stretch-ks", rep);
    std::vector<std::vector<double>> walkers;
    for (int i = 0; i < 8; ++i) walkers.push_back({rng.uniform(-2.0, 2.0)});
    auto res = stretch_sampler(target, walkers, 3000, 2.0, rng, 1500);
    // thin aggressively: correlated chains inflate the KS statistic
    std::vector<double> xs;
    for (std::size_t i = 0; i < res.samples.size(); i += 200)
      xs.push_back(res.samples[i][0]);
    double d = ts::ks_statistic(xs, [](double x) { return normal_cdf(x); });
    if (d < ts::ks_critical(xs.size(), 0.01)) ++passes;
  }
  CHECK(passes >= 18);
}

TEST_CASE("posterior cloud behaviour") {
  Rng gen(77, "cloud-data");
  Dataset data{sample({FamilyTag::Normal, {10.0, 2.0}}, 400, gen), "x"};
  auto fit = fit_mle(FamilyTag::Normal, data);
  REQUIRE(fit);
  PriorSpec prior = default_prior(FamilyTag::Normal, fit->theta, data);

  SECTION("concentrates near the MLE with posterior-scale spread") {
    Rng rng(3, "cloud");
    auto cloud = posterior_cloud(FamilyTag::Normal, data, prior, 4000, rng);
    REQUIRE(cloud.samples.size() == 4000u);
    std::vector<double> mus, sigmas;
    for (const auto& t : cloud.samples) {
      mus.push_back(t[0]);
      sigmas.push_back(t[1]);
    }
    // posterior std of mu is about sigma/sqrt(n) = 0.1
    CHECK(ts::mean(mus) == Catch::Approx(fit->theta[0]).margin(0.05));
    CHECK(std::sqrt(ts::variance(mus)) == Catch::Approx(fit->theta[1] / 20.0).epsilon(0.25));
    CHECK(ts::mean(sigmas) == Catch::Approx(fit->theta[1]).margin(0.05));
    for (const auto& t : cloud.samples) CHECK(prior.contains(t));
  }
  SECTION("deterministic for a fixed seed") {
    Rng r1(9, "cloud"), r2(9, "cloud");
    auto a = posterior_cloud(FamilyTag::Normal, data, prior, 500, r1);
    auto b = posterior_cloud(FamilyTag::Normal, data, prior, 500, r2);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
      CHECK(a.samples[i][0] == b.samples[i][0]);
      CHECK(a.samples[i][1] == b.samples[i][1]);
    }
  }
  SECTION("n_theta of zero is an error") {
    Rng rng(1, "cloud");
    CHECK_THROWS_AS(posterior_cloud(FamilyTag::Normal, data, prior, 0, rng),
                    std::invalid_argument);
  }
  SECTION("a narrow prior confines the cloud") {
    PriorSpec tight{{fit->theta[0] - 0.01, fit->theta[1] - 0.01},
                    {fit->theta[0] + 0.01, fit->theta[1] + 0.01}};
    Rng rng(4, "cloud");
    auto cloud = posterior_cloud(FamilyTag::Normal, data, tight, 1000, rng);
    for (const auto& t : cloud.samples) CHECK(tight.contains(t));
  }
}

TEST_CASE("build_model_pool on clean normal data") {
  Rng gen(501, "pool-data");
  Dataset data{sample({FamilyTag::Normal, {0.0, 1.0}}, 600, gen), "u1"};
  InferenceConfig cfg;
  cfg.n_theta = 300;
  auto pool = build_model_pool(data, cfg, 123, 0);
  CHECK(pool.variable == "u1");
  CHECK(pool.n == 600u);
  REQUIRE_FALSE(pool.fitted.empty());
  double sum = 0.0;
  for (const auto& m : pool.fitted) sum += m.prob;
  CHECK(sum == Catch::Approx(1.0).epsilon(1e-10));
  // data straddling zero: only the real-line families can be fit
  for (const auto& m : pool.fitted)
    CHECK((m.family == FamilyTag::Normal || m.family == FamilyTag::Logistic ||
           m.family == FamilyTag::Maxwell || m.family == FamilyTag::Levy));
  // the best family holds most of the probability, and every retained cloud
  // belongs to a family above the floor
  double best = 0.0;
  for (const auto& m : pool.fitted) best = std::max(best, m.prob);
  CHECK(best > 0.5);
  for (const auto& [fam, cloud] : pool.clouds) {
    CHECK(cloud.samples.size() == cfg.n_theta);
    bool found = false;
    for (const auto& m : pool.fitted)
      if (m.family == fam) {
        CHECK(m.prob >= cfg.prob_floor);
        found = true;
      }
    CHECK(found);
  }
}

TEST_CASE("draw_candidates respects the model probabilities") {
  Rng gen(502, "cand-data");
  Dataset data{sample({FamilyTag::Normal, {5.0, 1.0}}, 300, gen), "x"};
  InferenceConfig cfg;
  cfg.n_theta = 200;
  std::vector<ModelPool> pools{build_model_pool(data, cfg, 55, 0)};

  // renormalized weights over cloud-bearing families
  std::map<FamilyTag, double> w;
  double sum = 0.0;
  for (const auto& m : pools[0].fitted)
    if (pools[0].clouds.count(m.family)) {
      w[m.family] = m.prob;
      sum += m.prob;
    }
  for (auto& [f, v] : w) v /= sum;

  Rng rng(7, "cand");
  const std::size_t n_c = 20000;
  auto cands = draw_candidates(pools, n_c, rng);
  REQUIRE(cands.size() == n_c);
  std::map<FamilyTag, std::size_t> counts;
  for (const auto& c : cands) {
    REQUIRE(c.specs.size() == 1u);
    ++counts[c.specs[0].family];
    CHECK(theta_valid(c.specs[0].family, c.specs[0].theta));
  }
  for (const auto& [f, p] : w) {
    double frac = static_cast<double>(counts[f]) / n_c;
    // 5-sigma binomial band
    double se = std::sqrt(std::max(p * (1.0 - p) / n_c, 1e-12));
    CHECK(std::fabs(frac - p) <= 5.0 * se + 1e-9);
  }
}

TEST_CASE("draw_candidates never selects a vanishing-probability family") {
  // hand-built pools: one family with weight ~1, one with weight < 1e-12
  ModelPool pool;
  pool.variable = "x";
  pool.n = 100;
  FittedModel big{FamilyTag::Normal, {0.0, 1.0}, 0.0, 0.0, 0.0, 1.0 - 1e-13};
  FittedModel tiny{FamilyTag::Logistic, {0.0, 1.0}, 0.0, 0.0, 60.0, 1e-13};
  pool.fitted = {big, tiny};
  PosteriorCloud cn;
  cn.family = FamilyTag::Normal;
  cn.samples = {{0.0, 1.0}, {0.1, 1.1}};
  PosteriorCloud cl;
  cl.family = FamilyTag::Logistic;
  cl.samples = {{0.0, 1.0}};
  pool.clouds[FamilyTag::Normal] = cn;
  pool.clouds[FamilyTag::Logistic] = cl;

  Rng rng(13, "cand-tiny");
  auto cands = draw_candidates({pool}, 1000000, rng);
  for (const auto& c : cands) CHECK(c.specs[0].family == FamilyTag::Normal);
}
