#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "isus/reweight.hpp"
#include "isus/special.hpp"
#include "support/helpers.hpp"

using namespace isus;
namespace ts = test_support;

namespace {

JointDensity std_normal_joint(std::size_t d) {
  JointDensity Q;
  for (std::size_t i = 0; i < d; ++i) {
    MixtureDensity m;
    m.components.push_back({{FamilyTag::Normal, {0.0, 1.0}}, 1.0});
    Q.marginals.push_back(std::move(m));
  }
  return Q;
}

PerformanceFn linear_g(double beta) {
  return [beta](const std::vector<double>& x) {
    return beta * std::sqrt(2.0) - x[0] - x[1];
  };
}

SusRun baseline_run(std::uint64_t seed) {
  SusConfig cfg;
  cfg.samples_per_level = 1000;
  cfg.p0 = 0.1;
  cfg.seed = seed;
  return run_sus(linear_g(3.0), std_normal_joint(2), cfg);
}

}  // namespace

TEST_CASE("importance weights") {
  auto Q = std_normal_joint(1);
  SECTION("identical densities give weight one") {
    auto lp = as_log_pdf(Q);
    for (double x = -3.0; x < 3.0; x += 0.41)
      CHECK(importance_weight({x}, lp, Q) == 1.0);
  }
  SECTION("a known gaussian ratio") {
    CandidateModel wide;
    wide.specs = {{FamilyTag::Normal, {0.0, 2.0}}};
    // p(0)/q(0) = (1/2 phi(0)) / phi(0) = 0.5
    CHECK(importance_weight({0.0}, as_log_pdf(wide), Q) == Catch::Approx(0.5).epsilon(1e-12));
    // at x = 2: exp(-0.5)/2 / exp(-2)
    CHECK(importance_weight({2.0}, as_log_pdf(wide), Q) ==
          Catch::Approx(0.5 * std::exp(-0.5 + 2.0)).epsilon(1e-12));
  }
  SECTION("candidate support gaps give weight zero") {
    CandidateModel pos;
    pos.specs = {{FamilyTag::Lognormal, {0.0, 1.0}}};
    CHECK(importance_weight({-1.0}, as_log_pdf(pos), Q) == 0.0);
  }
  SECTION("an underflowing sampling density floors to zero with a count") {
    CandidateModel cand;
    cand.specs = {{FamilyTag::Normal, {0.0, 1.0}}};
    std::size_t floored = 0;
    CHECK(importance_weight({50.0}, as_log_pdf(cand), Q, &floored) == 0.0);
    CHECK(floored == 1u);
  }
}

TEST_CASE("re-weighting with the sampling density itself is exact") {
  auto run = baseline_run(31);
  auto res = failure_probability(run, as_log_pdf(run.density));
  REQUIRE(run.pf_baseline > 0.0);
  CHECK(std::fabs(res.pf / run.pf_baseline - 1.0) < 1e-12);
  CHECK(res.floored_count == 0u);
  CHECK_FALSE(res.clipped);
  CHECK_FALSE(res.ess_flagged);
  // unit weights make every level ESS equal to N
  for (const auto& wl : res.levels) CHECK(wl.ess == Catch::Approx(1000.0).epsilon(1e-12));
}

TEST_CASE("a candidate matching the sampling density numerically agrees") {
  auto run = baseline_run(32);
  CandidateModel cand;
  cand.specs = {{FamilyTag::Normal, {0.0, 1.0}}, {FamilyTag::Normal, {0.0, 1.0}}};
  auto res = failure_probability(run, cand);
  CHECK(res.pf == Catch::Approx(run.pf_baseline).epsilon(1e-10));
}

TEST_CASE("self-normalized mode agrees for equal densities and stays in range") {
  auto run = baseline_run(33);
  auto res = failure_probability(run, as_log_pdf(run.density), WeightMode::SelfNormalized);
  CHECK(std::fabs(res.pf / run.pf_baseline - 1.0) < 1e-12);

  CandidateModel shifted;
  shifted.specs = {{FamilyTag::Normal, {0.3, 1.1}}, {FamilyTag::Normal, {-0.2, 0.9}}};
  auto sn = failure_probability(run, shifted, WeightMode::SelfNormalized);
  CHECK(sn.pf >= 0.0);
  CHECK(sn.pf <= 1.0);
}

TEST_CASE("a candidate with no mass in the failure region yields zero") {
  auto run = baseline_run(34);
  // lognormal marginals cannot reach the negative orthant but the failure
  // region needs u1 + u2 >= 4.24; shift far negative instead via a support gap
  Level fake = run.levels[0];
  CandidateModel cand;
  cand.specs = {{FamilyTag::Normal, {0.0, 1.0}}, {FamilyTag::Normal, {0.0, 1.0}}};
  // build a synthetic run whose final level has no indicator hits
  SusRun synthetic;
  synthetic.density = run.density;
  fake.threshold = -1.0;
  for (auto& g : fake.g_values) g = 1.0;  // nothing at or below zero
  synthetic.levels.push_back(fake);
  auto res = failure_probability(synthetic, cand);
  CHECK(res.pf == 0.0);
}

TEST_CASE("ecdf hand cases") {
  Ecdf e({0.1, 0.2, 0.3});
  CHECK(e(0.05) == 0.0);
  CHECK(e(0.2) == Catch::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(e(0.25) == Catch::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(e(0.3) == 1.0);
  CHECK(e(1.0) == 1.0);
  CHECK(e.quantile(0.0) == 0.1);
  CHECK(e.quantile(1.0) == 0.3);
  CHECK_THROWS_AS(Ecdf({}), std::invalid_argument);

  // median of 1001 increasing values is the 501st
  std::vector<double> v;
  for (int i = 1; i <= 1001; ++i) v.push_back(static_cast<double>(i));
  auto fd = make_failure_distribution(v);
  CHECK(fd.median == 501.0);
  CHECK(fd.q05 == 51.0);
  CHECK(fd.q95 == 951.0);
  CHECK(fd.zero_count == 0u);
}

TEST_CASE("failure distribution summary counts zeros") {
  auto fd = make_failure_distribution({0.0, 1e-3, 0.0, 2e-3, 5e-4});
  CHECK(fd.zero_count == 2u);
  CHECK(fd.sorted.front() == 0.0);
  CHECK(fd.sorted.back() == 2e-3);
}

TEST_CASE("reweight_all is worker-count independent and candidate ordered") {
  auto run = baseline_run(35);
  std::vector<CandidateModel> cands;
  for (int i = 0; i < 12; ++i) {
    CandidateModel c;
    double mu = -0.2 + 0.04 * i;
    c.specs = {{FamilyTag::Normal, {mu, 1.0}}, {FamilyTag::Normal, {-mu, 1.05}}};
    cands.push_back(c);
  }
  auto serial = reweight_all(run, cands, WeightMode::Raw, 1);
  auto parallel = reweight_all(run, cands, WeightMode::Raw, 4);
  REQUIRE(serial.values.size() == cands.size());
  for (std::size_t i = 0; i < cands.size(); ++i)
    CHECK(serial.values[i] == parallel.values[i]);
  CHECK(serial.flagged_unreliable == parallel.flagged_unreliable);
  CHECK_THROWS_AS(reweight_all(run, {}, WeightMode::Raw, 1), std::invalid_argument);
}

TEST_CASE("small candidate perturbations move the estimate continuously") {
  auto run = baseline_run(36);
  CandidateModel base;
  base.specs = {{FamilyTag::Normal, {0.0, 1.0}}, {FamilyTag::Normal, {0.0, 1.0}}};
  CandidateModel nudged = base;
  nudged.specs[0].theta[0] += 1e-6;
  double a = failure_probability(run, base).pf;
  double b = failure_probability(run, nudged).pf;
  CHECK(a > 0.0);
  CHECK(std::fabs(b / a - 1.0) < 1e-3);
}

TEST_CASE("wider candidates raise the failure probability of a linear limit state") {
  // for g = 3 sqrt(2) - u1 - u2, scaling both marginals by s gives
  // P_F = Phi(-3 / s); re-weighted estimates should reproduce the ordering
  auto run = baseline_run(37);
  CandidateModel narrow, wide;
  narrow.specs = {{FamilyTag::Normal, {0.0, 0.9}}, {FamilyTag::Normal, {0.0, 0.9}}};
  wide.specs = {{FamilyTag::Normal, {0.0, 1.1}}, {FamilyTag::Normal, {0.0, 1.1}}};
  double pn = failure_probability(run, narrow).pf;
  double pw = failure_probability(run, wide).pf;
  CHECK(pn < run.pf_baseline);
  CHECK(pw > run.pf_baseline);
  // order-of-magnitude agreement with the analytic values
  CHECK(pn == Catch::Approx(normal_cdf(-3.0 / 0.9)).epsilon(0.75));
  CHECK(pw == Catch::Approx(normal_cdf(-3.0 / 1.1)).epsilon(0.75));
}
