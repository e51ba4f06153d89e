#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "isus/oracle.hpp"
#include "isus/subprocess_model.hpp"

using namespace isus;

namespace {

PerformanceFn linear_g(double beta) {
  return [beta](const std::vector<double>& x) {
    return beta * std::sqrt(2.0) - x[0] - x[1];
  };
}

CandidateModel std_normal_candidate() {
  CandidateModel c;
  c.specs = {{FamilyTag::Normal, {0.0, 1.0}}, {FamilyTag::Normal, {0.0, 1.0}}};
  return c;
}

}  // namespace

TEST_CASE("repeated_sus contract") {
  SusConfig cfg;
  cfg.samples_per_level = 500;
  cfg.p0 = 0.1;
  cfg.seed = 123;

  SECTION("one candidate reproduces a direct run with the derived seed") {
    auto cand = std_normal_candidate();
    auto report = repeated_sus(linear_g(3.0), {cand}, cfg);
    SusConfig direct = cfg;
    direct.seed = derive_seed(cfg.seed, "oracle-candidate", std::size_t{0});
    auto run = run_sus(linear_g(3.0), candidate_as_joint(cand), direct);
    REQUIRE(report.distribution.values.size() == 1u);
    CHECK(report.distribution.values[0] == run.pf_baseline);
    CHECK(report.g_evaluations == run.g_evaluations);
    CHECK(report.method == "repeated-sus");
    CHECK(report.wall_seconds >= 0.0);
  }
  SECTION("cost adds across candidates and results are candidate-ordered") {
    std::vector<CandidateModel> cands(3, std_normal_candidate());
    cands[1].specs[0].theta[1] = 1.2;  // distinct model in the middle
    auto report = repeated_sus(linear_g(3.0), cands, cfg);
    REQUIRE(report.distribution.values.size() == 3u);
    std::size_t total = 0;
    for (std::size_t j = 0; j < 3; ++j) {
      SusConfig cj = cfg;
      cj.seed = derive_seed(cfg.seed, "oracle-candidate", j);
      auto run = run_sus(linear_g(3.0), candidate_as_joint(cands[j]), cj);
      CHECK(report.distribution.values[j] == run.pf_baseline);
      total += run.g_evaluations;
    }
    CHECK(report.g_evaluations == total);
  }
  SECTION("no candidates is an error") {
    CHECK_THROWS_AS(repeated_sus(linear_g(3.0), {}, cfg), std::invalid_argument);
  }
}

TEST_CASE("two-sample KS statistic") {
  SECTION("identical samples") {
    std::vector<double> a = {1.0, 2.0, 3.0, 4.0};
    CHECK(ks_two_sample(a, a) == 0.0);
  }
  SECTION("disjoint samples") {
    CHECK(ks_two_sample({1.0, 2.0, 3.0}, {10.0, 11.0}) == 1.0);
  }
  SECTION("half-shifted hand case") {
    // a = {1,2}, b = {1.5,2.5}: maximum gap is 1/2
    CHECK(ks_two_sample({1.0, 2.0}, {1.5, 2.5}) == Catch::Approx(0.5).epsilon(1e-14));
  }
}

TEST_CASE("ecdf comparison") {
  auto a = make_failure_distribution({1e-3, 2e-3, 3e-3, 4e-3, 5e-3});
  SECTION("self comparison is trivial") {
    auto c = compare_ecdf(a, a);
    CHECK(c.log10_median_diff == 0.0);
    CHECK(c.ks_statistic == 0.0);
    CHECK(c.band_width_ratio == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(c.band_overlap == Catch::Approx(1.0).epsilon(1e-12));
  }
  SECTION("a decade shift shows in the median") {
    std::vector<double> shifted;
    for (double v : a.values) shifted.push_back(v * 10.0);
    auto b = make_failure_distribution(shifted);
    auto c = compare_ecdf(a, b);
    CHECK(c.log10_median_diff == Catch::Approx(-1.0).epsilon(1e-10));
    CHECK(c.ks_statistic == 1.0);
    CHECK(c.band_width_ratio == Catch::Approx(1.0).epsilon(1e-10));
    CHECK(c.band_overlap == 0.0);
  }
  SECTION("empty inputs are rejected") {
    FailureDistribution empty;
    CHECK_THROWS_AS(compare_ecdf(a, empty), std::invalid_argument);
  }
}

TEST_CASE("subprocess model line protocol") {
  SECTION("awk child computes the linear limit state") {
    SubprocessModel model("awk '{ print 3 * sqrt(2) - $1 - $2 }'");
    auto vals = model.evaluate({{0.0, 0.0}, {1.0, 2.0}, {4.0, 4.0}});
    REQUIRE(vals.size() == 3u);
    CHECK(vals[0] == Catch::Approx(3.0 * std::sqrt(2.0)).epsilon(1e-6));
    CHECK(vals[1] == Catch::Approx(3.0 * std::sqrt(2.0) - 3.0).epsilon(1e-6));
    CHECK(vals[2] < 0.0);
  }
  SECTION("batch splitting returns all values in order") {
    SubprocessModel model("awk '{ print $1 }'", 2);
    std::vector<std::vector<double>> pts;
    for (int i = 0; i < 7; ++i) pts.push_back({static_cast<double>(i)});
    auto vals = model.evaluate(pts);
    REQUIRE(vals.size() == 7u);
    for (int i = 0; i < 7; ++i) CHECK(vals[i] == static_cast<double>(i));
  }
  SECTION("performance-function adapter works inside run_sus") {
    SubprocessModel model("awk '{ print 2 - $1 }'");
    auto g = model.as_performance_fn();
    CHECK(g({0.5}) == Catch::Approx(1.5).epsilon(1e-9));
  }
  SECTION("failing child is an error") {
    SubprocessModel model("false");
    CHECK_THROWS_AS(model.evaluate({{1.0}}), std::runtime_error);
  }
  SECTION("short output is an error") {
    SubprocessModel model("head -n 1 | awk '{ print $1 }'");
    CHECK_THROWS_AS(model.evaluate({{1.0}, {2.0}}), std::runtime_error);
  }
}
