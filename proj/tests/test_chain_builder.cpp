#include "lmc/chain_builder.hpp"

#include <random>

#include "doctest.h"
#include "oracles.hpp"

using lmc::ChainProposal;
using lmc::CorrelationLine;
using lmc::fit_correlation;
using lmc::FitError;
using lmc::ModelBenchmark;
using lmc::propose_chains;
using lmc::rank_by_residual;
using lmc::RankedModel;
using lmc::ScoreMode;

namespace {

ModelBenchmark bench(std::string name, double tps, double f1) {
  ModelBenchmark b;
  b.model.name = std::move(name);
  b.mean_tps = tps;
  b.f1_in_document = f1;
  b.f1_matches_target = f1;
  return b;
}

}  // namespace

TEST_CASE("fit_correlation on collinear points") {
  std::vector<ModelBenchmark> points;
  for (double x : {0.0, 100.0, 400.0, 900.0, 1600.0})
    points.push_back(bench("m" + std::to_string(static_cast<int>(x)), x,
                           90.0 - 0.01 * x));

  const CorrelationLine line =
      fit_correlation(points, ScoreMode::kInDocument);
  CHECK(line.anchor_y == doctest::Approx(90.0));
  CHECK(line.slope == doctest::Approx(-0.01).epsilon(1e-12));
  CHECK(line.pearson_r == doctest::Approx(-1.0).epsilon(1e-12));
  for (const RankedModel& r :
       rank_by_residual(points, line, ScoreMode::kInDocument))
    CHECK(r.residual == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("fit_correlation degenerate cases") {
  SUBCASE("equal F1 everywhere") {
    std::vector<ModelBenchmark> points = {bench("a", 10.0, 80.0),
                                          bench("b", 500.0, 80.0)};
    const auto line = fit_correlation(points, ScoreMode::kInDocument);
    CHECK(line.anchor_y == 80.0);
    CHECK(line.slope == doctest::Approx(0.0));
    CHECK(line.pearson_r == 0.0);  // zero F1 variance, defined as 0
  }
  SUBCASE("too few points") {
    std::vector<ModelBenchmark> one = {bench("a", 10.0, 80.0)};
    CHECK_THROWS_AS(fit_correlation(one, ScoreMode::kInDocument), FitError);
  }
  SUBCASE("no TPS variance") {
    std::vector<ModelBenchmark> flat = {bench("a", 10.0, 80.0),
                                        bench("b", 10.0, 70.0)};
    CHECK_THROWS_AS(fit_correlation(flat, ScoreMode::kInDocument), FitError);
  }
}

TEST_CASE("anchored slope matches an independent numeric minimizer") {
  std::mt19937 rng(4242);
  std::uniform_real_distribution<double> tps_dist(1.0, 1800.0);
  std::uniform_real_distribution<double> f1_dist(40.0, 95.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<ModelBenchmark> points;
    std::vector<double> xs, ys;
    for (int i = 0; i < 12; ++i) {
      const double x = tps_dist(rng), y = f1_dist(rng);
      points.push_back(bench("m" + std::to_string(i), x, y));
      xs.push_back(x);
      ys.push_back(y);
    }
    const auto line = fit_correlation(points, ScoreMode::kInDocument);
    const double expected =
        oracle::anchored_slope_numeric(xs, ys, line.anchor_y);
    CHECK(line.slope == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("rank_by_residual tie-breaking") {
  SUBCASE("zero residuals order by speed then name") {
    // Equal F1 everywhere: anchor is the shared F1, slope 0, residuals 0.
    std::vector<ModelBenchmark> points;
    for (double x : {100.0, 300.0, 200.0})
      points.push_back(bench("m" + std::to_string(static_cast<int>(x)), x,
                             80.0));
    const auto line = fit_correlation(points, ScoreMode::kInDocument);
    const auto ranked = rank_by_residual(points, line, ScoreMode::kInDocument);
    REQUIRE(ranked.size() == 3);
    CHECK(ranked[0].residual == doctest::Approx(0.0));
    CHECK(ranked[0].benchmark.model.name == "m300");
    CHECK(ranked[1].benchmark.model.name == "m200");
    CHECK(ranked[2].benchmark.model.name == "m100");
  }
  SUBCASE("equal residuals and speeds fall back to the name") {
    std::vector<ModelBenchmark> points = {bench("zeta", 100.0, 80.0),
                                          bench("alpha", 100.0, 80.0),
                                          bench("beta", 500.0, 80.0)};
    const auto line = fit_correlation(points, ScoreMode::kInDocument);
    const auto ranked = rank_by_residual(points, line, ScoreMode::kInDocument);
    CHECK(ranked[0].benchmark.model.name == "beta");  // faster
    CHECK(ranked[1].benchmark.model.name == "alpha");
    CHECK(ranked[2].benchmark.model.name == "zeta");
  }
  SUBCASE("a single outlier ranks first") {
    std::vector<ModelBenchmark> points = {
        bench("low1", 100.0, 50.0), bench("low2", 200.0, 45.0),
        bench("high", 300.0, 95.0), bench("low3", 400.0, 40.0)};
    const auto line = fit_correlation(points, ScoreMode::kInDocument);
    const auto ranked = rank_by_residual(points, line, ScoreMode::kInDocument);
    CHECK(ranked[0].benchmark.model.name == "high");
  }
}

TEST_CASE("residual ordering is invariant under a uniform F1 shift") {
  std::mt19937 rng(555);
  std::uniform_real_distribution<double> tps_dist(1.0, 1800.0);
  std::uniform_real_distribution<double> f1_dist(30.0, 95.0);
  std::uniform_real_distribution<double> shift_dist(-20.0, 20.0);
  for (int trial = 0; trial < 150; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 10);
    std::vector<ModelBenchmark> base, shifted;
    const double c = shift_dist(rng);
    for (int i = 0; i < n; ++i) {
      const double x = tps_dist(rng), y = f1_dist(rng);
      base.push_back(bench("m" + std::to_string(i), x, y));
      shifted.push_back(bench("m" + std::to_string(i), x, y + c));
    }
    const auto line_a = fit_correlation(base, ScoreMode::kInDocument);
    const auto line_b = fit_correlation(shifted, ScoreMode::kInDocument);
    CHECK(line_b.anchor_y == doctest::Approx(line_a.anchor_y + c));

    const auto ranked_a = rank_by_residual(base, line_a, ScoreMode::kInDocument);
    const auto ranked_b =
        rank_by_residual(shifted, line_b, ScoreMode::kInDocument);
    for (std::size_t i = 0; i < ranked_a.size(); ++i)
      CHECK(ranked_a[i].benchmark.model.name ==
            ranked_b[i].benchmark.model.name);
  }
}

TEST_CASE("slope is scale-covariant in TPS") {
  std::mt19937 rng(808);
  std::uniform_real_distribution<double> tps_dist(1.0, 1800.0);
  std::uniform_real_distribution<double> f1_dist(30.0, 95.0);
  std::uniform_real_distribution<double> scale_dist(0.1, 10.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double s = scale_dist(rng);
    std::vector<ModelBenchmark> base, scaled;
    for (int i = 0; i < 8; ++i) {
      const double x = tps_dist(rng), y = f1_dist(rng);
      base.push_back(bench("m" + std::to_string(i), x, y));
      scaled.push_back(bench("m" + std::to_string(i), x * s, y));
    }
    const auto line_a = fit_correlation(base, ScoreMode::kInDocument);
    const auto line_b = fit_correlation(scaled, ScoreMode::kInDocument);
    CHECK(line_b.slope == doctest::Approx(line_a.slope / s).epsilon(1e-9));
    CHECK(line_b.pearson_r == doctest::Approx(line_a.pearson_r).epsilon(1e-9));
  }
}

namespace {

// A benchmark set shaped like the published single-model results: three
// fast-yet-accurate models sit furthest above the trend line.
std::vector<ModelBenchmark> synthetic_benchmark_set() {
  return {
      bench("slowpoke:7b", 40.0, 82.9),   bench("bigboy:12b", 60.0, 89.9),
      bench("middling:14b", 80.0, 88.2),  bench("large:8b", 90.0, 79.3),
      bench("quick:4b", 200.0, 90.6),     bench("small:1.5b", 300.0, 71.2),
      bench("spry:3b", 400.0, 87.1),      bench("zip:4b", 500.0, 82.9),
      bench("nimble:1.7b", 800.0, 77.4),  bench("tiny:0.6b", 1100.0, 88.1),
      bench("mini:1b", 1500.0, 80.2),     bench("micro:1b", 1700.0, 52.6),
  };
}

}  // namespace

TEST_CASE("proposal construction from a synthetic benchmark set") {
  const auto benchmarks = synthetic_benchmark_set();
  const auto line = fit_correlation(benchmarks, ScoreMode::kInDocument);
  const auto ranked = rank_by_residual(benchmarks, line, ScoreMode::kInDocument);

  // The three expected standouts: very fast with high F1.
  std::set<std::string> top3 = {ranked[0].benchmark.model.name,
                                ranked[1].benchmark.model.name,
                                ranked[2].benchmark.model.name};
  CHECK(top3 == std::set<std::string>{"mini:1b", "tiny:0.6b", "quick:4b"});

  const auto proposals = propose_chains(benchmarks, 3, ScoreMode::kInDocument);
  REQUIRE(proposals.size() == 3);

  // Full selection, fastest first.
  const auto& full = proposals[0].chain;
  REQUIRE(full.models.size() == 3);
  CHECK(full.models[0].name == "mini:1b");     // 1500 tps
  CHECK(full.models[1].name == "tiny:0.6b");   // 1100 tps
  CHECK(full.models[2].name == "quick:4b");    // 200 tps

  // Prefix drops the slowest member; reversal probes order sensitivity.
  const auto& prefix = proposals[1].chain;
  REQUIRE(prefix.models.size() == 2);
  CHECK(prefix.models[0].name == "mini:1b");
  CHECK(prefix.models[1].name == "tiny:0.6b");

  const auto& reversed = proposals[2].chain;
  REQUIRE(reversed.models.size() == 2);
  CHECK(reversed.models[0].name == "tiny:0.6b");
  CHECK(reversed.models[1].name == "mini:1b");

  for (const ChainProposal& p : proposals) {
    CHECK(p.chain.models.size() >= 2);
    CHECK_FALSE(p.rationale.empty());
    CHECK(p.residuals.size() == benchmarks.size());
  }
}

TEST_CASE("propose_chains with k=2 emits both orderings") {
  std::vector<ModelBenchmark> two = {bench("a", 100.0, 80.0),
                                     bench("b", 900.0, 70.0)};
  const auto proposals = propose_chains(two, 2, ScoreMode::kInDocument);
  REQUIRE(proposals.size() == 2);
  CHECK(proposals[0].chain.models[0].name == "b");  // fastest first
  CHECK(proposals[0].chain.models[1].name == "a");
  CHECK(proposals[1].chain.models[0].name == "a");
  CHECK(proposals[1].chain.models[1].name == "b");
}

TEST_CASE("propose_chains argument validation") {
  const auto benchmarks = synthetic_benchmark_set();
  CHECK_THROWS_AS(propose_chains(benchmarks, 1, ScoreMode::kInDocument),
                  std::invalid_argument);
  CHECK_THROWS_AS(propose_chains(benchmarks, 13, ScoreMode::kInDocument),
                  std::invalid_argument);
}

TEST_CASE("benchmarks_from_report pairs up both modes") {
  std::vector<lmc::ReportRow> rows(4);
  rows[0].subject = "m1";
  rows[0].mode = ScoreMode::kInDocument;
  rows[0].metrics.f1 = 80.0;
  rows[0].tps.mean = 100.0;
  rows[1].subject = "m1";
  rows[1].mode = ScoreMode::kMatchesTarget;
  rows[1].metrics.f1 = 75.0;
  rows[1].tps.mean = 100.0;
  rows[2].subject = "m2";
  rows[2].mode = ScoreMode::kInDocument;
  rows[2].metrics.f1 = 60.0;
  rows[2].tps.mean = 900.0;
  rows[3].subject = "m2";
  rows[3].mode = ScoreMode::kMatchesTarget;
  rows[3].metrics.f1 = 55.0;
  rows[3].tps.mean = 900.0;

  const auto benchmarks = lmc::benchmarks_from_report(rows);
  REQUIRE(benchmarks.size() == 2);
  CHECK(benchmarks[0].model.name == "m1");
  CHECK(benchmarks[0].f1_in_document == 80.0);
  CHECK(benchmarks[0].f1_matches_target == 75.0);
  CHECK(benchmarks[0].mean_tps == 100.0);
  CHECK(benchmarks[1].model.name == "m2");
}
