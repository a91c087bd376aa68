#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "vset/errors.hpp"
#include "vset/experiment.hpp"

using namespace vset;

namespace {

ExperimentSpec small_spec() {
  ExperimentSpec s;
  s.kind = ExperimentKind::recovery_curve;
  s.dict.kind = "synthetic-gaussian";
  s.dims = {60};
  s.sizes = {400};
  s.ks = {1, 2, 40};
  s.trials = 10;
  s.seed = 7;
  return s;
}

}  // namespace

TEST_CASE("wilson intervals") {
  auto [lo, hi] = wilson_interval(0, 10);
  CHECK(lo == doctest::Approx(0.0));
  CHECK(hi > 0.0);
  CHECK(hi < 0.35);
  auto [lo2, hi2] = wilson_interval(10, 10);
  CHECK(hi2 == doctest::Approx(1.0));
  CHECK(lo2 > 0.65);
  // oracle: hand-checked value for 8/10 at z=1.96
  auto [lo3, hi3] = wilson_interval(8, 10);
  CHECK(lo3 == doctest::Approx(0.4901625).epsilon(1e-4));
  CHECK(hi3 == doctest::Approx(0.9433178).epsilon(1e-4));
  CHECK_THROWS_AS(wilson_interval(5, 0), ValidationError);
  CHECK_THROWS_AS(wilson_interval(11, 10), ValidationError);
}

TEST_CASE("spec validation and json round trip") {
  ExperimentSpec s = small_spec();
  CHECK_NOTHROW(s.validate());
  ExperimentSpec back = ExperimentSpec::from_json(s.to_json());
  CHECK(back.kind == s.kind);
  CHECK(back.dims == s.dims);
  CHECK(back.sizes == s.sizes);
  CHECK(back.ks == s.ks);
  CHECK(back.trials == s.trials);
  CHECK(back.seed == s.seed);

  SUBCASE("empty k list is rejected") {
    s.ks.clear();
    CHECK_THROWS_AS(s.validate(), ValidationError);
  }
  SUBCASE("noise sweep requires sigmas") {
    s.kind = ExperimentKind::noise_sweep;
    s.sigmas.clear();
    CHECK_THROWS_AS(s.validate(), ValidationError);
  }
  SUBCASE("k larger than n is rejected") {
    s.ks = {61};
    CHECK_THROWS_AS(s.validate(), ValidationError);
  }
  SUBCASE("kind names round trip") {
    for (ExperimentKind k :
         {ExperimentKind::recovery_curve, ExperimentKind::clustered_curve,
          ExperimentKind::noise_sweep, ExperimentKind::baseline_table,
          ExperimentKind::phase_probe})
      CHECK(experiment_kind_from_name(experiment_kind_name(k)) == k);
    CHECK_THROWS_AS(experiment_kind_from_name("nope"), ValidationError);
  }
}

TEST_CASE("recovery curve at desk scale") {
  ExperimentSpec s = small_spec();
  ExperimentReport r = run_experiment(s);
  REQUIRE(r.cells.size() == 3);
  SUBCASE("k=1 always succeeds") {
    CHECK(r.cells[0].k == 1);
    CHECK(r.cells[0].success_rate == doctest::Approx(1.0));
  }
  SUBCASE("success decays with k") {
    CHECK(r.cells[0].success_rate >= r.cells[2].success_rate);
  }
  SUBCASE("counters are consistent") {
    for (const auto& c : r.cells) {
      CHECK(c.trials == 10);
      CHECK(c.successes <= c.trials);
      CHECK(c.success_rate ==
            doctest::Approx(static_cast<double>(c.successes) / c.trials));
      CHECK(c.wilson_lo <= c.success_rate + 1e-12);
      CHECK(c.success_rate <= c.wilson_hi + 1e-12);
    }
  }
  SUBCASE("reruns are identical") {
    ExperimentReport r2 = run_experiment(s);
    CHECK(render_csv(r) == render_csv(r2));
  }
}

TEST_CASE("baseline table produces all three methods") {
  ExperimentSpec s = small_spec();
  s.kind = ExperimentKind::baseline_table;
  s.ks = {1, 3};
  s.trials = 5;
  ExperimentReport r = run_experiment(s);
  int nn = 0, lf = 0, sc = 0;
  for (const auto& c : r.cells) {
    if (c.method == "nn") ++nn;
    if (c.method == "lasso_fixed") ++lf;
    if (c.method == "screened") ++sc;
    if (c.k == 1) CHECK(c.success_rate == doctest::Approx(1.0));
  }
  CHECK(nn == 2);
  CHECK(lf == 2);
  CHECK(sc == 2);
  CHECK(r.max_recoverable_k("screened", 60, 400, 0.5) >= 3);
}

TEST_CASE("clustered curve runs paired methods") {
  ExperimentSpec s = small_spec();
  s.kind = ExperimentKind::clustered_curve;
  s.dict.kind = "synthetic-clustered";
  s.dict.clusters = 8;
  s.ks = {2};
  s.trials = 5;
  ExperimentReport r = run_experiment(s);
  REQUIRE(r.cells.size() == 2);
  std::set<std::string> methods = {r.cells[0].method, r.cells[1].method};
  CHECK(methods.count("random") == 1);
  CHECK(methods.count("clustered") == 1);
}

TEST_CASE("noise sweep is monotone at sigma extremes") {
  ExperimentSpec s = small_spec();
  s.kind = ExperimentKind::noise_sweep;
  s.ks = {2};
  s.trials = 10;
  s.sigmas = {0.0, 2.0};
  s.support_only = true;
  ExperimentReport r = run_experiment(s);
  REQUIRE(r.cells.size() == 2);
  CHECK(r.cells[0].sigma == 0.0);
  CHECK(r.cells[0].success_rate == doctest::Approx(1.0));
  CHECK(r.cells[1].success_rate <= r.cells[0].success_rate);
}

TEST_CASE("csv rendering") {
  ExperimentSpec s = small_spec();
  s.ks = {1};
  s.trials = 3;
  ExperimentReport r = run_experiment(s);
  std::string csv = render_csv(r);
  std::istringstream lines(csv);
  std::string header;
  std::getline(lines, header);
  CHECK(header.find("method") != std::string::npos);
  CHECK(header.find("success_rate") != std::string::npos);
  CHECK(header.find("seconds") == std::string::npos);
  int rows = 0;
  for (std::string line; std::getline(lines, line);)
    if (!line.empty()) ++rows;
  CHECK(rows == static_cast<int>(r.cells.size()));
}

TEST_CASE("svg rendering is well-formed") {
  ExperimentSpec s = small_spec();
  s.ks = {1, 2};
  s.trials = 3;
  ExperimentReport r = run_experiment(s);
  std::string svg = render_svg(r);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  // tag balance as a cheap well-formedness proxy
  std::size_t open = 0, close = 0, selfclose = 0, pos = 0;
  while ((pos = svg.find('<', pos)) != std::string::npos) {
    if (svg[pos + 1] == '/') ++close;
    else if (svg[pos + 1] != '?' && svg[pos + 1] != '!') {
      std::size_t end = svg.find('>', pos);
      REQUIRE(end != std::string::npos);
      if (svg[end - 1] == '/') ++selfclose;
      else ++open;
    }
    ++pos;
  }
  CHECK(open == close);
}

TEST_CASE("emit_report writes files") {
  ExperimentSpec s = small_spec();
  s.ks = {1};
  s.trials = 2;
  ExperimentReport r = run_experiment(s);
  emit_report(r, "csv", "test_report.csv");
  emit_report(r, "json", "test_report.json");
  emit_report(r, "svg", "test_report.svg");
  {
    std::ifstream in("test_report.json");
    nlohmann::json j;
    in >> j;
    CHECK(j.contains("spec"));
    CHECK(j.contains("cells"));
  }
  CHECK_THROWS_AS(emit_report(r, "pdf", "test_report.pdf"), ValidationError);
  std::remove("test_report.csv");
  std::remove("test_report.json");
  std::remove("test_report.svg");
}
