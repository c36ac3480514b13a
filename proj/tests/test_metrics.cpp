#include <catch2/catch_amalgamated.hpp>

#include "voxmat/metrics.hpp"

using namespace voxmat;
using namespace voxmat::metrics;

namespace {

CandidateOutcome candidate(std::vector<bool> sat, std::vector<double> errs) {
  return CandidateOutcome{std::move(sat), std::move(errs)};
}

RunSummary run_with(std::vector<CandidateOutcome> candidates, bool success) {
  RunSummary r;
  r.task_id = "t";
  r.method = "m";
  r.success = success;
  r.candidates = std::move(candidates);
  return r;
}

}  // namespace

TEST_CASE("success rate counts runs holding a fully valid candidate") {
  std::vector<RunSummary> all{
      run_with({candidate({true, true}, {0.0, 0.0})}, true),
      run_with({candidate({true, true}, {0.01, 0.02})}, true),
  };
  CHECK(success_rate(all) == 1.0);

  std::vector<RunSummary> none{
      run_with({candidate({true, false}, {0.0, 0.5})}, false),
  };
  CHECK(success_rate(none) == 0.0);

  std::vector<RunSummary> three_of_four;
  for (int i = 0; i < 3; ++i)
    three_of_four.push_back(run_with({candidate({true}, {0.0})}, true));
  three_of_four.push_back(run_with({candidate({false}, {0.9})}, false));
  CHECK(success_rate(three_of_four) == Catch::Approx(0.75));
}

TEST_CASE("CSR uses an inclusive half-objective threshold over the pooled candidates") {
  // K = 2, one of two satisfied counts (1 >= 0.5 * 2).
  std::vector<RunSummary> runs{run_with({candidate({true, false}, {0.0, 0.3})}, false)};
  CHECK(constraint_satisfaction_rate(runs) == 1.0);

  // K = 5, two of five does not (2 < 2.5).
  runs = {run_with({candidate({true, true, false, false, false},
                              {0.0, 0.0, 0.2, 0.2, 0.2})},
                   false)};
  CHECK(constraint_satisfaction_rate(runs) == 0.0);

  // All satisfied everywhere.
  runs = {run_with({candidate({true, true}, {0.0, 0.0}),
                    candidate({true, true}, {0.01, 0.01})},
                   true)};
  CHECK(constraint_satisfaction_rate(runs) == 1.0);
}

TEST_CASE("MRE takes the best candidate per run, averaged over runs") {
  std::vector<RunSummary> perfect{
      run_with({candidate({true}, {0.0})}, true),
      run_with({candidate({true}, {0.0})}, true),
  };
  CHECK(mean_relative_error(perfect) == 0.0);

  std::vector<RunSummary> single{
      run_with({candidate({false, false}, {0.02, 0.04})}, false)};
  CHECK(mean_relative_error(single) == Catch::Approx(0.03));

  // Fixture built backward from the formula to produce 0.0140.
  std::vector<RunSummary> fixture{
      run_with({candidate({false, false}, {0.020, 0.012}),
                candidate({false, false}, {0.5, 0.5})},
               false),
      run_with({candidate({false, false}, {0.008, 0.016})}, false),
  };
  CHECK(mean_relative_error(fixture) == Catch::Approx(0.0140).margin(1e-12));
}

TEST_CASE("BPM reports the best satisfied fraction per run in percent") {
  std::vector<RunSummary> runs{
      run_with({candidate({true, true, true, false}, {0, 0, 0, 0.5}),
                candidate({true, false, false, false}, {0, 1, 1, 1})},
               false)};
  CHECK(best_property_match(runs) == Catch::Approx(75.0));

  runs = {run_with({candidate({true, true}, {0, 0})}, true)};
  CHECK(best_property_match(runs) == Catch::Approx(100.0));

  runs = {run_with({candidate({false, false}, {1, 1})}, false)};
  CHECK(best_property_match(runs) == Catch::Approx(0.0));
}

TEST_CASE("quality score formula and bounds") {
  CHECK(quality_score(true, 1.0, 1.0, 0.0) == 100.0);
  CHECK(quality_score(false, 0.0, 0.0, 1.0) == 0.0);
  CHECK(quality_score(false, 0.0, 0.0, 5.0) == 0.0);  // MRE saturates at 1
  CHECK(quality_score(true, 0.8, 0.5, 0.2) == Catch::Approx(75.0));
  CHECK(quality_score(false, 1.0, 1.0, 0.0) == Catch::Approx(80.0));
  CHECK(quality_score(true, 0.25, 0.5, 0.5) == Catch::Approx(20 + 10 + 15 + 5));
}

TEST_CASE("quality score is monotone in its inputs") {
  Rng rng(12);
  for (int t = 0; t < 200; ++t) {
    const double bpm = rng.uniform01();
    const double csr = rng.uniform01();
    const double mre = rng.uniform(0.0, 1.5);
    const double base = quality_score(false, bpm, csr, mre);
    CHECK(quality_score(true, bpm, csr, mre) >= base);
    CHECK(quality_score(false, std::min(1.0, bpm + 0.1), csr, mre) >= base);
    CHECK(quality_score(false, bpm, std::min(1.0, csr + 0.1), mre) >= base);
    CHECK(quality_score(false, bpm, csr, mre + 0.1) <= base);
    CHECK(base >= 0.0);
    CHECK(base <= 100.0);
  }
}

TEST_CASE("a run is successful exactly when its BPM hits 100 percent") {
  Rng rng(77);
  for (int t = 0; t < 100; ++t) {
    std::vector<CandidateOutcome> candidates;
    bool any_full = false;
    const int k = 2 + static_cast<int>(rng.index(3));
    for (int c = 0; c < 5; ++c) {
      std::vector<bool> sat;
      std::vector<double> errs;
      bool full = true;
      for (int j = 0; j < k; ++j) {
        const bool s = rng.uniform01() < 0.5;
        sat.push_back(s);
        errs.push_back(s ? 0.01 : 0.5);
        full = full && s;
      }
      any_full = any_full || full;
      candidates.push_back(candidate(sat, errs));
    }
    std::vector<RunSummary> runs{run_with(candidates, any_full)};
    CHECK((success_rate(runs) == 1.0) == (best_property_match(runs) == 100.0));
  }
}

TEST_CASE("Err prints the signed percentage at one decimal") {
  // The nine published cross-physics rows.
  CHECK(format_err_percent(0.0340, 0.035) == "-2.9");
  CHECK(format_err_percent(107.4, 110.0) == "-2.4");
  CHECK(format_err_percent(0.2558, 0.26) == "-1.6");
  CHECK(format_err_percent(28.24, 30.0) == "-5.9");
  CHECK(format_err_percent(3.78e6, 3.8e6) == "-0.5");
  CHECK(format_err_percent(26.27, 26.0) == "+1.0");
  CHECK(format_err_percent(3021.4, 3000.0) == "+0.7");
  CHECK(format_err_percent(0.2542, 0.25) == "+1.7");
  CHECK(format_err_percent(26.21, 25.0) == "+4.8");
}

TEST_CASE("aggregate report groups by task and method in order") {
  std::vector<RunSummary> summaries;
  for (int seed = 0; seed < 4; ++seed) {
    RunSummary r = run_with({candidate({true, true}, {0.01, 0.01}),
                             candidate({true, false}, {0.02, 0.3})},
                            true);
    r.task_id = "b_task";
    r.method = "saes";
    r.seed = static_cast<std::uint64_t>(seed);
    r.iterations = 3 + seed;
    r.evaluations = 40;
    r.wall_clock_s = 1.0;
    summaries.push_back(r);
  }
  RunSummary other = run_with({candidate({false}, {0.8})}, false);
  other.task_id = "a_task";
  other.method = "random";
  summaries.push_back(other);

  const auto rows = aggregate_report(summaries);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].task_id == "a_task");
  CHECK(rows[1].task_id == "b_task");
  CHECK(rows[1].runs == 4);
  CHECK(rows[1].sr == 1.0);
  CHECK(rows[1].mean_iterations == Catch::Approx((3 + 4 + 5 + 6) / 4.0));
  CHECK(rows[1].mre == Catch::Approx(0.01));
  CHECK(rows[1].bpm == Catch::Approx(100.0));

  const std::string csv = report_csv(rows);
  CHECK(csv.find("task_id,method") == 0);
  CHECK(csv.find("a_task,random") != std::string::npos);

  const auto empty_rows = aggregate_report({});
  CHECK(empty_rows.empty());
  const std::string empty_csv = report_csv(empty_rows);
  CHECK(empty_csv.find("task_id,method") == 0);

  RunSummary single = run_with({candidate({true}, {0.05})}, true);
  single.task_id = "solo";
  single.method = "saes";
  single.iterations = 7;
  const auto solo_rows = aggregate_report({single});
  REQUIRE(solo_rows.size() == 1);
  CHECK(solo_rows[0].mean_iterations == 7.0);
  CHECK(solo_rows[0].sr == 1.0);
}

TEST_CASE("sign test p-values match the binomial tail") {
  CHECK(sign_test_p_value(0, 0) == 1.0);
  CHECK(sign_test_p_value(1, 0) == Catch::Approx(0.5));
  CHECK(sign_test_p_value(5, 0) == Catch::Approx(1.0 / 32.0));
  // 8 wins out of 10: C(10,8)+C(10,9)+C(10,10) = 45+10+1 = 56 / 1024.
  CHECK(sign_test_p_value(8, 2) == Catch::Approx(56.0 / 1024.0).epsilon(1e-12));
}
