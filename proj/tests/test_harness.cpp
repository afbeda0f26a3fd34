// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "macrate/harness.hpp"
#include "test_util.hpp"

using namespace macrate;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    std::vector<std::string> row;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(cell);
    rows.push_back(std::move(row));
  }
  return rows;
}

Json tiny_experiment(const std::string& id, int horizon, int reps) {
  return Json{{"id", id},
              {"preset_process", "mid"},
              {"users", 2},
              {"powers", {1.0, 1.0}},
              {"noise", 1.0},
              {"utility",
               {{"kind", "alpha_fair"}, {"alpha", 2.0}, {"weights", {1.5, 1.0}},
                {"r_min", 0.001}}},
              {"policies", Json::array({Json{{"name", "greedy"}},
                                        Json{{"name", "queue"},
                                             {"K", 4.0},
                                             {"D", 2.0},
                                             {"arrivals", "deterministic"}}})},
              {"horizon", horizon},
              {"replications", reps},
              {"seed", 777},
              {"reference_samples", 20000},
              {"greedy_max_iter", 400}};
}

}  // namespace

TEST_CASE("region and process JSON round-trips") {
  Json rj{{"powers", {1.0, 2.0}}, {"gains", {0.5, 1.5}}, {"noise", 1.3}};
  GaussianMacRegion region = region_from_json(rj);
  CHECK(region_to_json(region) == rj);
  CHECK_THROWS(region_from_json(Json{{"powers", {1.0}}}));  // missing noise

  FadingProcess process = preset_process("mid", 2);
  Json pj = process_to_json(process);
  FadingProcess back = process_from_json(pj);
  CHECK(process_to_json(back) == pj);
  CHECK(back.stationary(0) == process.stationary(0));

  UtilityModel u = utility_from_json(Json{
      {"kind", "alpha_fair"}, {"alpha", 2.0}, {"weights", {1.5, 1.0}}, {"r_min", 0.01}});
  CHECK(u.alpha() == 2.0);
  CHECK(u.rate_floor() == 0.01);
  CHECK_THROWS(utility_from_json(Json{{"kind", "nope"}, {"weights", {1.0}}}));
}

TEST_CASE("format_double round-trips bit-exactly") {
  Rng rng(1717);
  for (int i = 0; i < 200; ++i) {
    double x = (rng.uniform() - 0.5) * std::pow(10.0, rng.uniform(-8, 8));
    CHECK(std::stod(format_double(x)) == x);
  }
}

TEST_CASE("experiment presets parse") {
  for (const char* name : {"fig5", "fig6-high", "fig6-low"}) {
    ExperimentSpec spec = preset_experiment(name);
    CHECK(spec.policies.size() == 2);
    CHECK(spec.horizon == 1000);
    FadingProcess p = process_from_json(spec.process);
    CHECK(p.num_users() == 2);
  }
  CHECK_THROWS(preset_experiment("nope"));
}

TEST_CASE("policies in one experiment consume identical channel paths") {
  ExperimentSpec spec = experiment_from_json(tiny_experiment("share", 40, 1));
  auto dir = std::filesystem::temp_directory_path() / "macrate_share_test";
  std::filesystem::remove_all(dir);
  ExperimentResult result = run_experiment(spec, dir.string());
  REQUIRE(result.outcomes.size() == 2);
  auto a = parse_csv(slurp(dir / result.outcomes[0].trace_path));
  auto b = parse_csv(slurp(dir / result.outcomes[1].trace_path));
  REQUIRE(a.size() == b.size());
  for (std::size_t r = 1; r < a.size(); ++r) {
    CHECK(a[r][1] == b[r][1]);  // h_1 column, textual (bitwise) equality
    CHECK(a[r][2] == b[r][2]);  // h_2
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("summary fields are recomputable from the trace CSV") {
  ExperimentSpec spec = experiment_from_json(tiny_experiment("recompute", 60, 1));
  auto dir = std::filesystem::temp_directory_path() / "macrate_recompute_test";
  std::filesystem::remove_all(dir);
  ExperimentResult result = run_experiment(spec, dir.string());
  UtilityModel u = utility_from_json(spec.utility);
  FadingProcess process = process_from_json(spec.process);
  for (const PolicyOutcome& o : result.outcomes) {
    auto rows = parse_csv(slurp(dir / o.trace_path));
    REQUIRE(rows.size() == static_cast<std::size_t>(spec.horizon) + 1);
    const auto& last = rows.back();
    // Columns: n, h1, h2, r1, r2, utility, avg1, avg2, q1, q2, iters.
    Vec avg{std::stod(last[6]), std::stod(last[7])};
    CHECK(avg[0] == o.final_avg_rates[0]);
    CHECK(avg[1] == o.final_avg_rates[1]);
    CHECK(u.value(avg) == o.utility_at_avg);
    // Every emitted rate row is feasible in the region of its slot.
    for (std::size_t r = 1; r < rows.size(); ++r) {
      GaussianMacRegion region(spec.powers, {std::stod(rows[r][1]), std::stod(rows[r][2])},
                               spec.noise);
      Vec rates{std::stod(rows[r][3]), std::stod(rows[r][4])};
      CHECK(feasibility_report(region, rates).empty());
    }
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("experiment runs are bitwise reproducible") {
  ExperimentSpec spec = experiment_from_json(tiny_experiment("det", 50, 2));
  auto dir1 = std::filesystem::temp_directory_path() / "macrate_det1";
  auto dir2 = std::filesystem::temp_directory_path() / "macrate_det2";
  std::filesystem::remove_all(dir1);
  std::filesystem::remove_all(dir2);
  ExperimentResult r1 = run_experiment(spec, dir1.string());
  ExperimentResult r2 = run_experiment(spec, dir2.string());
  for (std::size_t i = 0; i < r1.outcomes.size(); ++i) {
    CHECK(slurp(dir1 / r1.outcomes[i].trace_path) == slurp(dir2 / r2.outcomes[i].trace_path));
  }
  CHECK(result_to_json(r1, false) == result_to_json(r2, false));
  std::filesystem::remove_all(dir1);
  std::filesystem::remove_all(dir2);
}

TEST_CASE("adding replications never perturbs existing ones") {
  ExperimentSpec one = experiment_from_json(tiny_experiment("reps", 40, 1));
  ExperimentSpec two = experiment_from_json(tiny_experiment("reps", 40, 3));
  ExperimentResult r1 = run_experiment(one, "");
  ExperimentResult r2 = run_experiment(two, "");
  // Replication 0 outcomes are identical in both runs (counter-based seeds).
  CHECK(r1.outcomes[0].final_avg_rates == r2.outcomes[0].final_avg_rates);
  CHECK(r1.outcomes[1].final_avg_rates == r2.outcomes[1].final_avg_rates);
}

TEST_CASE("experiment runner derives tracking parameters in auto mode") {
  Json j = tiny_experiment("auto", 50, 1);
  j["policies"] = Json::array(
      {Json{{"name", "greedy"}},
       Json{{"name", "approximate"}, {"auto", true}, {"A", 2.0}, {"B", 30.0}},
       Json{{"name", "improved"}, {"auto", true}, {"A", 2.0}, {"B", 30.0}}});
  ExperimentResult result = run_experiment(experiment_from_json(j), "");
  REQUIRE(result.outcomes.size() == 3);
  for (const PolicyOutcome& o : result.outcomes) {
    CHECK(o.final_avg_rates.size() == 2);
  }
  // Tracking distances against the shared greedy trace are recorded.
  CHECK(result.outcomes[1].max_tracking_distance > 0.0);
  CHECK(result.outcomes[2].max_tracking_distance > 0.0);
}

TEST_CASE("upload: single user on a constant channel completes in ceil(f/c) slots") {
  Json spec_json{{"files", {10.0}},
                 {"policy", {{"name", "greedy"}}},
                 {"process", {{"users", Json::array({Json{{"states", {1.0}},
                                                          {"transition", {{1.0}}},
                                                          {"initial", {1.0}}}})}}},
                 {"powers", {1.0}},
                 {"noise", 1.0},
                 {"utility", {{"kind", "alpha_fair"}, {"alpha", 2.0}, {"weights", {1.0}}}},
                 {"horizon_cap", 1000},
                 {"seed", 3}};
  UploadResult r = run_upload(upload_from_json(spec_json));
  CHECK(r.all_finished);
  CHECK(r.completion_slots[0] == 29);  // ceil(10 / ((1/2) ln 2))
  CHECK(r.upload_rates[0] == doctest::Approx(10.0 / 29.0).epsilon(1e-12));
}

TEST_CASE("upload: exchangeable users with equal files finish together under greedy") {
  Json spec_json{{"files", {6.0, 6.0}},
                 {"policy", {{"name", "greedy"}}},
                 {"preset_process", "low"},
                 {"powers", {1.0, 1.0}},
                 {"noise", 1.0},
                 {"utility", {{"kind", "alpha_fair"}, {"alpha", 2.0}, {"weights", {1.0, 1.0}}}},
                 {"horizon_cap", 2000},
                 {"seed", 5}};
  UploadResult r = run_upload(upload_from_json(spec_json));
  CHECK(r.all_finished);
  CHECK(std::abs(r.completion_slots[0] - r.completion_slots[1]) <= 2);
}

TEST_CASE("upload reports unfinished users at the horizon cap") {
  Json spec_json{{"files", {50.0}},
                 {"policy", {{"name", "queue"}, {"K", 4.0}, {"D", 2.0}}},
                 {"process", {{"users", Json::array({Json{{"states", {1.0}},
                                                          {"transition", {{1.0}}},
                                                          {"initial", {1.0}}}})}}},
                 {"powers", {1.0}},
                 {"noise", 1.0},
                 {"utility", {{"kind", "alpha_fair"}, {"alpha", 2.0}, {"weights", {1.0}}}},
                 {"horizon_cap", 10},
                 {"seed", 3}};
  UploadResult r = run_upload(upload_from_json(spec_json));
  CHECK_FALSE(r.all_finished);
  CHECK(r.unfinished == std::vector<int>{0});
  CHECK(r.completion_slots[0] == -1);
}

TEST_CASE("bound curve sweep has the documented shape") {
  FadingProcess process = preset_process("low", 2);
  UtilityModel u = UtilityModel::alpha_fair({1.0, 1.0}, 0.5, 0.01);
  std::string csv = bound_curves_csv(process, {1, 1}, 1.0, u, 24, 5, 1.0, 1.0);
  auto rows = parse_csv(csv);
  REQUIRE(rows.size() == 25);
  CHECK(rows[0] == std::vector<std::string>{"delta", "variation_bound", "eps", "r_eps",
                                            "curvature_bound"});
  // Interior minimum of the variation bound over the sweep.
  std::size_t argmin = 1;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (std::stod(rows[r][1]) < std::stod(rows[argmin][1])) argmin = r;
  }
  CHECK(argmin > 1);
  CHECK(argmin < rows.size() - 1);
}

TEST_CASE("bound curves for a constant channel keep only the distance term") {
  UserChain constant{{1.0}, {{1.0}}, {1.0}};
  FadingProcess process({constant, constant});
  UtilityModel u = UtilityModel::alpha_fair({1.0, 1.0}, 0.5, 0.01);
  std::string csv = bound_curves_csv(process, {1, 1}, 1.0, u, 16, 5);
  auto rows = parse_csv(csv);
  // sigma = 0: the deviation probability vanishes and the variation bound is
  // the distance term alone, monotone in delta.
  for (std::size_t r = 2; r < rows.size(); ++r) {
    CHECK(std::stod(rows[r][1]) > std::stod(rows[r - 1][1]));
  }
}

TEST_CASE("bounds report") {
  FadingProcess process = preset_process("low", 2);
  UtilityModel u = UtilityModel::alpha_fair({1.5, 1.0}, 2.0, 0.05);
  Json report = bounds_report(process, {1, 1}, 1.0, u, 11);
  CHECK(report.contains("sigma_sq"));
  CHECK(report.contains("average_case"));
  CHECK(report["w_hat"].get<double>() >= report["w_bar"].get<double>());
}
