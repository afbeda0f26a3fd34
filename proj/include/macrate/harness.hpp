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

#ifndef MACRATE_HARNESS_HPP
#define MACRATE_HARNESS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "macrate/channel.hpp"
#include "macrate/policies.hpp"
#include "macrate/region.hpp"
#include "macrate/utility.hpp"

namespace macrate {

using Json = nlohmann::json;

// Floats are emitted with 17 significant digits so every CSV value
// round-trips bit-exactly.
std::string format_double(double x);

GaussianMacRegion region_from_json(const Json& j);
Json region_to_json(const GaussianMacRegion& region);

FadingProcess process_from_json(const Json& j);
Json process_to_json(const FadingProcess& process);

UtilityModel utility_from_json(const Json& j);

/// Documented chain presets: "high" (sigma_H/Hbar = 1.22), "mid" (0.50),
/// "low" (0.13); 4 gain levels, adjacent-move birth-death transitions,
/// stationary initial distribution, unit mean gain.
UserChain preset_chain(const std::string& name);
FadingProcess preset_process(const std::string& name, int users);

struct PolicySpec {
  std::string name;  // greedy | approximate | improved | queue
  Json params;
};

struct ExperimentSpec {
  std::string id = "experiment";
  Json process;
  Vec powers;
  double noise = 1.0;
  Json utility;
  std::vector<PolicySpec> policies;
  int horizon = 1000;
  int replications = 1;
  std::uint64_t seed = 1;
  long reference_samples = 200000;
  double greedy_tol = 1e-6;
  int greedy_max_iter = 2000;
};

ExperimentSpec experiment_from_json(const Json& j);
Json experiment_to_json(const ExperimentSpec& spec);

/// Scenario presets for the two-user comparisons: "fig5" (high variation,
/// greedy vs queue), "fig6-high", "fig6-low".
ExperimentSpec preset_experiment(const std::string& name);

struct PolicyOutcome {
  std::string policy;
  int policy_index = 0;
  int replication = 0;
  Vec final_avg_rates;
  double utility_at_avg = 0.0;
  std::vector<std::pair<int, double>> distance_checkpoints;  // (slot, |avg - R*|)
  double final_distance = 0.0;
  double max_tracking_distance = 0.0;  // vs the greedy trace, when present
  double wall_clock_ms = 0.0;
  std::string trace_path;
};

struct ExperimentResult {
  std::string id;
  Vec reference;             // R* over the averaged region (empty if M > 3)
  double reference_utility = 0.0;
  double sigma_sq = 0.0;
  double w_hat = 0.0;
  double w_bar = 0.0;
  std::vector<PolicyOutcome> outcomes;
};

Json result_to_json(const ExperimentResult& result, bool include_wall_clock = true);

std::string trace_to_csv(const PolicyTrace& trace);

/// Runs every policy of the spec over shared per-replication channel paths,
/// writes one trace CSV per (policy, replication) under out_dir (unless
/// empty), and returns the summary. The reference point is the brute-force
/// optimum over the Monte-Carlo averaged region.
ExperimentResult run_experiment(const ExperimentSpec& spec, const std::string& out_dir);

struct UploadSpec {
  std::string id = "upload";
  Vec files;  // nats
  PolicySpec policy;
  Json process;
  Vec powers;
  double noise = 1.0;
  Json utility;
  long horizon_cap = 200000;
  std::uint64_t seed = 1;
};

UploadSpec upload_from_json(const Json& j);

struct UploadResult {
  std::vector<long> completion_slots;  // -1 when unfinished
  Vec upload_rates;                    // f_i / T_i (delivered/horizon if unfinished)
  double utility = 0.0;
  bool all_finished = true;
  std::vector<int> unfinished;
};

UploadResult run_upload(const UploadSpec& spec);
Json upload_result_to_json(const UploadResult& result);

/// CSV sweep of the two parametric gap bounds (delta for the variation bound,
/// eps for the curvature bound) for a 2-user configuration.
std::string bound_curves_csv(const FadingProcess& process, const Vec& powers, double noise,
                             const UtilityModel& u, int n_points, std::uint64_t seed,
                             double a_override = 0.0, double b_override = 0.0);

/// All bound-calculator outputs for a configuration, as JSON.
Json bounds_report(const FadingProcess& process, const Vec& powers, double noise,
                   const UtilityModel& u, std::uint64_t seed);

}  // namespace macrate

#endif  // MACRATE_HARNESS_HPP
