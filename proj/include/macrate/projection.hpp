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

#ifndef MACRATE_PROJECTION_HPP
#define MACRATE_PROJECTION_HPP

#include <optional>
#include <vector>

#include "macrate/region.hpp"

namespace macrate {

/// A (possibly merged) set of users of a multiple-access configuration.
/// Merged entries carry the sum of their members' powers and rates.
struct ConfigEntry {
  double power = 0.0;            // received power
  double rate = 0.0;             // nats
  std::vector<int> members;      // original user indices, ascending
};

struct Configuration {
  std::vector<ConfigEntry> entries;
  double noise = 0.0;
};

/// Interference tolerable by a message at rate r with received power p:
/// the delta solving r = C(p, noise + delta). +inf for r == 0.
double elevation_of(double power, double rate, double noise);

/// Elevations of every entry of a configuration.
Vec elevation_of(const Configuration& config);

/// Outcome of the rate-splitting feasibility check. When feasible, the final
/// configuration's entries are reported in decoding order (first decoded
/// first); each entry's rate is at most the capacity of its power over noise
/// plus the total power of the entries decoded after it. `decoding_order`
/// expands the entries to original users; zero-rate users come last.
struct SpinoffResult {
  bool single_user_codable = false;
  std::vector<int> decoding_order;       // original users, feasible case
  std::vector<ConfigEntry> groups;       // final configuration, decoding order
  std::vector<int> violated;             // original-user subset, infeasible case
  double violation = 0.0;                // sum_{i in violated} r_i - rank (positive)
};

/// Rate-splitting feasibility oracle (O(M^2 log M)). Gains fold into received
/// powers h_i p_i at entry. Returns either a single-user-codable decoding
/// order (rates feasible) or a genuinely violated subset.
SpinoffResult rate_split_check(const Vec& powers, const Vec& rates, const Vec& gains,
                               double noise, double elevation_tol = 0.0);

/// Some violated constraint of the region at `rates`, or nullopt if feasible.
/// Primary path is the rate-splitting oracle.
std::optional<Subset> find_violated(const GaussianMacRegion& region, const Vec& rates,
                                    double elevation_tol = 0.0);

/// Orthogonal projection of y onto the hyperplane sum_{i in S} x_i = b:
/// subtract the equal share of the excess from each coordinate in S.
Vec project_onto_constraint(Vec y, Subset s, double b);

/// Approximate projection: successive hyperplane projections onto violated
/// constraints until none remains. Output is feasible and pseudo-nonexpansive;
/// never increases any coordinate. Negative inputs are clamped to 0 first.
/// If `projected` is non-null the sequence of projected subsets is appended.
Vec approximate_project(Vec y, const GaussianMacRegion& region,
                        std::vector<Subset>* projected = nullptr);

/// Number of violated constraints at y, by exhaustive enumeration.
int count_violations(const RegionOracle& region, const Vec& y, double tol = 0.0);

}  // namespace macrate

#endif  // MACRATE_PROJECTION_HPP
