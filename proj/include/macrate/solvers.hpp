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

#ifndef MACRATE_SOLVERS_HPP
#define MACRATE_SOLVERS_HPP

#include <vector>

#include "macrate/projection.hpp"
#include "macrate/region.hpp"
#include "macrate/utility.hpp"

namespace macrate {

struct SolveOptions {
  int max_iter = 20000;
  double tol = 1e-9;            // stagnation threshold (gradient projection)
                                // or duality-gap threshold (conditional gradient)
  int stagnation_window = 20;
  bool record_iterates = false;
  bool count_violations = false;  // exhaustive; M <= 20
};

struct SolveReport {
  Vec rates;                        // best iterate by utility
  double utility = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> utilities;    // u(R^k) per iteration
  std::vector<int> violation_counts;  // pre-projection violations, if requested
  std::vector<Vec> iterates;          // per-iteration points, if requested
  std::vector<double> gaps;           // conditional gradient duality gaps
};

/// Safe constant stepsize
///   (1/(4 B sqrt(M))) ln(1 + P1 P2 / ((N0 + sum_{i>=3} P_i)(N0 + sum_i P_i)))
/// for received powers sorted ascending. Guarantees at most M violated
/// constraints at every pre-projection iterate.
double safe_stepsize(Vec effective_powers, double noise, double subgradient_bound);

/// Equal split of the full-set rank, projected to feasibility.
Vec default_start(const GaussianMacRegion& region);

/// Projected subgradient ascent with approximate projection:
/// R^{k+1} = approx_project(R^k + alpha_k g^k). Stops when the best utility
/// improves by less than tol over a stagnation window; reports the best
/// iterate (subgradient methods are not monotone).
SolveReport gradient_projection_solve(const GaussianMacRegion& region, const UtilityModel& u,
                                      const StepsizeRule& rule, Vec start = {},
                                      const SolveOptions& opts = {});

/// Conditional gradient (Frank-Wolfe) over any region with a linear
/// maximization oracle. Stepsize by limited maximization over [0,1]
/// (golden section, 40 evaluations); stops when the duality gap
/// grad' (Rbar - R) drops below tol.
SolveReport conditional_gradient_solve(const RegionOracle& region, const UtilityModel& u,
                                       Vec start = {}, const SolveOptions& opts = {});

/// Independent oracle: dense grid search over the dominant face refined by
/// local coordinate descent. M <= 3.
Vec brute_force_optimum(const RegionOracle& region, const UtilityModel& u, int grid_n = 2000);

}  // namespace macrate

#endif  // MACRATE_SOLVERS_HPP
