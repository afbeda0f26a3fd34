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

#include <cmath>
#include <numeric>

#include "doctest.h"
#include "macrate/channel.hpp"
#include "macrate/rng.hpp"
#include "macrate/solvers.hpp"
#include "test_util.hpp"

using namespace macrate;
using macrate::testing::euclid;
using macrate::testing::random_region;

namespace {
GaussianMacRegion symmetric2() { return GaussianMacRegion({1, 1}, {1, 1}, 1.0); }
const double kHalfLn2 = 0.34657359027997264;
const double kHalfLn3 = 0.5493061443340549;
const double kHalfLn15 = 0.2027325540540822;
}  // namespace

TEST_CASE("alpha-fair value and subgradient") {
  CHECK(alpha_fair_value({1, 1}, 1.0, {1, 1}) == 0.0);
  Vec g = alpha_fair_subgradient({1, 1}, 1.0, {1, 1});
  CHECK(g == Vec{1, 1});

  CHECK(alpha_fair_value({1, 2}, 0.0, {0.3, 0.4}) == doctest::Approx(1.1).epsilon(1e-15));
  CHECK(alpha_fair_subgradient({1, 2}, 0.0, {0.3, 0.4}) == Vec{1, 2});

  CHECK(alpha_fair_value({1.5, 1.0}, 2.0, {0.60, 0.49}) ==
        doctest::Approx(-4.540816326530612).epsilon(1e-14));

  CHECK_THROWS(alpha_fair_value({1, 1}, 1.0, {0.0, 1.0}));
  CHECK_THROWS(alpha_fair_subgradient({1, 1}, 0.5, {0.0, 1.0}));
}

TEST_CASE("alpha-fair subgradient matches central differences") {
  Rng rng(9001);
  for (int trial = 0; trial < 50; ++trial) {
    int m = 1 + rng.uniform_int(4);
    Vec w(m), r(m);
    for (int i = 0; i < m; ++i) {
      w[i] = rng.uniform(0.5, 2.0);
      r[i] = rng.uniform(0.2, 1.5);
    }
    double alpha = rng.uniform(0.0, 3.0);
    Vec g = alpha_fair_subgradient(w, alpha, r);
    const double h = 1e-6;
    for (int i = 0; i < m; ++i) {
      Vec hi = r, lo = r;
      hi[i] += h;
      lo[i] -= h;
      double fd = (alpha_fair_value(w, alpha, hi) - alpha_fair_value(w, alpha, lo)) / (2 * h);
      CHECK(g[i] == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("utility model floors the effective domain") {
  UtilityModel u = UtilityModel::alpha_fair({1.5, 1.0}, 2.0, 0.1);
  CHECK(u.subgradient_bound() == doctest::Approx(150.0).epsilon(1e-12));
  Vec g = u.subgradient({0.0, 0.5});
  CHECK(g[0] == doctest::Approx(150.0).epsilon(1e-12));  // clamped at the floor
  CHECK(std::isfinite(u.value({0.0, 0.5})));
  // max curvature of -hessian: alpha w r^(-alpha-1)
  CHECK(u.max_curvature({0.5, 0.5}) == doctest::Approx(2.0 * 1.5 * std::pow(0.5, -3)));
  UtilityModel even = UtilityModel::alpha_fair({1.0, 1.0}, 2.0);
  CHECK(even.max_curvature({0.5, 0.5}) == doctest::Approx(16.0).epsilon(1e-12));
}

TEST_CASE("safe stepsize") {
  double a2 = safe_stepsize({1, 1}, 1.0, 1.0);
  CHECK(a2 == doctest::Approx(0.05085548606411348).epsilon(1e-14));
  CHECK(safe_stepsize({1, 1}, 1.0, 2.0) == doctest::Approx(a2 / 2).epsilon(1e-14));
  double a3 = safe_stepsize({1, 1, 1}, 1.0, 1.0);
  CHECK(a3 == doctest::Approx(0.01700051683554607).epsilon(1e-14));
  // Sorting is internal: permuted powers give the same value.
  CHECK(safe_stepsize({3, 1, 2}, 1.0, 1.0) ==
        doctest::Approx(safe_stepsize({1, 2, 3}, 1.0, 1.0)).epsilon(1e-15));
  CHECK_THROWS(safe_stepsize({1}, 1.0, 1.0));
}

TEST_CASE("gradient projection reaches the greedy vertex for linear utility") {
  GaussianMacRegion region = symmetric2();
  UtilityModel u = UtilityModel::linear({2, 1});
  SolveOptions opts;
  opts.max_iter = 60000;
  opts.tol = 1e-12;
  SolveReport rep =
      gradient_projection_solve(region, u, StepsizeRule::diminishing(0.05), {}, opts);
  CHECK(rep.rates[0] == doctest::Approx(kHalfLn2).epsilon(1e-4));
  CHECK(rep.rates[1] == doctest::Approx(kHalfLn15).epsilon(1e-4));
  CHECK(feasibility_report(region, rep.rates).empty());
}

TEST_CASE("gradient projection finds the symmetric proportional-fair point") {
  GaussianMacRegion region = symmetric2();
  UtilityModel u = UtilityModel::alpha_fair({1, 1}, 1.0);
  SolveOptions opts;
  opts.max_iter = 60000;
  opts.tol = 1e-12;
  SolveReport rep =
      gradient_projection_solve(region, u, StepsizeRule::diminishing(0.05), {}, opts);
  CHECK(rep.rates[0] == doctest::Approx(kHalfLn3 / 2).epsilon(2e-4));
  CHECK(rep.rates[1] == doctest::Approx(kHalfLn3 / 2).epsilon(2e-4));
}

TEST_CASE("gradient projection started at the optimum stops on stagnation") {
  GaussianMacRegion region = symmetric2();
  UtilityModel u = UtilityModel::alpha_fair({1, 1}, 1.0);
  Vec opt{kHalfLn3 / 2, kHalfLn3 / 2};
  SolveOptions opts;
  opts.max_iter = 10000;
  opts.tol = 1e-9;
  SolveReport rep =
      gradient_projection_solve(region, u, StepsizeRule::diminishing(0.01), opt, opts);
  CHECK(rep.converged);
  CHECK(rep.iterations <= 2 * opts.stagnation_window + 2);
  CHECK(euclid(rep.rates, opt) < 1e-6);
}

TEST_CASE("strict distance decrease under the sufficient stepsize condition") {
  // Iterates whose stepsize satisfies the sufficient condition (with margin)
  // move strictly closer to the optimum.
  GaussianMacRegion region = symmetric2();
  UtilityModel u = UtilityModel::alpha_fair({1.5, 1.0}, 2.0, 0.05);
  Vec r_star = brute_force_optimum(region, u);
  double u_star = u.value(r_star);
  SolveOptions opts;
  opts.max_iter = 300;
  opts.tol = 0.0;
  opts.record_iterates = true;
  const double a0 = 5e-4;
  SolveReport rep =
      gradient_projection_solve(region, u, StepsizeRule::diminishing(a0), {0.15, 0.35}, opts);
  int checked = 0;
  for (std::size_t k = 0; k + 1 < rep.iterates.size(); ++k) {
    Vec g = u.subgradient(rep.iterates[k]);
    double gnorm2 = std::inner_product(g.begin(), g.end(), g.begin(), 0.0);
    double alpha_k = a0 / (k + 1);
    double margin = 2.0 * (u_star - u.value(rep.iterates[k])) / gnorm2;
    if (margin <= 0 || alpha_k >= 0.9 * margin) continue;
    // Subgradient inequality at the iterate (concavity).
    double lhs = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) lhs += (r_star[i] - rep.iterates[k][i]) * g[i];
    CHECK(lhs >= u_star - u.value(rep.iterates[k]) - 1e-10);
    CHECK(euclid(rep.iterates[k + 1], r_star) < euclid(rep.iterates[k], r_star) + 1e-15);
    ++checked;
  }
  CHECK(checked > 10);
}

TEST_CASE("conditional gradient with a linear utility converges in one iteration") {
  GaussianMacRegion region = symmetric2();
  UtilityModel u = UtilityModel::linear({2, 1});
  SolveOptions opts;
  opts.max_iter = 50;
  opts.tol = 1e-10;
  Vec start{0.1, 0.1};
  SolveReport rep = conditional_gradient_solve(region, u, start, opts);
  CHECK(rep.rates[0] == doctest::Approx(kHalfLn2).epsilon(1e-9));
  CHECK(rep.rates[1] == doctest::Approx(kHalfLn15).epsilon(1e-8));
  CHECK(rep.iterations <= 2);
}

TEST_CASE("conditional gradient matches gradient projection on a constant-channel region") {
  UserChain constant{{1.0}, {{1.0}}, {1.0}};
  FadingProcess process({constant, constant});
  AveragedRegion averaged = estimate_averaged_region(process, {1, 1}, 1.0, 16, 3);
  UtilityModel u = UtilityModel::alpha_fair({1, 1}, 2.0);
  SolveOptions cg_opts;
  cg_opts.max_iter = 40000;
  cg_opts.tol = 1e-10;
  SolveReport cg = conditional_gradient_solve(averaged, u, {0.2, 0.2}, cg_opts);

  GaussianMacRegion region({1, 1}, {1, 1}, 1.0);
  SolveOptions gp_opts;
  gp_opts.max_iter = 60000;
  gp_opts.tol = 1e-12;
  SolveReport gp =
      gradient_projection_solve(region, u, StepsizeRule::diminishing(0.02), {}, gp_opts);
  CHECK(euclid(cg.rates, gp.rates) < 1e-4);

  // Frank-Wolfe gap sequence: nonnegative, and the utility never decreases
  // under the limited-maximization stepsize.
  for (double g : cg.gaps) CHECK(g >= -1e-12);
  for (std::size_t k = 1; k < cg.utilities.size(); ++k) {
    CHECK(cg.utilities[k] >= cg.utilities[k - 1] - 1e-12);
  }
  CHECK(cg.gaps.back() < 2e-6);
  CHECK_THROWS(conditional_gradient_solve(
      averaged, UtilityModel::custom([](const Vec&) { return 0.0; },
                                     [](const Vec& r) { return Vec(r.size(), 0.0); },
                                     /*differentiable=*/false, 1.0)));
}

TEST_CASE("brute force oracle") {
  GaussianMacRegion region = symmetric2();
  UtilityModel lin = UtilityModel::linear({2, 1});
  Vec bf = brute_force_optimum(region, lin);
  Vec greedy = linear_maximize(region, {2, 1});
  CHECK(euclid(bf, greedy) < 1e-6);

  UtilityModel sym = UtilityModel::alpha_fair({1, 1}, 1.0);
  Vec s = brute_force_optimum(region, sym);
  CHECK(s[0] == doctest::Approx(s[1]).epsilon(1e-7));

  // Reference optimum for the acceptance comparisons.
  UtilityModel u2 = UtilityModel::alpha_fair({1.5, 1.0}, 2.0);
  Vec r = brute_force_optimum(region, u2);
  CHECK(r[0] + r[1] == doctest::Approx(kHalfLn3).epsilon(1e-12));
  CHECK(r[0] == doctest::Approx(0.3023986668081213).epsilon(1e-6));

  GaussianMacRegion three({1, 1, 1}, {1, 1, 1}, 1.0);
  Vec t = brute_force_optimum(three, UtilityModel::alpha_fair({1, 1, 1}, 2.0), 400);
  CHECK(t[0] == doctest::Approx(t[1]).epsilon(1e-5));
  CHECK(t[1] == doctest::Approx(t[2]).epsilon(1e-5));
  CHECK_THROWS(brute_force_optimum(GaussianMacRegion({1, 1, 1, 1}, {1, 1, 1, 1}, 1.0),
                                   UtilityModel::linear({1, 1, 1, 1})));
}

TEST_CASE("safe stepsize keeps pre-projection violations at most M") {
  Rng rng(9002);
  for (int trial = 0; trial < 6; ++trial) {
    int m = 3 + rng.uniform_int(3);
    GaussianMacRegion region = random_region(rng, m);
    Vec mu(m);
    for (int i = 0; i < m; ++i) mu[i] = rng.uniform(0.2, 2.0);
    UtilityModel u = UtilityModel::linear(mu);
    double b = std::sqrt(std::inner_product(mu.begin(), mu.end(), mu.begin(), 0.0));
    double alpha = safe_stepsize(region.effective_powers(), region.noise(), b);
    SolveOptions opts;
    opts.max_iter = 60;
    opts.tol = 0.0;
    opts.count_violations = true;
    SolveReport rep =
        gradient_projection_solve(region, u, StepsizeRule::constant(alpha), {}, opts);
    for (int c : rep.violation_counts) CHECK(c <= m);
  }
}
