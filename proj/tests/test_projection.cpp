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
#include <limits>

#include "doctest.h"
#include "macrate/projection.hpp"
#include "macrate/rng.hpp"
#include "test_util.hpp"

using namespace macrate;
using macrate::testing::euclid;
using macrate::testing::exhaustive_feasible;
using macrate::testing::random_face_point;
using macrate::testing::random_region;

namespace {
const double kHalfLn2 = 0.34657359027997264;
const double kHalfLn3 = 0.5493061443340549;
const double kHalfLn15 = 0.2027325540540822;

GaussianMacRegion symmetric2() { return GaussianMacRegion({1, 1}, {1, 1}, 1.0); }
}  // namespace

TEST_CASE("elevation") {
  // Single user exactly at capacity tolerates no extra interference.
  CHECK(elevation_of(1.0, 0.5 * std::log(2.0), 1.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(elevation_of(1.0, 0.25 * std::log(2.0), 1.0) ==
        doctest::Approx(1.4142135623730945).epsilon(1e-12));
  CHECK(elevation_of(1.0, 0.5 * std::log(3.0), 1.0) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK_THROWS(elevation_of(0.0, 0.1, 1.0));
  Configuration config{{{1.0, 0.0, {0}}, {2.0, 0.1, {1}}}, 1.0};
  Vec elev = elevation_of(config);
  CHECK(std::isinf(elev[0]));
  CHECK(elev[1] > 0.0);
}

TEST_CASE("rate split check on the two-user region") {
  GaussianMacRegion r = symmetric2();
  SpinoffResult bad = rate_split_check(r.powers(), {0.3, 0.3}, r.gains(), r.noise());
  CHECK_FALSE(bad.single_user_codable);
  CHECK(bad.violated == std::vector<int>{0, 1});
  CHECK(bad.violation == doctest::Approx(0.6 - kHalfLn3).epsilon(1e-12));

  SpinoffResult vertex =
      rate_split_check(r.powers(), {kHalfLn2, kHalfLn15}, r.gains(), r.noise());
  CHECK(vertex.single_user_codable);
  CHECK(vertex.decoding_order == std::vector<int>{1, 0});  // user 2 decoded first

  SpinoffResult zero = rate_split_check(r.powers(), {0.0, 0.0}, r.gains(), r.noise());
  CHECK(zero.single_user_codable);
  CHECK(zero.decoding_order.size() == 2);
}

TEST_CASE("zero-rate users are appended last and excluded from merging") {
  GaussianMacRegion r({1, 1, 1}, {1, 1, 1}, 1.0);
  SpinoffResult s = rate_split_check(r.powers(), {kHalfLn2, 0.0, 0.0}, r.gains(), r.noise());
  CHECK(s.single_user_codable);
  REQUIRE(s.decoding_order.size() == 3);
  CHECK(s.decoding_order[0] == 0);
  CHECK(s.decoding_order[1] == 1);
  CHECK(s.decoding_order[2] == 2);
  CHECK(s.groups.size() == 1);  // only the positive-rate user forms a group
}

TEST_CASE("positive rate with zero gain is immediately violated") {
  GaussianMacRegion r({1, 1}, {0, 1}, 1.0);
  SpinoffResult s = rate_split_check(r.powers(), {0.1, 0.1}, r.gains(), r.noise());
  CHECK_FALSE(s.single_user_codable);
  CHECK(s.violated == std::vector<int>{0});
}

TEST_CASE("single-user-codable groups certify feasibility constructively") {
  Rng rng(8001);
  for (int trial = 0; trial < 300; ++trial) {
    int m = 2 + rng.uniform_int(7);
    GaussianMacRegion region = random_region(rng, m);
    Vec pt = random_face_point(rng, region);
    double scale = rng.uniform(0.2, 1.0);
    for (double& x : pt) x *= scale;
    SpinoffResult s = rate_split_check(region.powers(), pt, region.gains(), region.noise());
    REQUIRE(s.single_user_codable);
    // Decode groups in the returned order; later groups act as interference.
    double undecoded = 0.0;
    for (const ConfigEntry& g : s.groups) undecoded += g.power;
    for (const ConfigEntry& g : s.groups) {
      undecoded -= g.power;
      CHECK(g.rate <= awgn_capacity(g.power, region.noise() + undecoded) + 1e-9);
    }
  }
}

TEST_CASE("rate-split verdict agrees with exhaustive enumeration") {
  Rng rng(8002);
  int infeasible_seen = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    int m = 2 + rng.uniform_int(7);
    GaussianMacRegion region = random_region(rng, m);
    Vec pt = random_face_point(rng, region);
    double scale = rng.uniform(0.5, 1.5);
    for (double& x : pt) x *= scale;
    bool feasible = exhaustive_feasible(region, pt);
    SpinoffResult s = rate_split_check(region.powers(), pt, region.gains(), region.noise());
    CHECK(s.single_user_codable == feasible);
    if (!s.single_user_codable) {
      ++infeasible_seen;
      // The certificate names a genuinely violated subset.
      double sum = 0.0, eff = 0.0;
      for (int i : s.violated) {
        sum += pt[i];
        eff += region.effective_power(i);
      }
      CHECK(sum > awgn_capacity(eff, region.noise()));
    }
  }
  CHECK(infeasible_seen > 400);  // the mix actually exercises both verdicts
}

TEST_CASE("find_violated matches the exhaustive separation oracle") {
  GaussianMacRegion r = symmetric2();
  CHECK_FALSE(find_violated(r, {0.1, 0.1}).has_value());
  auto v = find_violated(r, {0.3, 0.3});
  REQUIRE(v.has_value());
  CHECK(*v == 0b11);
  auto v2 = find_violated(r, {0.4, 0.1});
  REQUIRE(v2.has_value());
  CHECK((*v2 & 0b01) != 0);  // contains user 1

  Rng rng(8003);
  for (int trial = 0; trial < 500; ++trial) {
    int m = 2 + rng.uniform_int(7);
    GaussianMacRegion region = random_region(rng, m);
    Vec pt = random_face_point(rng, region);
    for (double& x : pt) x *= rng.uniform(0.5, 1.5);
    Subset argmin = 0;
    bool feasible = exhaustive_feasible(region, pt, &argmin);
    auto found = find_violated(region, pt);
    CHECK(found.has_value() == !feasible);
  }
}

TEST_CASE("hyperplane projection") {
  Vec p = project_onto_constraint({0.4, 0.4}, 0b11, kHalfLn3);
  CHECK(p[0] == doctest::Approx(0.2746530721670274).epsilon(1e-14));
  CHECK(p[1] == doctest::Approx(0.2746530721670274).epsilon(1e-14));
  Vec q = project_onto_constraint({0.2, 0.3}, 0b11, 0.5);
  CHECK(q[0] == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(q[1] == doctest::Approx(0.3).epsilon(1e-15));
  Vec r = project_onto_constraint({0.5, 0.1}, 0b01, kHalfLn2);
  CHECK(r[0] == doctest::Approx(kHalfLn2).epsilon(1e-15));
  CHECK(r[1] == 0.1);
  CHECK_THROWS(project_onto_constraint({0.1}, 0, 0.0));
}

TEST_CASE("approximate projection examples") {
  GaussianMacRegion r = symmetric2();
  Vec same = approximate_project({0.1, 0.2}, r);
  CHECK(same[0] == 0.1);
  CHECK(same[1] == 0.2);
  Vec proj = approximate_project({0.4, 0.4}, r);
  CHECK(proj[0] == doctest::Approx(0.2746530721670274).epsilon(1e-12));
  CHECK(proj[1] == doctest::Approx(0.2746530721670274).epsilon(1e-12));
  CHECK(feasibility_report(r, proj).empty());
  // Negative coordinates are clamped before projecting.
  Vec neg = approximate_project({-0.3, 0.2}, r);
  CHECK(neg[0] == 0.0);
  CHECK(neg[1] == 0.2);
}

TEST_CASE("approximate projection is feasible, pseudo-nonexpansive, monotone") {
  Rng rng(8004);
  for (int trial = 0; trial < 1000; ++trial) {
    int m = 2 + rng.uniform_int(5);
    GaussianMacRegion region = random_region(rng, m);
    Vec y(m);
    for (int i = 0; i < m; ++i) y[i] = rng.uniform(0.0, 1.5) * region.rank(Subset{1} << i);
    Vec proj = approximate_project(y, region);
    CHECK(feasibility_report(region, proj).empty());
    for (int i = 0; i < m; ++i) CHECK(proj[i] <= y[i] + 1e-15);  // never increases
    Vec z = random_face_point(rng, region);
    for (double& x : z) x *= rng.uniform(0.0, 1.0);  // random feasible point
    CHECK(euclid(proj, z) <= euclid(y, z) + 1e-9);
  }
}

TEST_CASE("count violations") {
  GaussianMacRegion r = symmetric2();
  CHECK(count_violations(r, {0.1, 0.1}) == 0);
  CHECK(count_violations(r, {0.4, 0.4}) == 3);
  CHECK(count_violations(r, {0.6, 0.0}) == 2);
}
