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

#include "doctest.h"
#include "macrate/channel.hpp"
#include "macrate/harness.hpp"
#include "macrate/rng.hpp"
#include "test_util.hpp"

using namespace macrate;

namespace {
UserChain symmetric_two_state(double q) {
  return UserChain{{0.5, 1.5}, {{1 - q, q}, {q, 1 - q}}, {0.5, 0.5}};
}
}  // namespace

TEST_CASE("fading process validation") {
  CHECK_THROWS(FadingProcess({UserChain{{1.0, 2.0}, {{0.5, 0.4}, {0.5, 0.5}}, {0.5, 0.5}}}));
  CHECK_THROWS(FadingProcess({UserChain{{-1.0}, {{1.0}}, {1.0}}}));
  // Reducible with mass on both classes: rejected.
  CHECK_THROWS(FadingProcess({UserChain{{1.0, 2.0}, {{1.0, 0.0}, {0.0, 1.0}}, {0.5, 0.5}}}));
  // Reducible with a point mass on an absorbing state: a valid constant chain.
  FadingProcess constant({UserChain{{1.0, 2.0}, {{1.0, 0.0}, {0.0, 1.0}}, {1.0, 0.0}}});
  ChannelPath path = sample_path(constant, 50, 5);
  for (int t = 0; t < 50; ++t) CHECK(path.gains[t][0] == 1.0);
}

TEST_CASE("single-state and frozen chains give constant paths") {
  FadingProcess single({UserChain{{0.8}, {{1.0}}, {1.0}}});
  ChannelPath path = sample_path(single, 20, 1);
  for (const Vec& h : path.gains) CHECK(h[0] == 0.8);
}

TEST_CASE("empirical state frequencies match the stationary distribution") {
  FadingProcess process({preset_chain("mid")});
  const int n = 100000;
  ChannelPath path = sample_path(process, n, 2024);
  const UserChain& c = process.user(0);
  Vec counts(c.states.size(), 0.0);
  for (const Vec& h : path.gains) {
    for (std::size_t s = 0; s < c.states.size(); ++s) {
      if (h[0] == c.states[s]) counts[s] += 1.0;
    }
  }
  for (std::size_t s = 0; s < c.states.size(); ++s) {
    double pi_s = process.stationary(0)[s];
    double freq = counts[s] / n;
    // Markov-correlated samples: allow an inflated deviation band.
    double sigma = std::sqrt(pi_s * (1 - pi_s) / n);
    CHECK(std::abs(freq - pi_s) < 8.0 * sigma);
  }
}

TEST_CASE("path sampling is reproducible bitwise") {
  FadingProcess process = preset_process("high", 2);
  ChannelPath a = sample_path(process, 500, 77);
  ChannelPath b = sample_path(process, 500, 77);
  CHECK(a.gains == b.gains);
  ChannelPath c = sample_path(process, 500, 78);
  CHECK(a.gains != c.gains);
}

TEST_CASE("step statistics") {
  FadingProcess single({UserChain{{0.8}, {{1.0}}, {1.0}}});
  FadingStatistics st0 = step_statistics(single, {1.0});
  CHECK(st0.v_hat[0] == 0.0);
  CHECK(st0.w_hat == 0.0);
  CHECK(st0.w_bar == 0.0);

  double q = 0.3;
  FadingProcess two({symmetric_two_state(q)});
  FadingStatistics st = step_statistics(two, {1.0});
  CHECK(st.v_hat[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(st.w_hat == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(st.w_bar == doctest::Approx(0.5 * q).epsilon(1e-12));
  CHECK(st.mean[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(st.cov[0][0] == doctest::Approx(0.25).epsilon(1e-12));

  Rng rng(11001);
  for (int trial = 0; trial < 10; ++trial) {
    double qq = rng.uniform(0.05, 0.5);
    FadingProcess p({symmetric_two_state(qq), preset_chain("mid")});
    FadingStatistics s = step_statistics(p, {1.0, 2.0});
    CHECK(s.w_hat >= s.w_bar);
  }
}

TEST_CASE("sigma_H^2") {
  FadingProcess constant({UserChain{{1.0}, {{1.0}}, {1.0}}});
  FadingStatistics st0 = step_statistics(constant, {1.0});
  CHECK(sigma_H_squared(st0, {1.0}, 1.0) == 0.0);

  // Single-user case against an independently written scalar formula.
  FadingProcess two({symmetric_two_state(0.25)});
  FadingStatistics st = step_statistics(two, {2.0});
  double n0 = 1.3;
  double gamma = 2.0 / n0;
  double hbar = 1.0, var = 0.25;
  double g2 = gamma * gamma * var;
  double zbar = gamma * hbar;
  double bracket = (1 + zbar) * (std::sqrt(2 * std::log1p(zbar)) - std::sqrt(g2) / 2);
  double expected = 0.25 * g2 * (1 + bracket * bracket);
  CHECK(sigma_H_squared(st, {2.0}, n0) == doctest::Approx(expected).epsilon(1e-14));

  // Scaling K by c scales the quadratic-form factor by c exactly.
  FadingStatistics scaled = st;
  double c = 3.7;
  scaled.cov[0][0] *= c;
  double g2c = c * g2;
  double bracketc = (1 + zbar) * (std::sqrt(2 * std::log1p(zbar)) - std::sqrt(g2c) / 2);
  CHECK(sigma_H_squared(scaled, {2.0}, n0) ==
        doctest::Approx(0.25 * g2c * (1 + bracketc * bracketc)).epsilon(1e-14));
}

TEST_CASE("region deviation bound") {
  CHECK(region_deviation_bound(0.0, 0.5) == 0.0);
  CHECK(region_deviation_bound(0.01, 0.2) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(region_deviation_bound(10.0, 0.5) == 1.0);  // capped
  CHECK_THROWS(region_deviation_bound(0.1, 0.0));
}

TEST_CASE("region deviation bound holds empirically (small run)") {
  FadingProcess process = preset_process("low", 2);
  Vec powers{1.0, 1.0};
  double noise = 1.0;
  FadingStatistics st = step_statistics(process, powers);
  double sigma_sq = sigma_H_squared(st, powers, noise);
  AveragedRegion avg = exact_averaged_region(process, powers, noise);
  const int n = 20000;
  Rng rng(11002);
  for (double delta : {0.05, 0.1, 0.2}) {
    int exceed = 0;
    for (int s = 0; s < n; ++s) {
      Vec h(2);
      for (int i = 0; i < 2; ++i) {
        h[i] = process.user(i).states[rng.categorical(process.stationary(i))];
      }
      GaussianMacRegion inst(powers, h, noise);
      if (region_distance(inst, avg) > delta) ++exceed;
    }
    double bound = region_deviation_bound(sigma_sq, delta);
    double p_hat = static_cast<double>(exceed) / n;
    double slack = 3.0 * std::sqrt(std::max(p_hat, 1e-4) / n);
    CHECK(p_hat <= bound + slack);
  }
}

TEST_CASE("jensen gap bound") {
  CHECK(jensen_gap_bound(std::log(2.0), 0.0, 1.0) == 0.0);
  CHECK(jensen_gap_bound(std::log(2.0), 0.1, 1.0) ==
        doctest::Approx(0.3223297411059034).epsilon(1e-14));
  CHECK_THROWS(jensen_gap_bound(1.0, -0.1, 1.0));

  // Two-point distributions, exact Jensen difference vs the bound.
  Rng rng(11003);
  for (int trial = 0; trial < 200; ++trial) {
    double x1 = rng.uniform(0.1, 2.0), x2 = rng.uniform(0.1, 2.0);
    double p = rng.uniform(0.1, 0.9);
    double mean = p * x1 + (1 - p) * x2;
    double var = p * x1 * x1 + (1 - p) * x2 * x2 - mean * mean;
    auto f = [](double x) { return std::log1p(x); };
    double gap = f(mean) - (p * f(x1) + (1 - p) * f(x2));
    double curvature = 1.0 / ((1.0 + std::min(x1, x2)) * (1.0 + std::min(x1, x2)));
    CHECK(gap <= jensen_gap_bound(f(mean), var, curvature) + 1e-12);
  }
}

TEST_CASE("log variance bound") {
  CHECK(log_variance_bound(1.0, 0.0) == 0.0);
  CHECK(log_variance_bound(1.0, 0.04) == doctest::Approx(0.22572997705868728).epsilon(1e-14));
  CHECK_THROWS(log_variance_bound(1.0, -0.1));

  Rng rng(11004);
  for (int trial = 0; trial < 200; ++trial) {
    double x1 = rng.uniform(0.1, 2.0), x2 = rng.uniform(0.1, 2.0);
    double p = rng.uniform(0.1, 0.9);
    double mean = p * x1 + (1 - p) * x2;
    double var = p * x1 * x1 + (1 - p) * x2 * x2 - mean * mean;
    auto f = [](double x) { return std::log1p(x); };
    double fmean = p * f(x1) + (1 - p) * f(x2);
    double fvar = p * f(x1) * f(x1) + (1 - p) * f(x2) * f(x2) - fmean * fmean;
    CHECK(fvar <= log_variance_bound(mean, var) + 1e-12);
  }
}

TEST_CASE("one-slot region distance is bounded by the realized step and w_hat") {
  FadingProcess process = preset_process("mid", 2);
  Vec powers{1.0, 1.0};
  FadingStatistics st = step_statistics(process, powers);
  ChannelPath path = sample_path(process, 10000, 909);
  for (int t = 0; t + 1 < path.length(); ++t) {
    GaussianMacRegion a(powers, path.gains[t], 1.0);
    GaussianMacRegion b(powers, path.gains[t + 1], 1.0);
    double w = realized_step(path.gains[t], path.gains[t + 1], powers);
    CHECK(region_distance(a, b) <= w + 1e-12);
    CHECK(w <= st.w_hat + 1e-12);
  }
}

TEST_CASE("preset chains hit the documented variation ratios") {
  for (auto [name, target] : {std::pair<const char*, double>{"high", 1.22},
                              {"mid", 0.50},
                              {"low", 0.13}}) {
    FadingProcess p({preset_chain(name)});
    double ratio = std::sqrt(p.stationary_var(0)) / p.stationary_mean(0);
    CHECK(ratio == doctest::Approx(target).epsilon(1e-6));
    CHECK(p.stationary_mean(0) == doctest::Approx(1.0).epsilon(1e-9));
  }
}
