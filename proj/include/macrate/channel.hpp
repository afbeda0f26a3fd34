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

#ifndef MACRATE_CHANNEL_HPP
#define MACRATE_CHANNEL_HPP

#include <cstdint>
#include <vector>

#include "macrate/region.hpp"

namespace macrate {

/// One user's finite-state Markov fading chain (linear gain levels).
struct UserChain {
  Vec states;                       // gain level per state, >= 0
  std::vector<Vec> transition;     // row-stochastic
  Vec initial;                      // initial distribution
};

/// Independent per-user finite-state Markov fading. Chains are validated
/// (stochastic rows, irreducibility) and the per-user stationary distribution
/// is computed at construction.
class FadingProcess {
 public:
  explicit FadingProcess(std::vector<UserChain> users);

  int num_users() const { return static_cast<int>(users_.size()); }
  const UserChain& user(int i) const { return users_[i]; }
  const Vec& stationary(int i) const { return stationary_[i]; }

  double stationary_mean(int i) const;
  double stationary_var(int i) const;

 private:
  std::vector<UserChain> users_;
  std::vector<Vec> stationary_;
};

/// Temporal-variation and second-order statistics of a fading process.
struct FadingStatistics {
  Vec mean;                      // stationary mean gains
  std::vector<Vec> cov;          // stationary covariance (diagonal: users independent)
  Vec v_hat;                     // per-user maximum one-step gain change
  double w_bar = 0.0;            // E[W_n], exact from the chain
  double w_hat = 0.0;            // (1/2) sum_i v_hat_i p_i, upper bound on W_n
};

struct ChannelPath {
  int num_users = 0;
  std::vector<Vec> gains;        // gains[slot][user]
  std::uint64_t seed = 0;

  int length() const { return static_cast<int>(gains.size()); }
};

ChannelPath sample_path(const FadingProcess& process, int n, std::uint64_t seed);

FadingStatistics step_statistics(const FadingProcess& process, const Vec& powers);

/// Region-deviation variance parameter: (1/4) sum_S G_S' K G_S
/// (1 + [(1 + G_S' Hbar)(sqrt(2 ln(1 + G_S' Hbar)) - sqrt(G_S' K G_S)/2)]^2)
/// with (G_S)_i = P_i/N0 on S.
double sigma_H_squared(const FadingStatistics& stats, const Vec& powers, double noise);

/// Chebyshev-style bound on P(d_H(C_g, C_a) > delta): min(1, sigma^2/delta^2).
double region_deviation_bound(double sigma_sq, double delta);

/// Upper bound on Jensen's difference f(E[X]) - E[f(X)] for concave f with
/// |f''| <= curvature: sqrt(2 curvature var f(E[X])) - var curvature / 2.
double jensen_gap_bound(double f_mean_value, double var_x, double curvature);

/// Upper bound on var(ln(1+X)):
/// var_x (1 + [(1+xbar)(sqrt(2 ln(1+xbar)) - sqrt(var_x)/2)]^2).
double log_variance_bound(double x_bar, double var_x);

/// Realized one-slot region-distance bound W_n = (1/2) sum_i |h_i' - h_i| p_i.
double realized_step(const Vec& h_now, const Vec& h_next, const Vec& powers);

}  // namespace macrate

#endif  // MACRATE_CHANNEL_HPP
