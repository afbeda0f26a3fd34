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

#include "macrate/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "macrate/rng.hpp"

namespace macrate {

namespace {

constexpr double kRowSumTol = 1e-12;

// Stationary distribution of a row-stochastic matrix: solve pi' T = pi',
// sum pi = 1 by Gaussian elimination on (T' - I) with the last equation
// replaced by the normalization.
Vec stationary_of(const std::vector<Vec>& T) {
  const int n = static_cast<int>(T.size());
  std::vector<Vec> a(n, Vec(n + 1, 0.0));
  for (int i = 0; i < n - 1; ++i) {
    for (int j = 0; j < n; ++j) a[i][j] = T[j][i] - (i == j ? 1.0 : 0.0);
    a[i][n] = 0.0;
  }
  for (int j = 0; j < n; ++j) a[n - 1][j] = 1.0;
  a[n - 1][n] = 1.0;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    }
    std::swap(a[piv], a[col]);
    if (std::abs(a[col][col]) < 1e-14) {
      throw std::invalid_argument("fading process: singular stationary system");
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      double f = a[r][col] / a[col][col];
      for (int c = col; c <= n; ++c) a[r][c] -= f * a[col][c];
    }
  }
  Vec pi(n);
  for (int i = 0; i < n; ++i) pi[i] = a[i][n] / a[i][i];
  for (double& p : pi) p = std::max(p, 0.0);
  double s = 0.0;
  for (double p : pi) s += p;
  for (double& p : pi) p /= s;
  return pi;
}

std::vector<int> reachable_from(const std::vector<Vec>& T, const Vec& initial) {
  const int n = static_cast<int>(T.size());
  std::vector<char> seen(n, 0);
  std::vector<int> stack;
  for (int s = 0; s < n; ++s) {
    if (initial[s] > 0) {
      seen[s] = 1;
      stack.push_back(s);
    }
  }
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int v = 0; v < n; ++v) {
      if (T[u][v] > 0 && !seen[v]) {
        seen[v] = 1;
        stack.push_back(v);
      }
    }
  }
  std::vector<int> out;
  for (int s = 0; s < n; ++s) {
    if (seen[s]) out.push_back(s);
  }
  return out;
}

bool irreducible_within(const std::vector<Vec>& T, const std::vector<int>& states) {
  // Strong connectivity of the restriction via forward+backward reachability.
  const int k = static_cast<int>(states.size());
  auto reach = [&](bool forward) {
    std::vector<char> seen(k, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int v = 0; v < k; ++v) {
        double p = forward ? T[states[u]][states[v]] : T[states[v]][states[u]];
        if (p > 0 && !seen[v]) {
          seen[v] = 1;
          stack.push_back(v);
        }
      }
    }
    return std::count(seen.begin(), seen.end(), 1) == k;
  };
  return reach(true) && reach(false);
}

}  // namespace

FadingProcess::FadingProcess(std::vector<UserChain> users) : users_(std::move(users)) {
  if (users_.empty()) throw std::invalid_argument("fading process: no users");
  for (std::size_t u = 0; u < users_.size(); ++u) {
    const UserChain& c = users_[u];
    const std::size_t n = c.states.size();
    if (n == 0) throw std::invalid_argument("fading process: empty state space");
    for (double h : c.states) {
      if (!std::isfinite(h) || h < 0) {
        throw std::invalid_argument("fading process: gains must be nonnegative");
      }
    }
    if (c.transition.size() != n) {
      throw std::invalid_argument("fading process: transition matrix shape");
    }
    for (const Vec& row : c.transition) {
      if (row.size() != n) throw std::invalid_argument("fading process: transition row size");
      double s = 0.0;
      for (double p : row) {
        if (!(p >= 0.0)) throw std::invalid_argument("fading process: negative probability");
        s += p;
      }
      if (std::abs(s - 1.0) > kRowSumTol) {
        throw std::invalid_argument("fading process: transition rows must sum to 1");
      }
    }
    if (c.initial.size() != n) {
      throw std::invalid_argument("fading process: initial distribution size");
    }
    double s0 = 0.0;
    for (double p : c.initial) {
      if (!(p >= 0.0)) throw std::invalid_argument("fading process: negative probability");
      s0 += p;
    }
    if (std::abs(s0 - 1.0) > 1e-9) {
      throw std::invalid_argument("fading process: initial distribution must sum to 1");
    }
    // Irreducibility is required on the closed class the initial distribution
    // can reach; a point mass on an absorbing state is a valid constant chain.
    std::vector<int> reachable = reachable_from(c.transition, c.initial);
    if (!irreducible_within(c.transition, reachable)) {
      throw std::invalid_argument("fading process: chain must be irreducible");
    }
    if (reachable.size() == n) {
      stationary_.push_back(n == 1 ? Vec{1.0} : stationary_of(c.transition));
    } else {
      std::vector<Vec> sub(reachable.size(), Vec(reachable.size()));
      for (std::size_t a = 0; a < reachable.size(); ++a) {
        for (std::size_t b = 0; b < reachable.size(); ++b) {
          sub[a][b] = c.transition[reachable[a]][reachable[b]];
        }
      }
      Vec pi_sub = reachable.size() == 1 ? Vec{1.0} : stationary_of(sub);
      Vec pi(n, 0.0);
      for (std::size_t a = 0; a < reachable.size(); ++a) pi[reachable[a]] = pi_sub[a];
      stationary_.push_back(std::move(pi));
    }
  }
}

double FadingProcess::stationary_mean(int i) const {
  double m = 0.0;
  for (std::size_t s = 0; s < users_[i].states.size(); ++s) {
    m += stationary_[i][s] * users_[i].states[s];
  }
  return m;
}

double FadingProcess::stationary_var(int i) const {
  double m = stationary_mean(i);
  double m2 = 0.0;
  for (std::size_t s = 0; s < users_[i].states.size(); ++s) {
    m2 += stationary_[i][s] * users_[i].states[s] * users_[i].states[s];
  }
  return std::max(0.0, m2 - m * m);
}

ChannelPath sample_path(const FadingProcess& process, int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_path: n must be >= 1");
  const int m = process.num_users();
  ChannelPath path;
  path.num_users = m;
  path.seed = seed;
  path.gains.assign(n, Vec(m));
  Rng rng(derive_seed(seed, 0));
  std::vector<int> state(m);
  for (int i = 0; i < m; ++i) {
    state[i] = rng.categorical(process.user(i).initial);
    path.gains[0][i] = process.user(i).states[state[i]];
  }
  for (int t = 1; t < n; ++t) {
    for (int i = 0; i < m; ++i) {
      state[i] = rng.categorical(process.user(i).transition[state[i]]);
      path.gains[t][i] = process.user(i).states[state[i]];
    }
  }
  return path;
}

FadingStatistics step_statistics(const FadingProcess& process, const Vec& powers) {
  const int m = process.num_users();
  if (static_cast<int>(powers.size()) != m) {
    throw std::invalid_argument("step_statistics: powers size mismatch");
  }
  FadingStatistics st;
  st.mean.resize(m);
  st.v_hat.assign(m, 0.0);
  st.cov.assign(m, Vec(m, 0.0));
  double wbar = 0.0;
  for (int i = 0; i < m; ++i) {
    const UserChain& c = process.user(i);
    const Vec& pi = process.stationary(i);
    st.mean[i] = process.stationary_mean(i);
    st.cov[i][i] = process.stationary_var(i);
    double e_step = 0.0;
    for (std::size_t s = 0; s < c.states.size(); ++s) {
      if (pi[s] <= 0.0) continue;  // unreachable under the initial class
      for (std::size_t t = 0; t < c.states.size(); ++t) {
        if (c.transition[s][t] <= 0.0) continue;
        double d = std::abs(c.states[s] - c.states[t]);
        st.v_hat[i] = std::max(st.v_hat[i], d);
        e_step += pi[s] * c.transition[s][t] * d;
      }
    }
    wbar += 0.5 * powers[i] * e_step;
    st.w_hat += 0.5 * powers[i] * st.v_hat[i];
  }
  st.w_bar = wbar;
  return st;
}

double sigma_H_squared(const FadingStatistics& stats, const Vec& powers, double noise) {
  const int m = static_cast<int>(powers.size());
  if (static_cast<int>(stats.mean.size()) != m) {
    throw std::invalid_argument("sigma_H_squared: dimension mismatch");
  }
  if (m > kEnumerationGuard) {
    throw std::invalid_argument("sigma_H_squared: M exceeds the enumeration guard");
  }
  if (noise <= 0) throw std::invalid_argument("sigma_H_squared: noise must be positive");
  Vec gamma(m);
  for (int i = 0; i < m; ++i) gamma[i] = powers[i] / noise;
  double total = 0.0;
  const Subset full = (Subset{1} << m) - 1;
  for (Subset s = 1; s <= full; ++s) {
    double g_k_g = 0.0;  // Gamma_S' K Gamma_S
    double zbar = 0.0;   // Gamma_S' Hbar
    for (int i = 0; i < m; ++i) {
      if (!(s >> i & 1)) continue;
      zbar += gamma[i] * stats.mean[i];
      for (int j = 0; j < m; ++j) {
        if (s >> j & 1) g_k_g += gamma[i] * stats.cov[i][j] * gamma[j];
      }
    }
    if (g_k_g <= 0.0) continue;
    double bracket = (1.0 + zbar) * (std::sqrt(2.0 * std::log1p(zbar)) - std::sqrt(g_k_g) / 2.0);
    total += g_k_g * (1.0 + bracket * bracket);
  }
  return 0.25 * total;
}

double region_deviation_bound(double sigma_sq, double delta) {
  if (delta <= 0) throw std::invalid_argument("region_deviation_bound: delta must be positive");
  if (sigma_sq < 0) throw std::invalid_argument("region_deviation_bound: negative sigma^2");
  return std::min(1.0, sigma_sq / (delta * delta));
}

double jensen_gap_bound(double f_mean_value, double var_x, double curvature) {
  if (f_mean_value < 0 || var_x < 0 || curvature < 0) {
    throw std::invalid_argument("jensen_gap_bound: negative input");
  }
  return std::sqrt(2.0 * curvature * var_x * f_mean_value) - 0.5 * var_x * curvature;
}

double log_variance_bound(double x_bar, double var_x) {
  if (var_x < 0) throw std::invalid_argument("log_variance_bound: negative variance");
  if (x_bar < 0) throw std::invalid_argument("log_variance_bound: negative mean");
  double bracket =
      (1.0 + x_bar) * (std::sqrt(2.0 * std::log1p(x_bar)) - std::sqrt(var_x) / 2.0);
  return var_x * (1.0 + bracket * bracket);
}

double realized_step(const Vec& h_now, const Vec& h_next, const Vec& powers) {
  if (h_now.size() != h_next.size() || h_now.size() != powers.size()) {
    throw std::invalid_argument("realized_step: size mismatch");
  }
  double w = 0.0;
  for (std::size_t i = 0; i < powers.size(); ++i) {
    w += 0.5 * std::abs(h_next[i] - h_now[i]) * powers[i];
  }
  return w;
}

}  // namespace macrate
