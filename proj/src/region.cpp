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

#include "macrate/region.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "macrate/channel.hpp"
#include "macrate/rng.hpp"

namespace macrate {

namespace {

void check_finite(const Vec& v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw std::invalid_argument(std::string(what) + ": non-finite entry");
    }
  }
}

void check_enumeration_guard(int m, const char* op) {
  if (m > kEnumerationGuard) {
    throw std::invalid_argument(std::string(op) + ": M exceeds the 2^M enumeration guard (" +
                                std::to_string(kEnumerationGuard) + ")");
  }
}

double subset_sum(const Vec& v, Subset s) {
  double acc = 0.0;
  while (s) {
    int i = std::countr_zero(s);
    acc += v[i];
    s &= s - 1;
  }
  return acc;
}

}  // namespace

double awgn_capacity(double power, double noise) {
  if (!std::isfinite(power) || !std::isfinite(noise)) {
    throw std::invalid_argument("awgn_capacity: non-finite input");
  }
  if (noise <= 0) throw std::invalid_argument("awgn_capacity: noise must be positive");
  if (power < 0) throw std::invalid_argument("awgn_capacity: negative power");
  return 0.5 * std::log1p(power / noise);
}

GaussianMacRegion::GaussianMacRegion(Vec powers, Vec gains, double noise)
    : powers_(std::move(powers)), gains_(std::move(gains)), noise_(noise) {
  if (powers_.empty()) throw std::invalid_argument("region: M must be >= 1");
  if (gains_.size() != powers_.size()) {
    throw std::invalid_argument("region: powers/gains size mismatch");
  }
  check_finite(powers_, "powers");
  check_finite(gains_, "gains");
  if (!std::isfinite(noise_) || noise_ <= 0) {
    throw std::invalid_argument("region: noise must be positive");
  }
  for (double p : powers_) {
    if (p <= 0) throw std::invalid_argument("region: powers must be strictly positive");
  }
  for (double h : gains_) {
    if (h < 0) throw std::invalid_argument("region: gains must be nonnegative");
  }
  effective_.resize(powers_.size());
  for (std::size_t i = 0; i < powers_.size(); ++i) effective_[i] = gains_[i] * powers_[i];
}

double GaussianMacRegion::rank(Subset s) const {
  const int m = dimension();
  if (m < 32 && (s >> m) != 0) {
    throw std::out_of_range("rank: subset index out of range");
  }
  return awgn_capacity(subset_sum(effective_, s), noise_);
}

AveragedRegion::AveragedRegion(Vec powers, double noise, Vec rank_table, long n_samples)
    : m_(static_cast<int>(powers.size())),
      powers_(std::move(powers)),
      noise_(noise),
      table_(std::move(rank_table)),
      n_samples_(n_samples) {
  if (m_ < 1) throw std::invalid_argument("averaged region: M must be >= 1");
  if (table_.size() != (std::size_t{1} << m_)) {
    throw std::invalid_argument("averaged region: rank table must have 2^M entries");
  }
  if (table_[0] != 0.0) throw std::invalid_argument("averaged region: rank(empty) must be 0");
}

double AveragedRegion::rank(Subset s) const {
  if (s >= table_.size()) throw std::out_of_range("averaged region: subset out of range");
  return table_[s];
}

TableRegion::TableRegion(int m, Vec rank_table) : m_(m), table_(std::move(rank_table)) {
  if (table_.size() != (std::size_t{1} << m_)) {
    throw std::invalid_argument("table region: rank table must have 2^M entries");
  }
}

std::vector<Violation> feasibility_report(const RegionOracle& region, const Vec& rates,
                                          double tol) {
  const int m = region.dimension();
  check_enumeration_guard(m, "feasibility_report");
  if (static_cast<int>(rates.size()) != m) {
    throw std::invalid_argument("feasibility_report: dimension mismatch");
  }
  check_finite(rates, "rates");
  std::vector<Violation> out;
  const Subset full = (Subset{1} << m) - 1;
  for (Subset s = 1; s <= full; ++s) {
    double sum = subset_sum(rates, s);
    double f = region.rank(s);
    if (sum > f + tol) out.push_back({s, sum - f});
  }
  return out;
}

bool is_feasible(const RegionOracle& region, const Vec& rates, double tol) {
  return feasibility_report(region, rates, tol).empty();
}

bool on_dominant_face(const RegionOracle& region, const Vec& rates, double tol) {
  if (!is_feasible(region, rates, tol)) {
    throw std::invalid_argument("on_dominant_face: infeasible input");
  }
  const Subset full = (Subset{1} << region.dimension()) - 1;
  double sum = std::accumulate(rates.begin(), rates.end(), 0.0);
  return sum >= region.rank(full) - tol;
}

Vec linear_maximize(const RegionOracle& region, const Vec& weights) {
  const int m = region.dimension();
  if (static_cast<int>(weights.size()) != m) {
    throw std::invalid_argument("linear_maximize: dimension mismatch");
  }
  check_finite(weights, "weights");
  for (double w : weights) {
    if (w < 0) throw std::invalid_argument("linear_maximize: negative weight");
  }
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return weights[a] > weights[b]; });
  Vec r(m, 0.0);
  Subset prefix = 0;
  double prev = 0.0;
  for (int idx : order) {
    if (weights[idx] <= 0.0) break;
    prefix |= Subset{1} << idx;
    double f = region.rank(prefix);
    r[idx] = f - prev;
    prev = f;
  }
  return r;
}

TableRegion expand(const RegionOracle& region, double delta) {
  const int m = region.dimension();
  check_enumeration_guard(m, "expand");
  if (!(delta >= 0)) throw std::invalid_argument("expand: delta must be nonnegative");
  Vec table(std::size_t{1} << m, 0.0);
  for (Subset s = 1; s < table.size(); ++s) table[s] = region.rank(s) + delta;
  return TableRegion(m, std::move(table));
}

double region_distance(const RegionOracle& a, const RegionOracle& b) {
  const int m = a.dimension();
  if (b.dimension() != m) throw std::invalid_argument("region_distance: dimension mismatch");
  check_enumeration_guard(m, "region_distance");
  double d = 0.0;
  const Subset full = (Subset{1} << m) - 1;
  for (Subset s = 1; s <= full; ++s) d = std::max(d, std::abs(a.rank(s) - b.rank(s)));
  return d;
}

AveragedRegion estimate_averaged_region(const FadingProcess& process, const Vec& powers,
                                        double noise, long n_samples, std::uint64_t seed) {
  const int m = process.num_users();
  check_enumeration_guard(m, "estimate_averaged_region");
  if (static_cast<int>(powers.size()) != m) {
    throw std::invalid_argument("estimate_averaged_region: powers/process size mismatch");
  }
  if (n_samples < 1) throw std::invalid_argument("estimate_averaged_region: n_samples >= 1");
  const std::size_t n_sub = std::size_t{1} << m;
  Vec table(n_sub, 0.0);
  Vec eff(m);
  Vec sums(n_sub, 0.0);
  for (long j = 0; j < n_samples; ++j) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(j)));
    for (int i = 0; i < m; ++i) {
      int s = rng.categorical(process.stationary(i));
      eff[i] = process.user(i).states[s] * powers[i];
    }
    // Incremental mean: a constant process reproduces the fixed region's
    // ranks bit-exactly.
    for (Subset s = 1; s < n_sub; ++s) {
      sums[s] = sums[s & (s - 1)] + eff[std::countr_zero(s)];
      table[s] += (awgn_capacity(sums[s], noise) - table[s]) / static_cast<double>(j + 1);
    }
  }
  return AveragedRegion(powers, noise, std::move(table), n_samples);
}

AveragedRegion exact_averaged_region(const FadingProcess& process, const Vec& powers,
                                     double noise) {
  const int m = process.num_users();
  check_enumeration_guard(m, "exact_averaged_region");
  if (static_cast<int>(powers.size()) != m) {
    throw std::invalid_argument("exact_averaged_region: powers/process size mismatch");
  }
  long joint = 1;
  for (int i = 0; i < m; ++i) {
    joint *= static_cast<long>(process.user(i).states.size());
    if (joint > 2000000L) {
      throw std::invalid_argument("exact_averaged_region: joint state space too large");
    }
  }
  const std::size_t n_sub = std::size_t{1} << m;
  Vec table(n_sub, 0.0);
  Vec eff(m);
  Vec sums(n_sub, 0.0);
  std::vector<int> idx(m, 0);
  for (long cell = 0; cell < joint; ++cell) {
    long rest = cell;
    double prob = 1.0;
    for (int i = 0; i < m; ++i) {
      int n_i = static_cast<int>(process.user(i).states.size());
      idx[i] = static_cast<int>(rest % n_i);
      rest /= n_i;
      prob *= process.stationary(i)[idx[i]];
      eff[i] = process.user(i).states[idx[i]] * powers[i];
    }
    for (Subset s = 1; s < n_sub; ++s) {
      sums[s] = sums[s & (s - 1)] + eff[std::countr_zero(s)];
      table[s] += prob * awgn_capacity(sums[s], noise);
    }
  }
  return AveragedRegion(powers, noise, std::move(table), 0);
}

}  // namespace macrate
