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

#include "macrate/projection.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace macrate {

namespace {

double entry_elevation(double power, double rate, double noise) {
  if (rate == 0.0) return std::numeric_limits<double>::infinity();
  return power / std::expm1(2.0 * rate) - noise;
}

struct SortedEntry {
  double elevation;
  int slot;  // index into the configuration
};

}  // namespace

double elevation_of(double power, double rate, double noise) {
  if (!(power > 0)) throw std::invalid_argument("elevation_of: power must be positive");
  if (!(rate >= 0)) throw std::invalid_argument("elevation_of: negative rate");
  if (!(noise > 0)) throw std::invalid_argument("elevation_of: noise must be positive");
  return entry_elevation(power, rate, noise);
}

Vec elevation_of(const Configuration& config) {
  Vec out;
  out.reserve(config.entries.size());
  for (const ConfigEntry& e : config.entries) {
    out.push_back(elevation_of(e.power, e.rate, config.noise));
  }
  return out;
}

SpinoffResult rate_split_check(const Vec& powers, const Vec& rates, const Vec& gains,
                               double noise, double elevation_tol) {
  const std::size_t m = powers.size();
  if (rates.size() != m || gains.size() != m) {
    throw std::invalid_argument("rate_split_check: size mismatch");
  }
  if (!(noise > 0)) throw std::invalid_argument("rate_split_check: noise must be positive");
  SpinoffResult result;
  std::vector<ConfigEntry> entries;
  std::vector<int> zero_rate;
  entries.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (!(rates[i] >= 0)) throw std::invalid_argument("rate_split_check: negative rate");
    if (!(powers[i] > 0)) throw std::invalid_argument("rate_split_check: nonpositive power");
    if (!(gains[i] >= 0)) throw std::invalid_argument("rate_split_check: negative gain");
    double eff = gains[i] * powers[i];
    if (rates[i] == 0.0) {
      zero_rate.push_back(static_cast<int>(i));
      continue;
    }
    if (eff <= 0.0) {
      // Positive rate with zero received power: the singleton is violated.
      result.single_user_codable = false;
      result.violated = {static_cast<int>(i)};
      result.violation = rates[i];
      return result;
    }
    entries.push_back({eff, rates[i], {static_cast<int>(i)}});
  }

  // Scale-relative slack keeps exact-boundary configurations (vertices, rate
  // sums equal to a rank) on the feasible side of the fp noise.
  double total_power = 0.0;
  for (const ConfigEntry& e : entries) total_power += e.power;
  const double scale_tol = 1e-12 * (noise + total_power);
  const double neg_tol = std::max(elevation_tol, scale_tol);

  std::vector<SortedEntry> order;
  for (std::size_t round = 0; round <= m; ++round) {
    order.clear();
    order.reserve(entries.size());
    int worst = -1;
    for (std::size_t j = 0; j < entries.size(); ++j) {
      double d = entry_elevation(entries[j].power, entries[j].rate, noise);
      if (d < -neg_tol && (worst < 0 || d < order[worst].elevation)) {
        worst = static_cast<int>(order.size());
      }
      order.push_back({d, static_cast<int>(j)});
    }
    if (worst >= 0) {
      const ConfigEntry& e = entries[order[worst].slot];
      result.single_user_codable = false;
      result.violated = e.members;
      result.violation = e.rate - awgn_capacity(e.power, noise);
      return result;
    }
    std::stable_sort(order.begin(), order.end(), [&](const SortedEntry& a, const SortedEntry& b) {
      if (a.elevation != b.elevation) return a.elevation < b.elevation;
      return entries[a.slot].members[0] < entries[b.slot].members[0];
    });
    // First (lowest-elevation) adjacent overlapping pair, per Eq-style check
    // delta_{j+1} >= delta_j + p_j.
    int overlap = -1;
    for (std::size_t j = 0; j + 1 < order.size(); ++j) {
      if (order[j + 1].elevation <
          order[j].elevation + entries[order[j].slot].power - scale_tol) {
        overlap = static_cast<int>(j);
        break;
      }
    }
    if (overlap < 0) {
      result.single_user_codable = true;
      // Decode in descending elevation; zero-rate users appended last.
      for (std::size_t j = order.size(); j-- > 0;) {
        ConfigEntry g = entries[order[j].slot];
        result.decoding_order.insert(result.decoding_order.end(), g.members.begin(),
                                     g.members.end());
        result.groups.push_back(std::move(g));
      }
      for (int i : zero_rate) result.decoding_order.push_back(i);
      return result;
    }
    ConfigEntry& a = entries[order[overlap].slot];
    ConfigEntry& b = entries[order[overlap + 1].slot];
    a.power += b.power;
    a.rate += b.rate;
    a.members.insert(a.members.end(), b.members.begin(), b.members.end());
    std::sort(a.members.begin(), a.members.end());
    entries.erase(entries.begin() + order[overlap + 1].slot);
  }
  throw std::logic_error("rate_split_check: merge loop failed to terminate");
}

std::optional<Subset> find_violated(const GaussianMacRegion& region, const Vec& rates,
                                    double elevation_tol) {
  if (region.dimension() > 32) {
    throw std::invalid_argument("find_violated: subset masks support M <= 32");
  }
  SpinoffResult r =
      rate_split_check(region.powers(), rates, region.gains(), region.noise(), elevation_tol);
  if (r.single_user_codable) return std::nullopt;
  Subset s = 0;
  for (int i : r.violated) s |= Subset{1} << i;
  return s;
}

Vec project_onto_constraint(Vec y, Subset s, double b) {
  if (s == 0) throw std::invalid_argument("project_onto_constraint: empty subset");
  double sum = 0.0;
  int count = 0;
  for (Subset t = s; t; t &= t - 1) {
    sum += y[std::countr_zero(t)];
    ++count;
  }
  double share = (sum - b) / count;
  for (Subset t = s; t; t &= t - 1) y[std::countr_zero(t)] -= share;
  return y;
}

Vec approximate_project(Vec y, const GaussianMacRegion& region,
                        std::vector<Subset>* projected) {
  const int m = region.dimension();
  if (static_cast<int>(y.size()) != m) {
    throw std::invalid_argument("approximate_project: dimension mismatch");
  }
  for (double& x : y) x = std::max(x, 0.0);
  // Tiny elevation slack absorbs round-off so a just-projected constraint is
  // not re-reported; the induced rate slack is far below kFeasibilityTol.
  const double elev_tol = 1e-10 * region.noise();
  const long cap = (m <= kEnumerationGuard ? (1L << m) : (1L << kEnumerationGuard)) + 64;
  Vec clamped(m);
  for (long it = 0; it < cap; ++it) {
    // A hyperplane projection can drive a small coordinate negative; negative
    // coordinates only loosen the sum constraints, so the separation runs on
    // the clamped point and the violated subset is restricted to the positive
    // coordinates (monotonicity keeps it genuinely violated).
    for (int i = 0; i < m; ++i) clamped[i] = std::max(y[i], 0.0);
    std::optional<Subset> s = find_violated(region, clamped, elev_tol);
    if (!s) return y;
    Subset positive = *s;
    for (int i = 0; i < m; ++i) {
      if ((positive >> i & 1) && y[i] <= 0.0) positive &= ~(Subset{1} << i);
    }
    if (positive == 0) return y;  // cannot happen for a genuine violation
    y = project_onto_constraint(std::move(y), positive, region.rank(positive));
    if (projected) projected->push_back(positive);
  }
  throw std::runtime_error("approximate_project: projection loop exceeded its bound");
}

int count_violations(const RegionOracle& region, const Vec& y, double tol) {
  const int m = region.dimension();
  if (m > kEnumerationGuard) {
    throw std::invalid_argument("count_violations: M exceeds the enumeration guard");
  }
  if (static_cast<int>(y.size()) != m) {
    throw std::invalid_argument("count_violations: dimension mismatch");
  }
  int count = 0;
  const Subset full = (Subset{1} << m) - 1;
  for (Subset s = 1; s <= full; ++s) {
    double sum = 0.0;
    for (Subset t = s; t; t &= t - 1) sum += y[std::countr_zero(t)];
    if (sum > region.rank(s) + tol) ++count;
  }
  return count;
}

}  // namespace macrate
