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

#ifndef MACRATE_REGION_HPP
#define MACRATE_REGION_HPP

#include <cstdint>
#include <optional>
#include <vector>

namespace macrate {

using Vec = std::vector<double>;

// Subsets of {0, ..., M-1} as bitmasks. All exhaustive 2^M operations are
// guarded by kEnumerationGuard; masks themselves cap M at 32.
using Subset = std::uint32_t;
inline constexpr int kEnumerationGuard = 20;
inline constexpr double kFeasibilityTol = 1e-9;

class FadingProcess;  // channel.hpp

/// Shannon capacity of the scalar AWGN channel, in nats per channel use:
/// (1/2) ln(1 + power/noise).
double awgn_capacity(double power, double noise);

/// Rank-function oracle for a polymatroid over user subsets.
/// rank(0) == 0 and rank is nondecreasing for every implementation.
class RegionOracle {
 public:
  virtual ~RegionOracle() = default;
  virtual int dimension() const = 0;
  virtual double rank(Subset s) const = 0;
};

/// Capacity region of the Gaussian multiple-access channel at a fixed channel
/// state: rank(S) = C(sum_{i in S} h_i p_i, N0).
class GaussianMacRegion : public RegionOracle {
 public:
  GaussianMacRegion(Vec powers, Vec gains, double noise);

  int dimension() const override { return static_cast<int>(powers_.size()); }
  double rank(Subset s) const override;

  const Vec& powers() const { return powers_; }
  const Vec& gains() const { return gains_; }
  double noise() const { return noise_; }
  // Received power h_i * p_i of user i.
  double effective_power(int i) const { return effective_[i]; }
  const Vec& effective_powers() const { return effective_; }

 private:
  Vec powers_;
  Vec gains_;
  Vec effective_;
  double noise_;
};

/// Throughput region averaged over the fading distribution, materialized as a
/// full 2^M rank table so downstream use is deterministic.
class AveragedRegion : public RegionOracle {
 public:
  AveragedRegion(Vec powers, double noise, Vec rank_table, long n_samples);

  int dimension() const override { return m_; }
  double rank(Subset s) const override;

  const Vec& powers() const { return powers_; }
  double noise() const { return noise_; }
  long n_samples() const { return n_samples_; }  // 0 means exact
  const Vec& rank_table() const { return table_; }

 private:
  int m_;
  Vec powers_;
  double noise_;
  Vec table_;
  long n_samples_;
};

/// Plain rank-table polymatroid; result type of expand().
class TableRegion : public RegionOracle {
 public:
  TableRegion(int m, Vec rank_table);
  int dimension() const override { return m_; }
  double rank(Subset s) const override { return table_.at(s); }

 private:
  int m_;
  Vec table_;
};

struct Violation {
  Subset subset;
  double excess;  // sum_{i in S} r_i - rank(S), positive
};

/// Every subset whose rate-sum constraint is violated beyond tol (exhaustive;
/// M <= 20). An empty report certifies feasibility.
std::vector<Violation> feasibility_report(const RegionOracle& region,
                                          const Vec& rates,
                                          double tol = kFeasibilityTol);

bool is_feasible(const RegionOracle& region, const Vec& rates,
                 double tol = kFeasibilityTol);

/// True iff the full-set constraint is tight at a feasible point. Rejects
/// infeasible input.
bool on_dominant_face(const RegionOracle& region, const Vec& rates,
                      double tol = kFeasibilityTol);

/// Polymatroid greedy: maximizes weights' r over the region. Users sorted by
/// descending weight (ties by ascending index) receive successive rank
/// increments; zero-weight users receive rate 0.
Vec linear_maximize(const RegionOracle& region, const Vec& weights);

/// Region with every nonempty-subset constraint relaxed by delta.
TableRegion expand(const RegionOracle& region, double delta);

/// Polymatroid distance for regions sharing the constraint index set:
/// max_S |rank_a(S) - rank_b(S)|.
double region_distance(const RegionOracle& a, const RegionOracle& b);

/// Monte-Carlo rank table over stationary channel draws; deterministic given
/// the seed, and identical whether samples are evaluated sequentially or in
/// parallel (per-sample derived streams).
AveragedRegion estimate_averaged_region(const FadingProcess& process,
                                        const Vec& powers, double noise,
                                        long n_samples, std::uint64_t seed);

/// Exact averaged region by enumerating joint chain states (small products
/// only). n_samples is reported as 0.
AveragedRegion exact_averaged_region(const FadingProcess& process,
                                     const Vec& powers, double noise);

}  // namespace macrate

#endif  // MACRATE_REGION_HPP
