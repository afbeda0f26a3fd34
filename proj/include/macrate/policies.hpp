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

#ifndef MACRATE_POLICIES_HPP
#define MACRATE_POLICIES_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "macrate/channel.hpp"
#include "macrate/region.hpp"
#include "macrate/solvers.hpp"
#include "macrate/utility.hpp"

namespace macrate {

/// Per-slot record of a dynamic allocation run. `rates` are the allocated
/// (service) rates and are feasible in the region of the slot's measurement;
/// `avg_rates` is the running time average of the policy's achieved rates
/// (admitted rates for the queue baseline).
struct PolicyTrace {
  std::vector<Vec> gains;
  std::vector<Vec> rates;
  std::vector<double> utility;
  std::vector<Vec> avg_rates;
  std::vector<Vec> queues;     // queue baseline only
  std::vector<Vec> admitted;   // queue baseline only
  std::vector<int> iterations;

  int length() const { return static_cast<int>(rates.size()); }
};

/// Parameter bundle for the tracking policies.
struct TrackingParameters {
  int k = 1;
  double alpha = 0.0;
  double radius = 0.0;   // guaranteed tracking distance (2*theta, or
                         // 2*gamma + sqrt(gamma B / A))
  double theta = 0.0;    // worst-case policy only
  double gamma = 0.0;    // improved policy only
  double w_prime = 0.0;  // worst-case policy only
  double c = 1.0;        // improved policy only
};

/// Per-slot utility maximizer over C_g(P, H): gradient projection run to a
/// stagnation tolerance, warm-startable from the previous slot's output.
Vec greedy_step(const Vec& gains, const UtilityModel& u, const Vec& powers, double noise,
                const Vec* warm_start = nullptr, double tol = 1e-6, int max_iter = 4000,
                int* iterations_used = nullptr);

/// Greedy policy over a whole path (warm-started slot to slot).
PolicyTrace greedy_policy_run(const ChannelPath& path, const UtilityModel& u,
                              const Vec& powers, double noise, double tol = 1e-6,
                              int max_iter = 4000);

/// Worst-case tracking parameters:
///   w' = sqrt(what) (sqrt(what) + sqrt(B/A)),  k = floor((2B/(A w'))^(2/3)),
///   alpha = (16A/B^2)^(1/3) w'^(2/3),          theta = (2B/A)^(2/3) w'^(1/3).
/// Throws if k < 1 (fading too fast for the guarantee).
TrackingParameters worst_case_parameters(double A, double B, double w_hat);

/// Average-case parameters: gamma = c (B/A)^(3/4) wbar^(1/4) with c >= 1
/// solving (c^2-1)^8 / (2^8 c^4) = what; k = floor(gamma/wbar);
/// alpha = A gamma^2 / B^2; radius = 2 gamma + sqrt(gamma B / A).
TrackingParameters average_case_parameters(double A, double B, double w_hat, double w_bar);

/// Blocked approximate policy: measures the channel every k slots and takes k
/// gradient projection iterations per block on the region of the measurement
/// slot; outputs the best-utility iterate for the whole block.
PolicyTrace approximate_policy_run(const ChannelPath& path, const UtilityModel& u,
                                   const Vec& powers, double noise, int k, double alpha);

/// Threshold-triggered policy: accumulates realized one-slot region distances
/// W_n; whenever the running sum reaches gamma it takes k iterations on the
/// region of the crossing slot and holds the best iterate until the next
/// crossing. Also reports the crossing count t(n) per slot (for the renewal
/// ratio n / (t(n) k)).
struct ImprovedPolicyResult {
  PolicyTrace trace;
  std::vector<int> crossings;  // t(n) per slot
};
ImprovedPolicyResult improved_policy_run(const ChannelPath& path, const UtilityModel& u,
                                         const Vec& powers, double noise, double gamma, int k,
                                         double alpha);

enum class ArrivalModel { kDeterministicMean, kPoisson };

/// Queue-length baseline: max-weight service with queue lengths as weights
/// plus the alpha-fair congestion controller
/// E[a_i | x_i] = min(K (w_i/x_i)^(1/alpha), D).
PolicyTrace queue_policy_run(const ChannelPath& path, const UtilityModel& u, const Vec& powers,
                             double noise, double K, double D, ArrivalModel arrivals,
                             std::uint64_t seed);

struct RatePowerAllocation {
  Vec rates;
  Vec powers;
  double objective = 0.0;  // mu' r - lambda' p
};

/// Per-state greedy rate/power allocation: maximizes mu' r - lambda' p over
/// p >= 0, r in C_g(p, h) by the marginal-utility sweep over interference
/// levels, with closed-form crossing points.
RatePowerAllocation tse_rate_power_step(const Vec& gains, const Vec& mu, const Vec& lambda,
                                        double noise);

struct LambdaFit {
  Vec lambda;
  Vec avg_power;       // sample-average powers at the fitted multipliers
  Vec residual;        // |avg_power - p_bar| / p_bar
  bool converged = false;
  int iterations = 0;
};

/// Lagrange multipliers matching the average power budget by a damped
/// multiplicative fixed point over a fixed (common-random-numbers) sample of
/// stationary states.
LambdaFit find_lambda(const FadingProcess& process, const Vec& mu, const Vec& p_bar,
                      double noise, int n_samples, std::uint64_t seed, double tol = 1e-3,
                      int max_iter = 400);

/// Boundary point R*(mu) of the power-controlled throughput region: sample
/// average of the per-state allocation rates at the fitted multipliers.
Vec boundary_point(const FadingProcess& process, const Vec& mu, const Vec& p_bar, double noise,
                   int n_samples, std::uint64_t seed);

struct PowerControlSolution {
  Vec rates;     // converged average-rate target R*
  Vec mu_star;   // gradient of u at R*, the runtime surrogate weights
  Vec lambda;    // multipliers fitted at mu_star
  int iterations = 0;
  bool converged = false;
  std::vector<double> gaps;
};

/// Conditional gradient over the power-controlled region, with
/// boundary_point as the linear-maximization oracle.
PowerControlSolution power_control_solve(const FadingProcess& process, const UtilityModel& u,
                              const Vec& p_bar, double noise, int n_samples,
                              std::uint64_t seed, int max_iter = 60, double tol = 1e-6);

/// Distance bound between the optima of regions at distance <= delta:
/// delta + sqrt(delta B / A).
double opt_distance_bound(double delta, double A, double B);

/// Variation gap bound: (s2/d^2) u* + (1 - s2/d^2) B (sqrt(d) + sqrt(B/A)) sqrt(d),
/// valid for delta in [sigma^2, inf).
double gap_bound_variation(double delta, double sigma_sq, double A, double B, double u_star);

/// Curvature gap bound: eps u* + (1/2)(1 - eps) r_eps^2 Omega.
double gap_bound_curvature(double eps, double omega, double r_eps, double u_star);

/// r(eps) = sqrt(M) sigma_H / sqrt(eps) + sqrt(sum_i E_i^2), where E_i is the
/// expected dominant-face width of user i, estimated by Monte Carlo over the
/// stationary distribution.
double r_epsilon(const FadingProcess& process, const Vec& powers, double noise, double eps,
                 double sigma_h, int n_samples, std::uint64_t seed);

struct UtilityConstants {
  double A = 0.0;      // quadratic-growth constant (min sampled ratio)
  double B = 0.0;      // subgradient bound (max sampled sup-norm)
  double Omega = 0.0;  // curvature bound over the supplied ball
  bool degenerate = false;
  int samples = 0;
};

/// Sampled estimates of the utility constants over a family of per-state
/// regions. Omega is taken over the ball around `omega_center` of radius
/// `omega_radius` when given, else over the sampled dominant-face points.
UtilityConstants estimate_utility_constants(const UtilityModel& u, const FadingProcess& process,
                                            const Vec& powers, double noise, int budget,
                                            std::uint64_t seed, const Vec& omega_center = {},
                                            double omega_radius = 0.0);

}  // namespace macrate

#endif  // MACRATE_POLICIES_HPP
