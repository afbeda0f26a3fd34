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

#include "macrate/policies.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "macrate/rng.hpp"

namespace macrate {

namespace {

double norm2(const Vec& a) {
  double s = 0.0;
  for (double x : a) s += x * x;
  return std::sqrt(s);
}

void push_running_average(PolicyTrace& trace, const Vec& achieved) {
  const std::size_t m = achieved.size();
  Vec avg(m);
  if (trace.avg_rates.empty()) {
    avg = achieved;
  } else {
    const Vec& prev = trace.avg_rates.back();
    double n = static_cast<double>(trace.avg_rates.size());
    for (std::size_t i = 0; i < m; ++i) avg[i] = (prev[i] * n + achieved[i]) / (n + 1.0);
  }
  trace.avg_rates.push_back(std::move(avg));
}

// One blocked batch of gradient projection iterations; returns the
// best-utility iterate among the projected start and the k updates.
Vec blocked_iterations(const GaussianMacRegion& region, const UtilityModel& u, Vec start,
                       int k, double alpha) {
  Vec x = approximate_project(std::move(start), region);
  Vec best = x;
  double best_u = u.value(x);
  const int m = region.dimension();
  for (int j = 0; j < k; ++j) {
    Vec g = u.subgradient(x);
    for (int i = 0; i < m; ++i) x[i] += alpha * g[i];
    x = approximate_project(std::move(x), region);
    double v = u.value(x);
    if (v > best_u) {
      best_u = v;
      best = x;
    }
  }
  return best;
}

}  // namespace

Vec greedy_step(const Vec& gains, const UtilityModel& u, const Vec& powers, double noise,
                const Vec* warm_start, double tol, int max_iter, int* iterations_used) {
  GaussianMacRegion region(powers, gains, noise);
  const int m = region.dimension();
  const Subset full = (Subset{1} << m) - 1;
  double scale = region.rank(full) / m;
  Vec current =
      warm_start ? approximate_project(*warm_start, region) : default_start(region);
  double g0 = norm2(u.subgradient(current));
  double a = (warm_start ? 0.08 : 0.3) * scale * m / std::max(g0, 1e-9);
  // Annealed restarts of the diminishing schedule refine the best iterate
  // well below the first schedule's step floor. The stagnation threshold sits
  // two decades under the requested tolerance because a utility plateau of
  // size tol only pins the rate down to sqrt(tol / curvature).
  SolveOptions opts;
  opts.tol = 0.01 * tol;
  opts.max_iter = std::max(1, max_iter / 4);
  int used = 0;
  for (int phase = 0; phase < 4; ++phase) {
    SolveReport rep =
        gradient_projection_solve(region, u, StepsizeRule::diminishing(a), current, opts);
    current = rep.rates;
    used += rep.iterations;
    a /= 8.0;
  }
  if (iterations_used) *iterations_used = used;
  return current;
}

PolicyTrace greedy_policy_run(const ChannelPath& path, const UtilityModel& u,
                              const Vec& powers, double noise, double tol, int max_iter) {
  PolicyTrace trace;
  const int n = path.length();
  Vec prev;
  for (int t = 0; t < n; ++t) {
    int used = 0;
    Vec r = greedy_step(path.gains[t], u, powers, noise, prev.empty() ? nullptr : &prev, tol,
                        max_iter, &used);
    trace.gains.push_back(path.gains[t]);
    trace.utility.push_back(u.value(r));
    push_running_average(trace, r);
    trace.iterations.push_back(used);
    prev = r;
    trace.rates.push_back(std::move(r));
  }
  return trace;
}

TrackingParameters worst_case_parameters(double A, double B, double w_hat) {
  if (!(A > 0) || !(B > 0) || !(w_hat > 0)) {
    throw std::invalid_argument("worst_case_parameters: A, B, w_hat must be positive");
  }
  TrackingParameters p;
  p.w_prime = std::sqrt(w_hat) * (std::sqrt(w_hat) + std::sqrt(B / A));
  double k_real = std::pow(2.0 * B / (A * p.w_prime), 2.0 / 3.0);
  p.k = static_cast<int>(std::floor(k_real));
  if (p.k < 1) {
    throw std::domain_error(
        "worst_case_parameters: k < 1; fading too fast for the tracking guarantee");
  }
  p.alpha = std::cbrt(16.0 * A / (B * B)) * std::pow(p.w_prime, 2.0 / 3.0);
  p.theta = std::pow(2.0 * B / A, 2.0 / 3.0) * std::cbrt(p.w_prime);
  p.radius = 2.0 * p.theta;
  return p;
}

TrackingParameters average_case_parameters(double A, double B, double w_hat, double w_bar) {
  if (!(A > 0) || !(B > 0) || w_hat < 0 || w_bar < 0) {
    throw std::invalid_argument("average_case_parameters: bad inputs");
  }
  // (c^2 - 1)^8 / (2^8 c^4) is 0 at c = 1 and strictly increasing, so the
  // root is found by bracketing + bisection.
  auto lhs = [](double c) {
    double t = c * c - 1.0;
    return std::pow(t, 8) / (256.0 * std::pow(c, 4));
  };
  double c = 1.0;
  if (w_hat > 0) {
    double lo = 1.0, hi = 2.0;
    while (lhs(hi) < w_hat) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
      double mid = 0.5 * (lo + hi);
      (lhs(mid) < w_hat ? lo : hi) = mid;
    }
    c = 0.5 * (lo + hi);
  }
  TrackingParameters p;
  p.c = c;
  p.gamma = c * std::pow(B / A, 0.75) * std::pow(w_bar, 0.25);
  p.k = w_bar > 0 ? std::max(1, static_cast<int>(std::floor(p.gamma / w_bar))) : 1;
  p.alpha = A * p.gamma * p.gamma / (B * B);
  p.radius = 2.0 * p.gamma + std::sqrt(p.gamma * B / A);
  return p;
}

PolicyTrace approximate_policy_run(const ChannelPath& path, const UtilityModel& u,
                                   const Vec& powers, double noise, int k, double alpha) {
  if (k < 1) throw std::invalid_argument("approximate_policy_run: k must be >= 1");
  if (!(alpha > 0)) throw std::invalid_argument("approximate_policy_run: alpha must be positive");
  PolicyTrace trace;
  const int n = path.length();
  Vec current = greedy_step(path.gains[0], u, powers, noise);
  trace.gains.push_back(path.gains[0]);
  trace.utility.push_back(u.value(current));
  push_running_average(trace, current);
  trace.iterations.push_back(0);
  trace.rates.push_back(current);
  for (int block_start = 1; block_start < n; block_start += k) {
    // Block t covers slots [kt+1, k(t+1)]; the channel is measured at slot kt.
    const Vec& h = path.gains[block_start - 1];
    GaussianMacRegion region(powers, h, noise);
    current = blocked_iterations(region, u, current, k, alpha);
    int block_end = std::min(block_start + k, n);
    for (int t = block_start; t < block_end; ++t) {
      trace.gains.push_back(path.gains[t]);
      trace.rates.push_back(current);
      trace.utility.push_back(u.value(current));
      push_running_average(trace, current);
      trace.iterations.push_back(t == block_start ? k : 0);
    }
  }
  return trace;
}

ImprovedPolicyResult improved_policy_run(const ChannelPath& path, const UtilityModel& u,
                                         const Vec& powers, double noise, double gamma, int k,
                                         double alpha) {
  if (!(gamma > 0)) throw std::invalid_argument("improved_policy_run: gamma must be positive");
  if (k < 1) throw std::invalid_argument("improved_policy_run: k must be >= 1");
  if (!(alpha > 0)) throw std::invalid_argument("improved_policy_run: alpha must be positive");
  ImprovedPolicyResult result;
  PolicyTrace& trace = result.trace;
  const int n = path.length();
  Vec greedy0 = greedy_step(path.gains[0], u, powers, noise);
  trace.gains.push_back(path.gains[0]);
  trace.utility.push_back(u.value(greedy0));
  push_running_average(trace, greedy0);
  trace.iterations.push_back(0);
  trace.rates.push_back(greedy0);
  result.crossings.push_back(0);

  GaussianMacRegion region0(powers, path.gains[0], noise);
  Vec held = blocked_iterations(region0, u, greedy0, k, alpha);
  double accumulated = 0.0;
  int crossings = 0;
  for (int t = 1; t < n; ++t) {
    accumulated += realized_step(path.gains[t - 1], path.gains[t], powers);
    trace.gains.push_back(path.gains[t]);
    trace.rates.push_back(held);
    trace.utility.push_back(u.value(held));
    push_running_average(trace, held);
    if (accumulated >= gamma) {
      // Threshold crossing at slot t: run the next batch on the region of
      // this measurement; its output applies from slot t+1 on.
      GaussianMacRegion region(powers, path.gains[t], noise);
      held = blocked_iterations(region, u, held, k, alpha);
      accumulated = 0.0;
      ++crossings;
      trace.iterations.push_back(k);
    } else {
      trace.iterations.push_back(0);
    }
    result.crossings.push_back(crossings);
  }
  return result;
}

PolicyTrace queue_policy_run(const ChannelPath& path, const UtilityModel& u, const Vec& powers,
                             double noise, double K, double D, ArrivalModel arrivals,
                             std::uint64_t seed) {
  if (!(K > 0) || !(D > 0)) throw std::invalid_argument("queue_policy_run: K, D must be positive");
  if (!u.is_alpha_fair()) {
    throw std::invalid_argument("queue_policy_run: controller needs an alpha-fair utility");
  }
  const double alpha = u.alpha();
  if (!(alpha > 0)) {
    throw std::invalid_argument("queue_policy_run: controller needs alpha > 0");
  }
  const Vec& w = u.weights();
  const int m = path.num_users;
  PolicyTrace trace;
  Vec x(m, 0.0);
  Rng rng(derive_seed(seed, 0x71e5u));
  for (int t = 0; t < path.length(); ++t) {
    GaussianMacRegion region(powers, path.gains[t], noise);
    Vec mu = linear_maximize(region, x);
    Vec a(m);
    for (int i = 0; i < m; ++i) {
      double mean = x[i] <= 0.0 ? D : std::min(K * std::pow(w[i] / x[i], 1.0 / alpha), D);
      a[i] = arrivals == ArrivalModel::kDeterministicMean
                 ? mean
                 : static_cast<double>(rng.poisson(mean));
    }
    trace.gains.push_back(path.gains[t]);
    trace.rates.push_back(mu);
    trace.utility.push_back(u.value(mu));
    trace.queues.push_back(x);
    trace.admitted.push_back(a);
    push_running_average(trace, a);
    trace.iterations.push_back(0);
    for (int i = 0; i < m; ++i) x[i] = std::max(0.0, x[i] - mu[i]) + a[i];
  }
  return trace;
}

RatePowerAllocation tse_rate_power_step(const Vec& gains, const Vec& mu, const Vec& lambda,
                                        double noise) {
  const std::size_t m = gains.size();
  if (mu.size() != m || lambda.size() != m) {
    throw std::invalid_argument("tse_rate_power_step: size mismatch");
  }
  if (!(noise > 0)) throw std::invalid_argument("tse_rate_power_step: noise must be positive");
  for (std::size_t i = 0; i < m; ++i) {
    if (!(lambda[i] > 0)) {
      throw std::invalid_argument("tse_rate_power_step: zero multiplier makes power unbounded");
    }
    if (mu[i] < 0) throw std::invalid_argument("tse_rate_power_step: negative weight");
    if (gains[i] < 0) throw std::invalid_argument("tse_rate_power_step: negative gain");
  }
  RatePowerAllocation out;
  out.rates.assign(m, 0.0);
  out.powers.assign(m, 0.0);

  // Marginal value of a unit of received interference power at level z for
  // user i: e_i(z) = mu_i / (2 (N0 + z)) - lambda_i / h_i. Decreasing in z,
  // so the winning user changes only at roots and pairwise crossings.
  std::vector<int> active;
  Vec price(m, 0.0);  // lambda_i / h_i
  Vec root(m, 0.0);   // z where e_i hits zero
  for (std::size_t i = 0; i < m; ++i) {
    if (mu[i] <= 0.0 || gains[i] <= 0.0) continue;
    price[i] = lambda[i] / gains[i];
    root[i] = mu[i] / (2.0 * price[i]) - noise;
    if (root[i] > 0.0) active.push_back(static_cast<int>(i));
  }
  if (active.empty()) return out;

  double z_max = 0.0;
  Vec cuts{0.0};
  for (int i : active) {
    z_max = std::max(z_max, root[i]);
    cuts.push_back(root[i]);
  }
  for (std::size_t a = 0; a < active.size(); ++a) {
    for (std::size_t b = a + 1; b < active.size(); ++b) {
      int i = active[a], j = active[b];
      double dp = price[i] - price[j];
      if (dp == 0.0) continue;  // parallel marginals; larger mu wins everywhere
      double z = (mu[i] - mu[j]) / (2.0 * dp) - noise;
      if (z > 0.0 && z < z_max) cuts.push_back(z);
    }
  }
  cuts.push_back(z_max);
  std::sort(cuts.begin(), cuts.end());
  Vec received(m, 0.0);
  std::vector<int> tied;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    double a = cuts[c], b = cuts[c + 1];
    if (!(b > a)) continue;
    double zm = 0.5 * (a + b);
    double best = 0.0;
    tied.clear();
    for (int i : active) {
      double e = mu[i] / (2.0 * (noise + zm)) - price[i];
      if (e > best) {
        best = e;
        tied.assign(1, i);
      } else if (e == best && !tied.empty()) {
        // Exchangeable users (identical weight and price) tie on the whole
        // interval; split it into equal consecutive layers so symmetric
        // power budgets stay reachable.
        tied.push_back(i);
      }
    }
    if (tied.empty()) continue;
    const double k = static_cast<double>(tied.size());
    for (std::size_t j = 0; j < tied.size(); ++j) {
      double lo = a + (b - a) * static_cast<double>(j) / k;
      double hi = a + (b - a) * static_cast<double>(j + 1) / k;
      received[tied[j]] += hi - lo;
      out.rates[tied[j]] += 0.5 * (std::log(noise + hi) - std::log(noise + lo));
    }
  }
  double obj = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (received[i] > 0.0) out.powers[i] = received[i] / gains[i];
    obj += mu[i] * out.rates[i] - lambda[i] * out.powers[i];
  }
  out.objective = obj;
  return out;
}

namespace {

std::vector<Vec> draw_state_sample(const FadingProcess& process, int n_samples,
                                   std::uint64_t seed) {
  const int m = process.num_users();
  std::vector<Vec> sample(n_samples, Vec(m));
  for (int s = 0; s < n_samples; ++s) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(s)));
    for (int i = 0; i < m; ++i) {
      sample[s][i] = process.user(i).states[rng.categorical(process.stationary(i))];
    }
  }
  return sample;
}

Vec average_powers(const std::vector<Vec>& sample, const Vec& mu, const Vec& lambda,
                   double noise, Vec* avg_rates = nullptr) {
  const std::size_t m = mu.size();
  Vec avg_p(m, 0.0);
  if (avg_rates) avg_rates->assign(m, 0.0);
  for (const Vec& h : sample) {
    RatePowerAllocation a = tse_rate_power_step(h, mu, lambda, noise);
    for (std::size_t i = 0; i < m; ++i) {
      avg_p[i] += a.powers[i];
      if (avg_rates) (*avg_rates)[i] += a.rates[i];
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    avg_p[i] /= static_cast<double>(sample.size());
    if (avg_rates) (*avg_rates)[i] /= static_cast<double>(sample.size());
  }
  return avg_p;
}

LambdaFit fit_lambda_on_sample(const std::vector<Vec>& sample, const FadingProcess& process,
                               const Vec& mu, const Vec& p_bar, double noise, double tol,
                               int max_iter, const Vec* lambda_init) {
  const int m = static_cast<int>(mu.size());
  LambdaFit fit;
  fit.lambda.resize(m);
  for (int i = 0; i < m; ++i) {
    if (!(p_bar[i] > 0)) throw std::invalid_argument("find_lambda: power budget must be positive");
    if (!(mu[i] > 0)) throw std::invalid_argument("find_lambda: weights must be positive");
    double hbar = process.stationary_mean(i);
    fit.lambda[i] = lambda_init ? (*lambda_init)[i]
                                : mu[i] * hbar / (2.0 * (noise + hbar * p_bar[i]));
    fit.lambda[i] = std::max(fit.lambda[i], 1e-12);
  }
  auto measure = [&](int it) {
    Vec avg_p = average_powers(sample, mu, fit.lambda, noise);
    fit.avg_power = avg_p;
    fit.residual.resize(m);
    double worst = 0.0;
    for (int i = 0; i < m; ++i) {
      fit.residual[i] = std::abs(avg_p[i] - p_bar[i]) / p_bar[i];
      worst = std::max(worst, fit.residual[i]);
    }
    fit.iterations = it;
    return worst;
  };
  // Fast phase: damped multiplicative price updates.
  double eta = 0.5;
  double prev_worst = std::numeric_limits<double>::infinity();
  const int fast_iters = std::min(max_iter, 60);
  for (int it = 0; it < fast_iters; ++it) {
    double worst = measure(it + 1);
    if (worst <= tol) {
      fit.converged = true;
      return fit;
    }
    if (worst > prev_worst) eta = std::max(0.05, eta * 0.7);
    prev_worst = worst;
    for (int i = 0; i < m; ++i) {
      double ratio = std::clamp(fit.avg_power[i] / p_bar[i], 1e-2, 1e2);
      fit.lambda[i] *= std::pow(ratio, eta);
    }
  }
  // Polish phase: cyclic per-coordinate bisection. The own-price curve
  // p_i(lambda_i) is monotone nonincreasing, so each 1-D budget equation has
  // a bracketable root; near-symmetric weights make the joint multiplicative
  // update cycle, while coordinate-wise root finding stays stable.
  auto own_power = [&](int i, double li) {
    Vec lam = fit.lambda;
    lam[i] = li;
    return average_powers(sample, mu, lam, noise)[i];
  };
  int cycles_used = 0;
  for (int cycle = 0; cycle < 6; ++cycle) {
    cycles_used = cycle + 1;
    for (int i = 0; i < m; ++i) {
      double lo = fit.lambda[i], hi = fit.lambda[i];
      double p_lo = own_power(i, lo);
      int guard = 0;
      while (p_lo < p_bar[i] && guard++ < 60) p_lo = own_power(i, lo /= 2.0);
      double p_hi = own_power(i, hi);
      guard = 0;
      while (p_hi > p_bar[i] && guard++ < 60) p_hi = own_power(i, hi *= 2.0);
      for (int b = 0; b < 60; ++b) {
        double mid = std::sqrt(lo * hi);
        (own_power(i, mid) > p_bar[i] ? lo : hi) = mid;
      }
      fit.lambda[i] = std::sqrt(lo * hi);
    }
    double worst = measure(fast_iters + cycle + 1);
    if (worst <= tol) {
      fit.converged = true;
      return fit;
    }
  }
  // Last resort (nearly tied weights make the coordinate cycle oscillate):
  // nested bisection, re-balancing all deeper users at every trial of the
  // outer multiplier. Each level is a monotone scalar root find.
  if (m <= 3) {
    std::function<void(int)> balance = [&](int d) {
      if (d >= m) return;
      auto p_d = [&](double ld) {
        fit.lambda[d] = ld;
        balance(d + 1);
        return average_powers(sample, mu, fit.lambda, noise)[d];
      };
      double lo = fit.lambda[d], hi = fit.lambda[d];
      int guard = 0;
      while (p_d(lo) < p_bar[d] && guard++ < 50) lo /= 2.0;
      guard = 0;
      while (p_d(hi) > p_bar[d] && guard++ < 50) hi *= 2.0;
      for (int b = 0; b < 50; ++b) {
        double mid = std::sqrt(lo * hi);
        (p_d(mid) > p_bar[d] ? lo : hi) = mid;
      }
      fit.lambda[d] = std::sqrt(lo * hi);
      balance(d + 1);
    };
    balance(0);
    double worst = measure(fast_iters + cycles_used + 1);
    if (worst <= tol) {
      fit.converged = true;
      return fit;
    }
  }
  measure(fast_iters + cycles_used + 2);
  return fit;
}

}  // namespace

LambdaFit find_lambda(const FadingProcess& process, const Vec& mu, const Vec& p_bar,
                      double noise, int n_samples, std::uint64_t seed, double tol,
                      int max_iter) {
  if (n_samples < 1) throw std::invalid_argument("find_lambda: n_samples must be >= 1");
  if (mu.size() != p_bar.size() || static_cast<int>(mu.size()) != process.num_users()) {
    throw std::invalid_argument("find_lambda: size mismatch");
  }
  std::vector<Vec> sample = draw_state_sample(process, n_samples, seed);
  LambdaFit fit = fit_lambda_on_sample(sample, process, mu, p_bar, noise, tol, max_iter, nullptr);
  if (!fit.converged) {
    throw std::runtime_error("find_lambda: no convergence; worst residual " +
                             std::to_string(*std::max_element(fit.residual.begin(),
                                                              fit.residual.end())));
  }
  return fit;
}

Vec boundary_point(const FadingProcess& process, const Vec& mu, const Vec& p_bar, double noise,
                   int n_samples, std::uint64_t seed) {
  std::vector<Vec> sample = draw_state_sample(process, n_samples, seed);
  LambdaFit fit = fit_lambda_on_sample(sample, process, mu, p_bar, noise, 1e-3, 400, nullptr);
  Vec rates;
  average_powers(sample, mu, fit.lambda, noise, &rates);
  return rates;
}

PowerControlSolution power_control_solve(const FadingProcess& process, const UtilityModel& u,
                              const Vec& p_bar, double noise, int n_samples,
                              std::uint64_t seed, int max_iter, double tol) {
  if (!u.differentiable()) {
    throw std::invalid_argument("power_control_solve: utility must be differentiable");
  }
  const int m = process.num_users();
  std::vector<Vec> sample = draw_state_sample(process, n_samples, seed);
  PowerControlSolution result;
  Vec lambda, mu_prev;  // warm start across conditional gradient iterations
  auto oracle = [&](const Vec& weights) {
    Vec init;
    if (!lambda.empty()) {
      // The multipliers are homogeneous of degree one in the weights, so the
      // warm start is rescaled per user by the weight change.
      init = lambda;
      for (int i = 0; i < m; ++i) init[i] *= weights[i] / mu_prev[i];
    }
    LambdaFit fit = fit_lambda_on_sample(sample, process, weights, p_bar, noise, 1e-5, 400,
                                         init.empty() ? nullptr : &init);
    if (!fit.converged) {
      throw std::runtime_error("power_control_solve: multiplier fit did not converge");
    }
    lambda = fit.lambda;
    mu_prev = weights;
    Vec rates;
    average_powers(sample, weights, fit.lambda, noise, &rates);
    return rates;
  };
  Vec r = oracle(Vec(m, 1.0));
  for (int k = 0; k < max_iter; ++k) {
    Vec g = u.subgradient(r);
    Vec v = oracle(g);
    double gap = 0.0;
    for (int i = 0; i < m; ++i) gap += g[i] * (v[i] - r[i]);
    result.gaps.push_back(gap);
    result.iterations = k + 1;
    if (gap < tol) {
      result.converged = true;
      break;
    }
    // Limited maximization over the segment.
    const double phi = 0.6180339887498949;
    double a = 0.0, b = 1.0;
    auto val = [&](double t) {
      Vec x(m);
      for (int i = 0; i < m; ++i) x[i] = r[i] + t * (v[i] - r[i]);
      return u.value(x);
    };
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = val(x1), f2 = val(x2);
    double bt = f1 >= f2 ? x1 : x2, bf = std::max(f1, f2);
    for (int i = 0; i < 38; ++i) {
      if (f1 < f2) {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + phi * (b - a);
        f2 = val(x2);
        if (f2 > bf) bf = f2, bt = x2;
      } else {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - phi * (b - a);
        f1 = val(x1);
        if (f1 > bf) bf = f1, bt = x1;
      }
    }
    for (int i = 0; i < m; ++i) r[i] += bt * (v[i] - r[i]);
  }
  result.rates = r;
  result.mu_star = u.subgradient(r);
  LambdaFit fit = fit_lambda_on_sample(sample, process, result.mu_star, p_bar, noise, 1e-3, 400,
                                       lambda.empty() ? nullptr : &lambda);
  result.lambda = fit.lambda;
  return result;
}

double opt_distance_bound(double delta, double A, double B) {
  if (delta < 0 || !(A > 0) || !(B > 0)) {
    throw std::invalid_argument("opt_distance_bound: bad inputs");
  }
  return delta + std::sqrt(delta * B / A);
}

double gap_bound_variation(double delta, double sigma_sq, double A, double B, double u_star) {
  if (!(delta > 0) || delta < sigma_sq) {
    throw std::invalid_argument("gap_bound_variation: requires delta >= sigma^2 > 0");
  }
  if (!(A > 0) || !(B > 0) || u_star < 0) {
    throw std::invalid_argument("gap_bound_variation: bad constants");
  }
  // The deviation probability is capped at 1; below delta = sigma_H the raw
  // expression would weight the distance term negatively and stop being an
  // upper bound.
  double ratio = std::min(1.0, sigma_sq / (delta * delta));
  return ratio * u_star +
         (1.0 - ratio) * B * (std::sqrt(delta) + std::sqrt(B / A)) * std::sqrt(delta);
}

double gap_bound_curvature(double eps, double omega, double r_eps, double u_star) {
  if (!(eps > 0) || eps > 1.0) {
    throw std::invalid_argument("gap_bound_curvature: eps must be in (0, 1]");
  }
  if (omega < 0 || r_eps < 0 || u_star < 0) {
    throw std::invalid_argument("gap_bound_curvature: negative input");
  }
  return eps * u_star + 0.5 * (1.0 - eps) * r_eps * r_eps * omega;
}

double r_epsilon(const FadingProcess& process, const Vec& powers, double noise, double eps,
                 double sigma_h, int n_samples, std::uint64_t seed) {
  if (!(eps > 0) || eps > 1.0) throw std::invalid_argument("r_epsilon: eps must be in (0, 1]");
  if (sigma_h < 0) throw std::invalid_argument("r_epsilon: negative sigma");
  if (n_samples < 1) throw std::invalid_argument("r_epsilon: n_samples must be >= 1");
  const int m = process.num_users();
  if (static_cast<int>(powers.size()) != m) {
    throw std::invalid_argument("r_epsilon: powers size mismatch");
  }
  std::vector<Vec> sample = draw_state_sample(process, n_samples, seed);
  Vec width(m, 0.0);  // E[dominant-face width of user i]
  for (const Vec& h : sample) {
    double total = 0.0;
    for (int i = 0; i < m; ++i) total += h[i] * powers[i] / noise;
    for (int i = 0; i < m; ++i) {
      double gi = h[i] * powers[i] / noise;
      width[i] += 0.5 * std::log((1.0 + gi) * (1.0 + total - gi) / (1.0 + total));
    }
  }
  double sum_sq = 0.0;
  for (int i = 0; i < m; ++i) {
    width[i] /= static_cast<double>(n_samples);
    sum_sq += width[i] * width[i];
  }
  return std::sqrt(static_cast<double>(m)) * sigma_h / std::sqrt(eps) + std::sqrt(sum_sq);
}

UtilityConstants estimate_utility_constants(const UtilityModel& u, const FadingProcess& process,
                                            const Vec& powers, double noise, int budget,
                                            std::uint64_t seed, const Vec& omega_center,
                                            double omega_radius) {
  if (budget < 1) throw std::invalid_argument("estimate_utility_constants: budget must be >= 1");
  const int m = process.num_users();
  UtilityConstants out;
  out.A = std::numeric_limits<double>::infinity();
  const double r_min = u.rate_floor();
  Rng rng(derive_seed(seed, 0xC0457u));
  Vec w(m);
  for (int s = 0; s < budget; ++s) {
    Vec h(m);
    for (int i = 0; i < m; ++i) {
      h[i] = process.user(i).states[rng.categorical(process.stationary(i))];
    }
    GaussianMacRegion region(powers, h, noise);
    for (int i = 0; i < m; ++i) w[i] = rng.uniform(0.05, 1.0);
    Vec v1 = linear_maximize(region, w);
    for (int i = 0; i < m; ++i) w[i] = rng.uniform(0.05, 1.0);
    Vec v2 = linear_maximize(region, w);
    double t = rng.uniform();
    Vec face(m);
    for (int i = 0; i < m; ++i) face[i] = t * v1[i] + (1.0 - t) * v2[i];
    bool above_floor = true;
    for (int i = 0; i < m; ++i) above_floor &= face[i] >= r_min;
    if (above_floor) {
      Vec g = u.subgradient(face);
      double sup = 0.0;
      for (double x : g) sup = std::max(sup, std::abs(x));
      out.B = std::max(out.B, sup);
    }
    Vec opt = greedy_step(h, u, powers, noise, nullptr, 1e-8, 6000);
    double shrink = rng.uniform();
    Vec interior(m);
    for (int i = 0; i < m; ++i) interior[i] = shrink * face[i];
    for (const Vec& candidate : {face, interior}) {
      double dist = 0.0;
      for (int i = 0; i < m; ++i) {
        dist += (opt[i] - candidate[i]) * (opt[i] - candidate[i]);
      }
      if (dist < 1e-12) continue;
      double ratio = std::abs(u.value(opt) - u.value(candidate)) / dist;
      out.A = std::min(out.A, ratio);
    }
    if (omega_center.empty() && u.is_alpha_fair()) {
      Vec clamped(m);
      for (int i = 0; i < m; ++i) clamped[i] = std::max(face[i], r_min);
      out.Omega = std::max(out.Omega, u.max_curvature(clamped));
    }
    ++out.samples;
  }
  if (!omega_center.empty() && u.is_alpha_fair()) {
    // Curvature over the ball: for alpha-fair models the maximum sits at the
    // smallest clamped coordinates, so include the corner point exactly.
    Vec corner(m);
    for (int i = 0; i < m; ++i) corner[i] = std::max(omega_center[i] - omega_radius, r_min);
    out.Omega = u.max_curvature(corner);
    for (int s = 0; s < budget; ++s) {
      Vec x(m);
      for (int i = 0; i < m; ++i) {
        x[i] = std::max(r_min, omega_center[i] + omega_radius * rng.uniform(-1.0, 1.0));
      }
      out.Omega = std::max(out.Omega, u.max_curvature(x));
    }
  }
  if (!std::isfinite(out.A)) out.A = 0.0;
  out.degenerate = out.A < 1e-9 || out.Omega <= 0.0;
  return out;
}

}  // namespace macrate
