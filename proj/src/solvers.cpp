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

#include "macrate/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace macrate {

namespace {

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Golden-section maximization of a concave section function; returns the
// best sampled point so the move never loses utility.
double golden_max(const std::function<double(double)>& f, double lo, double hi, int evals) {
  const double phi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  double best_x = f1 >= f2 ? x1 : x2;
  double best_f = std::max(f1, f2);
  for (int i = 0; i < evals - 2; ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
      if (f2 > best_f) best_f = f2, best_x = x2;
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
      if (f1 > best_f) best_f = f1, best_x = x1;
    }
  }
  return best_x;
}

Vec cg_default_start(const RegionOracle& region) {
  const int m = region.dimension();
  Vec start(m, 0.0);
  Vec w(m);
  for (int s = 0; s < m; ++s) {
    for (int i = 0; i < m; ++i) w[i] = 1.0 + static_cast<double>((i + s) % m);
    Vec v = linear_maximize(region, w);
    for (int i = 0; i < m; ++i) start[i] += v[i] / m;
  }
  return start;
}

}  // namespace

double safe_stepsize(Vec effective_powers, double noise, double subgradient_bound) {
  const int m = static_cast<int>(effective_powers.size());
  if (m < 2) {
    throw std::domain_error("safe_stepsize: undefined for M < 2; use a constant rule");
  }
  if (!(noise > 0)) throw std::invalid_argument("safe_stepsize: noise must be positive");
  if (!(subgradient_bound > 0)) {
    throw std::invalid_argument("safe_stepsize: subgradient bound must be positive");
  }
  for (double p : effective_powers) {
    if (!(p > 0)) throw std::invalid_argument("safe_stepsize: powers must be positive");
  }
  std::sort(effective_powers.begin(), effective_powers.end());
  double total = std::accumulate(effective_powers.begin(), effective_powers.end(), 0.0);
  double tail = total - effective_powers[0] - effective_powers[1];
  double ratio = effective_powers[0] * effective_powers[1] / ((noise + tail) * (noise + total));
  return std::log1p(ratio) / (4.0 * subgradient_bound * std::sqrt(static_cast<double>(m)));
}

Vec default_start(const GaussianMacRegion& region) {
  const int m = region.dimension();
  const Subset full = (Subset{1} << m) - 1;
  Vec start(m, region.rank(full) / m);
  return approximate_project(std::move(start), region);
}

SolveReport gradient_projection_solve(const GaussianMacRegion& region, const UtilityModel& u,
                                      const StepsizeRule& rule, Vec start,
                                      const SolveOptions& opts) {
  const int m = region.dimension();
  Vec r = start.empty() ? default_start(region) : approximate_project(std::move(start), region);
  SolveReport report;
  report.rates = r;
  report.utility = u.value(r);
  report.utilities.push_back(report.utility);
  if (opts.record_iterates) report.iterates.push_back(r);
  std::vector<double> best_hist;
  best_hist.reserve(opts.max_iter);
  for (int k = 0; k < opts.max_iter; ++k) {
    Vec g = u.subgradient(r);
    double a = rule.at(k);
    Vec y(m);
    for (int i = 0; i < m; ++i) y[i] = r[i] + a * g[i];
    if (opts.count_violations) {
      report.violation_counts.push_back(count_violations(region, y));
    }
    r = approximate_project(std::move(y), region);
    double uk = u.value(r);
    report.utilities.push_back(uk);
    if (opts.record_iterates) report.iterates.push_back(r);
    if (uk > report.utility) {
      report.utility = uk;
      report.rates = r;
    }
    best_hist.push_back(report.utility);
    report.iterations = k + 1;
    if (k >= opts.stagnation_window &&
        report.utility - best_hist[k - opts.stagnation_window] < opts.tol) {
      report.converged = true;
      break;
    }
  }
  return report;
}

SolveReport conditional_gradient_solve(const RegionOracle& region, const UtilityModel& u,
                                       Vec start, const SolveOptions& opts) {
  if (!u.differentiable()) {
    throw std::invalid_argument("conditional_gradient_solve: utility must be differentiable");
  }
  const int m = region.dimension();
  Vec r = start.empty() ? cg_default_start(region) : std::move(start);
  if (static_cast<int>(r.size()) != m) {
    throw std::invalid_argument("conditional_gradient_solve: start dimension mismatch");
  }
  SolveReport report;
  report.rates = r;
  report.utility = u.value(r);
  report.utilities.push_back(report.utility);
  for (int k = 0; k < opts.max_iter; ++k) {
    Vec g = u.subgradient(r);
    Vec v = linear_maximize(region, g);
    Vec dir(m);
    for (int i = 0; i < m; ++i) dir[i] = v[i] - r[i];
    double gap = dot(g, dir);
    report.gaps.push_back(gap);
    if (gap < opts.tol) {
      report.converged = true;
      break;
    }
    double t = golden_max(
        [&](double s) {
          Vec x(m);
          for (int i = 0; i < m; ++i) x[i] = r[i] + s * dir[i];
          return u.value(x);
        },
        0.0, 1.0, 40);
    for (int i = 0; i < m; ++i) r[i] += t * dir[i];
    double uk = u.value(r);
    report.utilities.push_back(uk);
    report.iterations = k + 1;
    if (uk >= report.utility) {
      report.utility = uk;
      report.rates = r;
    }
  }
  return report;
}

namespace {

double face_value_2d(const RegionOracle& region, const UtilityModel& u, double r1, double c) {
  Vec r{r1, c - r1};
  return u.value(r);
}

}  // namespace

Vec brute_force_optimum(const RegionOracle& region, const UtilityModel& u, int grid_n) {
  const int m = region.dimension();
  if (m > 3) throw std::invalid_argument("brute_force_optimum: M <= 3 only");
  if (grid_n < 2) throw std::invalid_argument("brute_force_optimum: grid_n too small");
  if (m == 1) return {region.rank(1)};

  if (m == 2) {
    const double c = region.rank(3);
    const double lo = std::max(0.0, c - region.rank(2));
    const double hi = std::min(region.rank(1), c);
    double best_x = lo, best_v = face_value_2d(region, u, lo, c);
    for (int i = 0; i <= grid_n; ++i) {
      double x = lo + (hi - lo) * i / grid_n;
      double v = face_value_2d(region, u, x, c);
      if (v > best_v) best_v = v, best_x = x;
    }
    double step = (hi - lo) / grid_n;
    double a = std::max(lo, best_x - step), b = std::min(hi, best_x + step);
    best_x = golden_max([&](double x) { return face_value_2d(region, u, x, c); }, a, b, 80);
    return {best_x, c - best_x};
  }

  // M == 3: grid over (r1, r2) on the dominant-face slice, then coordinate
  // descent with golden refinement along each coordinate's feasible interval.
  const double c = region.rank(7);
  const double f1 = region.rank(1), f2 = region.rank(2), f3 = region.rank(4);
  const double f12 = region.rank(3), f13 = region.rank(5), f23 = region.rank(6);
  auto value_at = [&](double r1, double r2) {
    double r3 = c - r1 - r2;
    Vec r{r1, r2, r3};
    return u.value(r);
  };
  auto feasible = [&](double r1, double r2) {
    double r3 = c - r1 - r2;
    double tol = 1e-12;
    return r1 >= -tol && r2 >= -tol && r3 >= -tol && r1 <= f1 + tol && r2 <= f2 + tol &&
           r3 <= f3 + tol && r1 + r2 <= f12 + tol && r1 + r3 <= f13 + tol &&
           r2 + r3 <= f23 + tol;
  };
  int n = std::max(64, grid_n / 8);
  double lo1 = std::max(0.0, c - f23), hi1 = std::min(f1, c);
  double lo2 = std::max(0.0, c - f13), hi2 = std::min(f2, c);
  double best1 = lo1, best2 = std::max(lo2, c - lo1 - f3), best_v = -1e300;
  for (int i = 0; i <= n; ++i) {
    double r1 = lo1 + (hi1 - lo1) * i / n;
    for (int j = 0; j <= n; ++j) {
      double r2 = lo2 + (hi2 - lo2) * j / n;
      if (!feasible(r1, r2)) continue;
      double v = value_at(r1, r2);
      if (v > best_v) best_v = v, best1 = r1, best2 = r2;
    }
  }
  for (int round = 0; round < 60; ++round) {
    // Interval for r1 with r2 fixed (r3 compensates).
    double a = std::max({0.0, c - f23, c - best2 - f3});
    double b = std::min({f1, c - best2, f12 - best2});
    if (b > a) {
      best1 = golden_max([&](double x) { return value_at(x, best2); }, a, b, 60);
    }
    a = std::max({0.0, c - f13, c - best1 - f3});
    b = std::min({f2, c - best1, f12 - best1});
    if (b > a) {
      best2 = golden_max([&](double x) { return value_at(best1, x); }, a, b, 60);
    }
  }
  return {best1, best2, c - best1 - best2};
}

}  // namespace macrate
