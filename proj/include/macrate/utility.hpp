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

#ifndef MACRATE_UTILITY_HPP
#define MACRATE_UTILITY_HPP

#include <functional>
#include <vector>

#include "macrate/region.hpp"

namespace macrate {

/// Weighted alpha-fair utility value sum_i w_i f_alpha(r_i) with
/// f_alpha(x) = x^(1-alpha)/(1-alpha) (ln x at alpha = 1).
/// Rejects nonpositive rates when alpha >= 1.
double alpha_fair_value(const Vec& weights, double alpha, const Vec& rates);

/// Subgradient components w_i r_i^(-alpha). Rejects nonpositive rates for
/// alpha > 0.
Vec alpha_fair_subgradient(const Vec& weights, double alpha, const Vec& rates);

/// Concave, coordinate-wise nondecreasing utility with value and subgradient
/// oracles. Alpha-fair models with alpha > 0 evaluate on the effective domain
/// {r >= r_min}: inputs are clamped at the rate floor, which bounds the
/// subgradient (alpha-fair functions with alpha >= 1 have unbounded
/// subgradients at the origin).
class UtilityModel {
 public:
  static UtilityModel alpha_fair(Vec weights, double alpha, double r_min = 1e-3);
  static UtilityModel linear(Vec weights);
  // Generic concave utility from user-supplied oracles.
  static UtilityModel custom(std::function<double(const Vec&)> value,
                             std::function<Vec(const Vec&)> subgradient,
                             bool differentiable, double subgradient_bound);

  double value(const Vec& rates) const;
  Vec subgradient(const Vec& rates) const;
  bool differentiable() const { return differentiable_; }

  bool is_alpha_fair() const { return kind_ == Kind::AlphaFair; }
  double alpha() const { return alpha_; }
  const Vec& weights() const { return weights_; }
  double rate_floor() const { return r_min_; }

  /// B of the subgradient bound assumption: max_i w_i r_min^(-alpha) for
  /// alpha-fair models, or the supplied constant for custom ones.
  double subgradient_bound() const;

  /// Largest eigenvalue of -Hessian at r (alpha-fair only; diagonal).
  double max_curvature(const Vec& rates) const;

 private:
  enum class Kind { AlphaFair, Custom };
  UtilityModel() = default;

  Kind kind_ = Kind::AlphaFair;
  Vec weights_;
  double alpha_ = 0.0;
  double r_min_ = 1e-3;
  bool differentiable_ = true;
  double custom_bound_ = 0.0;
  std::function<double(const Vec&)> value_fn_;
  std::function<Vec(const Vec&)> subgrad_fn_;
};

/// Stepsize schedules for the subgradient iteration: constant alpha or
/// diminishing a/(k+1).
struct StepsizeRule {
  enum class Kind { Constant, Diminishing };
  Kind kind = Kind::Constant;
  double a = 0.1;

  static StepsizeRule constant(double alpha);
  static StepsizeRule diminishing(double a);
  double at(int k) const;
};

}  // namespace macrate

#endif  // MACRATE_UTILITY_HPP
