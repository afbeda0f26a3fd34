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

#include "macrate/utility.hpp"

#include <cmath>
#include <stdexcept>

namespace macrate {

namespace {

double f_alpha(double x, double alpha) {
  if (alpha == 1.0) return std::log(x);
  return std::pow(x, 1.0 - alpha) / (1.0 - alpha);
}

void check_weights(const Vec& w) {
  if (w.empty()) throw std::invalid_argument("utility: empty weights");
  for (double x : w) {
    if (!(x > 0) || !std::isfinite(x)) {
      throw std::invalid_argument("utility: weights must be positive");
    }
  }
}

}  // namespace

double alpha_fair_value(const Vec& weights, double alpha, const Vec& rates) {
  check_weights(weights);
  if (alpha < 0) throw std::invalid_argument("alpha_fair_value: alpha must be >= 0");
  if (rates.size() != weights.size()) {
    throw std::invalid_argument("alpha_fair_value: size mismatch");
  }
  double v = 0.0;
  for (std::size_t i = 0; i < rates.size(); ++i) {
    if (rates[i] < 0 || (alpha >= 1.0 && rates[i] <= 0)) {
      throw std::domain_error("alpha_fair_value: rate outside the utility domain");
    }
    v += weights[i] * f_alpha(rates[i], alpha);
  }
  return v;
}

Vec alpha_fair_subgradient(const Vec& weights, double alpha, const Vec& rates) {
  check_weights(weights);
  if (alpha < 0) throw std::invalid_argument("alpha_fair_subgradient: alpha must be >= 0");
  if (rates.size() != weights.size()) {
    throw std::invalid_argument("alpha_fair_subgradient: size mismatch");
  }
  Vec g(rates.size());
  for (std::size_t i = 0; i < rates.size(); ++i) {
    if (rates[i] < 0 || (alpha > 0.0 && rates[i] <= 0)) {
      throw std::domain_error("alpha_fair_subgradient: rate outside the utility domain");
    }
    g[i] = weights[i] * std::pow(rates[i], -alpha);
  }
  return g;
}

UtilityModel UtilityModel::alpha_fair(Vec weights, double alpha, double r_min) {
  check_weights(weights);
  if (alpha < 0) throw std::invalid_argument("utility: alpha must be >= 0");
  if (!(r_min > 0)) throw std::invalid_argument("utility: rate floor must be positive");
  UtilityModel u;
  u.kind_ = Kind::AlphaFair;
  u.weights_ = std::move(weights);
  u.alpha_ = alpha;
  u.r_min_ = r_min;
  u.differentiable_ = true;
  return u;
}

UtilityModel UtilityModel::linear(Vec weights) { return alpha_fair(std::move(weights), 0.0); }

UtilityModel UtilityModel::custom(std::function<double(const Vec&)> value,
                                  std::function<Vec(const Vec&)> subgradient,
                                  bool differentiable, double subgradient_bound) {
  UtilityModel u;
  u.kind_ = Kind::Custom;
  u.value_fn_ = std::move(value);
  u.subgrad_fn_ = std::move(subgradient);
  u.differentiable_ = differentiable;
  u.custom_bound_ = subgradient_bound;
  return u;
}

double UtilityModel::value(const Vec& rates) const {
  if (kind_ == Kind::Custom) return value_fn_(rates);
  if (rates.size() != weights_.size()) throw std::invalid_argument("utility: size mismatch");
  double v = 0.0;
  for (std::size_t i = 0; i < rates.size(); ++i) {
    double r = rates[i];
    if (alpha_ > 0.0) r = std::max(r, r_min_);
    else r = std::max(r, 0.0);
    v += weights_[i] * f_alpha(r, alpha_);
  }
  return v;
}

Vec UtilityModel::subgradient(const Vec& rates) const {
  if (kind_ == Kind::Custom) return subgrad_fn_(rates);
  if (rates.size() != weights_.size()) throw std::invalid_argument("utility: size mismatch");
  Vec g(rates.size());
  for (std::size_t i = 0; i < rates.size(); ++i) {
    double r = std::max(rates[i], r_min_);
    g[i] = weights_[i] * std::pow(r, -alpha_);
  }
  return g;
}

double UtilityModel::subgradient_bound() const {
  if (kind_ == Kind::Custom) return custom_bound_;
  double b = 0.0;
  for (double w : weights_) b = std::max(b, w * std::pow(r_min_, -alpha_));
  return b;
}

double UtilityModel::max_curvature(const Vec& rates) const {
  if (kind_ != Kind::AlphaFair) {
    throw std::invalid_argument("utility: curvature available for alpha-fair models only");
  }
  double c = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    double r = std::max(rates[i], r_min_);
    c = std::max(c, alpha_ * weights_[i] * std::pow(r, -alpha_ - 1.0));
  }
  return c;
}

StepsizeRule StepsizeRule::constant(double alpha) {
  if (!(alpha > 0)) throw std::invalid_argument("stepsize: must be positive");
  return {Kind::Constant, alpha};
}

StepsizeRule StepsizeRule::diminishing(double a) {
  if (!(a > 0)) throw std::invalid_argument("stepsize: must be positive");
  return {Kind::Diminishing, a};
}

double StepsizeRule::at(int k) const {
  return kind == Kind::Constant ? a : a / static_cast<double>(k + 1);
}

}  // namespace macrate
