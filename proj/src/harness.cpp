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

#include "macrate/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "macrate/rng.hpp"
#include "macrate/solvers.hpp"

namespace macrate {

namespace {

Vec vec_from_json(const Json& j) {
  if (!j.is_array()) throw std::invalid_argument("expected a JSON array of numbers");
  Vec v;
  v.reserve(j.size());
  for (const auto& x : j) v.push_back(x.get<double>());
  return v;
}

double euclid(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

GaussianMacRegion region_from_json(const Json& j) {
  if (!j.contains("powers") || !j.contains("noise")) {
    throw std::invalid_argument("region spec needs powers and noise");
  }
  Vec powers = vec_from_json(j.at("powers"));
  Vec gains = j.contains("gains") ? vec_from_json(j.at("gains")) : Vec(powers.size(), 1.0);
  return GaussianMacRegion(std::move(powers), std::move(gains), j.at("noise").get<double>());
}

Json region_to_json(const GaussianMacRegion& region) {
  return Json{{"powers", region.powers()}, {"gains", region.gains()}, {"noise", region.noise()}};
}

FadingProcess process_from_json(const Json& j) {
  if (!j.contains("users")) throw std::invalid_argument("process spec needs a users array");
  std::vector<UserChain> users;
  for (const auto& uj : j.at("users")) {
    UserChain c;
    c.states = vec_from_json(uj.at("states"));
    for (const auto& row : uj.at("transition")) c.transition.push_back(vec_from_json(row));
    if (uj.contains("initial")) {
      c.initial = vec_from_json(uj.at("initial"));
    } else {
      // Default to the stationary distribution.
      FadingProcess probe({UserChain{c.states, c.transition, Vec(c.states.size(),
                                                                 1.0 / c.states.size())}});
      c.initial = probe.stationary(0);
    }
    users.push_back(std::move(c));
  }
  return FadingProcess(std::move(users));
}

Json process_to_json(const FadingProcess& process) {
  Json users = Json::array();
  for (int i = 0; i < process.num_users(); ++i) {
    const UserChain& c = process.user(i);
    users.push_back(Json{{"states", c.states}, {"transition", c.transition},
                         {"initial", c.initial}});
  }
  return Json{{"users", users}};
}

UtilityModel utility_from_json(const Json& j) {
  std::string kind = j.value("kind", std::string("alpha_fair"));
  if (kind != "alpha_fair" && kind != "linear") {
    throw std::invalid_argument("utility spec: unknown kind " + kind);
  }
  Vec weights = vec_from_json(j.at("weights"));
  if (kind == "linear") return UtilityModel::linear(std::move(weights));
  double alpha = j.at("alpha").get<double>();
  double r_min = j.value("r_min", 1e-3);
  return UtilityModel::alpha_fair(std::move(weights), alpha, r_min);
}

UserChain preset_chain(const std::string& name) {
  UserChain c;
  if (name == "high") {
    // sigma_H / Hbar = 1.22, unit mean
    c.states = {0.2574931048998419, 0.7724793146995257, 2.188691391648656, 6.241832635963359};
    c.transition = {{0.75, 0.25, 0.0, 0.0},
                    {0.30, 0.55, 0.15, 0.0},
                    {0.0, 0.30, 0.64, 0.06},
                    {0.0, 0.0, 0.30, 0.70}};
  } else if (name == "mid") {
    // sigma_H / Hbar = 0.50
    c.states = {0.556004771223839, 0.9266746187063981, 1.2973444661889575, 2.223670035097071};
    c.transition = {{0.75, 0.25, 0.0, 0.0},
                    {0.30, 0.50, 0.20, 0.0},
                    {0.0, 0.30, 0.55, 0.15},
                    {0.0, 0.0, 0.30, 0.70}};
  } else if (name == "low") {
    // sigma_H / Hbar = 0.13
    c.states = {0.8807063475588215, 0.9831140623912425, 1.0855217772236638, 1.3090714071671872};
    c.transition = {{0.75, 0.25, 0.0, 0.0},
                    {0.30, 0.50, 0.20, 0.0},
                    {0.0, 0.30, 0.55, 0.15},
                    {0.0, 0.0, 0.30, 0.70}};
  } else {
    throw std::invalid_argument("preset_chain: unknown preset " + name);
  }
  FadingProcess probe({UserChain{c.states, c.transition, Vec(4, 0.25)}});
  c.initial = probe.stationary(0);
  return c;
}

FadingProcess preset_process(const std::string& name, int users) {
  std::vector<UserChain> chains(users, preset_chain(name));
  return FadingProcess(std::move(chains));
}

ExperimentSpec experiment_from_json(const Json& j) {
  ExperimentSpec spec;
  spec.id = j.value("id", std::string("experiment"));
  if (j.contains("preset_process")) {
    int users = j.value("users", 2);
    spec.process = process_to_json(preset_process(j.at("preset_process").get<std::string>(),
                                                  users));
  } else {
    spec.process = j.at("process");
  }
  spec.powers = vec_from_json(j.at("powers"));
  spec.noise = j.at("noise").get<double>();
  spec.utility = j.at("utility");
  for (const auto& pj : j.at("policies")) {
    PolicySpec p;
    p.name = pj.at("name").get<std::string>();
    p.params = pj;
    spec.policies.push_back(std::move(p));
  }
  spec.horizon = j.at("horizon").get<int>();
  spec.replications = j.value("replications", 1);
  spec.seed = j.value("seed", std::uint64_t{1});
  spec.reference_samples = j.value("reference_samples", 200000L);
  spec.greedy_tol = j.value("greedy_tol", 1e-6);
  spec.greedy_max_iter = j.value("greedy_max_iter", 2000);
  if (spec.horizon < 1) throw std::invalid_argument("experiment: horizon must be >= 1");
  if (spec.replications < 1) throw std::invalid_argument("experiment: replications >= 1");
  return spec;
}

Json experiment_to_json(const ExperimentSpec& spec) {
  Json policies = Json::array();
  for (const PolicySpec& p : spec.policies) policies.push_back(p.params);
  return Json{{"id", spec.id},
              {"process", spec.process},
              {"powers", spec.powers},
              {"noise", spec.noise},
              {"utility", spec.utility},
              {"policies", policies},
              {"horizon", spec.horizon},
              {"replications", spec.replications},
              {"seed", spec.seed},
              {"reference_samples", spec.reference_samples}};
}

ExperimentSpec preset_experiment(const std::string& name) {
  Json j{{"powers", {1.0, 1.0}},
         {"noise", 1.0},
         {"utility", {{"kind", "alpha_fair"}, {"alpha", 2.0}, {"weights", {1.5, 1.0}},
                      {"r_min", 1e-3}}},
         {"horizon", 1000},
         {"replications", 20},
         {"seed", 20260801},
         {"users", 2},
         {"policies", Json::array({Json{{"name", "greedy"}},
                                   Json{{"name", "queue"}, {"K", 4.0}, {"D", 2.0},
                                        {"arrivals", "deterministic"}}})}};
  if (name == "fig5" || name == "fig6-high") {
    j["id"] = name;
    j["preset_process"] = "high";
  } else if (name == "fig6-low") {
    j["id"] = name;
    j["preset_process"] = "low";
  } else {
    throw std::invalid_argument("preset_experiment: unknown preset " + name);
  }
  return experiment_from_json(j);
}

std::string trace_to_csv(const PolicyTrace& trace) {
  const int n = trace.length();
  const int m = n > 0 ? static_cast<int>(trace.rates[0].size()) : 0;
  std::string out = "n";
  for (int i = 1; i <= m; ++i) out += ",h_" + std::to_string(i);
  for (int i = 1; i <= m; ++i) out += ",r_" + std::to_string(i);
  out += ",utility";
  for (int i = 1; i <= m; ++i) out += ",avg_r_" + std::to_string(i);
  for (int i = 1; i <= m; ++i) out += ",queue_" + std::to_string(i);
  out += ",iters\n";
  for (int t = 0; t < n; ++t) {
    out += std::to_string(t);
    for (int i = 0; i < m; ++i) out += "," + format_double(trace.gains[t][i]);
    for (int i = 0; i < m; ++i) out += "," + format_double(trace.rates[t][i]);
    out += "," + format_double(trace.utility[t]);
    for (int i = 0; i < m; ++i) out += "," + format_double(trace.avg_rates[t][i]);
    for (int i = 0; i < m; ++i) {
      out += "," + (trace.queues.empty() ? std::string("0") : format_double(trace.queues[t][i]));
    }
    out += "," + std::to_string(trace.iterations[t]) + "\n";
  }
  return out;
}

namespace {

PolicyTrace run_policy(const PolicySpec& p, const ChannelPath& path, const UtilityModel& u,
                       const ExperimentSpec& spec, const FadingProcess& process,
                       std::uint64_t arrival_seed) {
  if (p.name == "greedy") {
    return greedy_policy_run(path, u, spec.powers, spec.noise, spec.greedy_tol,
                             spec.greedy_max_iter);
  }
  if (p.name == "approximate") {
    int k;
    double alpha;
    if (p.params.value("auto", false)) {
      double A = p.params.at("A").get<double>();
      double B = p.params.at("B").get<double>();
      FadingStatistics st = step_statistics(process, spec.powers);
      TrackingParameters tp = worst_case_parameters(A, B, st.w_hat);
      k = tp.k;
      alpha = tp.alpha;
    } else {
      k = p.params.at("k").get<int>();
      alpha = p.params.at("alpha").get<double>();
    }
    return approximate_policy_run(path, u, spec.powers, spec.noise, k, alpha);
  }
  if (p.name == "improved") {
    double gamma, alpha;
    int k;
    if (p.params.value("auto", false)) {
      double A = p.params.at("A").get<double>();
      double B = p.params.at("B").get<double>();
      FadingStatistics st = step_statistics(process, spec.powers);
      TrackingParameters tp = average_case_parameters(A, B, st.w_hat, st.w_bar);
      gamma = tp.gamma;
      k = tp.k;
      alpha = tp.alpha;
    } else {
      gamma = p.params.at("gamma").get<double>();
      k = p.params.at("k").get<int>();
      alpha = p.params.at("alpha").get<double>();
    }
    return improved_policy_run(path, u, spec.powers, spec.noise, gamma, k, alpha).trace;
  }
  if (p.name == "queue") {
    double K = p.params.at("K").get<double>();
    double D = p.params.at("D").get<double>();
    std::string a = p.params.value("arrivals", std::string("deterministic"));
    ArrivalModel model =
        a == "poisson" ? ArrivalModel::kPoisson : ArrivalModel::kDeterministicMean;
    return queue_policy_run(path, u, spec.powers, spec.noise, K, D, model, arrival_seed);
  }
  throw std::invalid_argument("unknown policy: " + p.name);
}

}  // namespace

Json result_to_json(const ExperimentResult& result, bool include_wall_clock) {
  Json outcomes = Json::array();
  for (const PolicyOutcome& o : result.outcomes) {
    Json checkpoints = Json::array();
    for (auto [slot, d] : o.distance_checkpoints) {
      checkpoints.push_back(Json{{"slot", slot}, {"distance", d}});
    }
    Json oj{{"policy", o.policy},
            {"policy_index", o.policy_index},
            {"replication", o.replication},
            {"final_avg_rates", o.final_avg_rates},
            {"utility_at_avg", o.utility_at_avg},
            {"distance_checkpoints", checkpoints},
            {"final_distance", o.final_distance},
            {"max_tracking_distance", o.max_tracking_distance},
            {"trace_path", o.trace_path}};
    if (include_wall_clock) oj["wall_clock_ms"] = o.wall_clock_ms;
    outcomes.push_back(std::move(oj));
  }
  return Json{{"id", result.id},
              {"reference", result.reference},
              {"reference_utility", result.reference_utility},
              {"sigma_sq", result.sigma_sq},
              {"w_hat", result.w_hat},
              {"w_bar", result.w_bar},
              {"outcomes", outcomes}};
}

ExperimentResult run_experiment(const ExperimentSpec& spec, const std::string& out_dir) {
  FadingProcess process = process_from_json(spec.process);
  UtilityModel u = utility_from_json(spec.utility);
  ExperimentResult result;
  result.id = spec.id;
  FadingStatistics st = step_statistics(process, spec.powers);
  result.sigma_sq = sigma_H_squared(st, spec.powers, spec.noise);
  result.w_hat = st.w_hat;
  result.w_bar = st.w_bar;
  const int m = process.num_users();
  if (m <= 3) {
    AveragedRegion averaged = estimate_averaged_region(process, spec.powers, spec.noise,
                                                       spec.reference_samples,
                                                       derive_seed(spec.seed, 0xAE6));
    result.reference = brute_force_optimum(averaged, u);
    result.reference_utility = u.value(result.reference);
  }
  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
  std::vector<int> checkpoints{10, 100, 1000};
  for (int rep = 0; rep < spec.replications; ++rep) {
    ChannelPath path = sample_path(process, spec.horizon, derive_seed(spec.seed, rep));
    std::vector<Vec> greedy_rates;  // for tracking distances, if a greedy run exists
    for (std::size_t pi = 0; pi < spec.policies.size(); ++pi) {
      const PolicySpec& p = spec.policies[pi];
      auto t0 = std::chrono::steady_clock::now();
      PolicyTrace trace = run_policy(p, path, u, spec, process,
                                     derive_seed(derive_seed(spec.seed, rep), 7700 + pi));
      auto t1 = std::chrono::steady_clock::now();
      PolicyOutcome o;
      o.policy = p.name;
      o.policy_index = static_cast<int>(pi);
      o.replication = rep;
      o.final_avg_rates = trace.avg_rates.back();
      o.utility_at_avg = u.value(o.final_avg_rates);
      o.wall_clock_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
      if (!result.reference.empty()) {
        for (int cp : checkpoints) {
          if (cp <= spec.horizon) {
            o.distance_checkpoints.emplace_back(cp, euclid(trace.avg_rates[cp - 1],
                                                           result.reference));
          }
        }
        o.final_distance = euclid(o.final_avg_rates, result.reference);
      }
      if (p.name == "greedy") {
        greedy_rates = trace.rates;
      } else if (!greedy_rates.empty()) {
        double worst = 0.0;
        for (int t = 0; t < trace.length(); ++t) {
          worst = std::max(worst, euclid(trace.rates[t], greedy_rates[t]));
        }
        o.max_tracking_distance = worst;
      }
      if (!out_dir.empty()) {
        std::string path_name = spec.id + "_" + std::to_string(pi) + "_" + p.name + "_rep" +
                                std::to_string(rep) + ".csv";
        std::ofstream f(std::filesystem::path(out_dir) / path_name, std::ios::binary);
        f << trace_to_csv(trace);
        o.trace_path = path_name;
      }
      result.outcomes.push_back(std::move(o));
    }
  }
  return result;
}

UploadSpec upload_from_json(const Json& j) {
  UploadSpec spec;
  spec.id = j.value("id", std::string("upload"));
  spec.files = vec_from_json(j.at("files"));
  for (double f : spec.files) {
    if (!(f > 0)) throw std::invalid_argument("upload: file sizes must be positive");
  }
  spec.policy.name = j.at("policy").at("name").get<std::string>();
  spec.policy.params = j.at("policy");
  if (j.contains("preset_process")) {
    spec.process = process_to_json(
        preset_process(j.at("preset_process").get<std::string>(),
                       static_cast<int>(spec.files.size())));
  } else {
    spec.process = j.at("process");
  }
  spec.powers = vec_from_json(j.at("powers"));
  spec.noise = j.at("noise").get<double>();
  spec.utility = j.at("utility");
  spec.horizon_cap = j.value("horizon_cap", 200000L);
  spec.seed = j.value("seed", std::uint64_t{1});
  return spec;
}

UploadResult run_upload(const UploadSpec& spec) {
  FadingProcess process = process_from_json(spec.process);
  UtilityModel u = utility_from_json(spec.utility);
  const int m = process.num_users();
  if (static_cast<int>(spec.files.size()) != m) {
    throw std::invalid_argument("upload: files/process size mismatch");
  }
  ChannelPath path = sample_path(process, static_cast<int>(spec.horizon_cap),
                                 derive_seed(spec.seed, 0));
  UploadResult result;
  result.completion_slots.assign(m, -1);
  result.upload_rates.assign(m, 0.0);
  Vec delivered(m, 0.0);

  if (spec.policy.name == "greedy") {
    std::vector<int> active(m);
    std::iota(active.begin(), active.end(), 0);
    Vec warm;
    for (long t = 0; t < spec.horizon_cap && !active.empty(); ++t) {
      Vec sub_gains, sub_powers, sub_weights;
      for (int i : active) {
        sub_gains.push_back(path.gains[t][i]);
        sub_powers.push_back(spec.powers[i]);
        sub_weights.push_back(u.weights()[i]);
      }
      UtilityModel sub_u = UtilityModel::alpha_fair(sub_weights, u.alpha(), u.rate_floor());
      if (warm.size() != sub_gains.size()) warm.clear();
      Vec r = greedy_step(sub_gains, sub_u, sub_powers, spec.noise,
                          warm.empty() ? nullptr : &warm, 1e-6, 2000);
      warm = r;
      bool finished_someone = false;
      for (std::size_t k = 0; k < active.size(); ++k) {
        int i = active[k];
        delivered[i] += r[k];
        if (delivered[i] >= spec.files[i] - 1e-12 && result.completion_slots[i] < 0) {
          result.completion_slots[i] = t + 1;
          finished_someone = true;
        }
      }
      if (finished_someone) {
        std::vector<int> next;
        for (int i : active) {
          if (result.completion_slots[i] < 0) next.push_back(i);
        }
        active = std::move(next);
        warm.clear();
      }
    }
  } else if (spec.policy.name == "queue") {
    double K = spec.policy.params.at("K").get<double>();
    double D = spec.policy.params.at("D").get<double>();
    std::string a = spec.policy.params.value("arrivals", std::string("deterministic"));
    ArrivalModel model =
        a == "poisson" ? ArrivalModel::kPoisson : ArrivalModel::kDeterministicMean;
    Rng rng(derive_seed(derive_seed(spec.seed, 0), 0x71e5u));
    Vec x(m, 0.0), admitted_total(m, 0.0);
    const Vec& w = u.weights();
    int remaining_users = m;
    for (long t = 0; t < spec.horizon_cap && remaining_users > 0; ++t) {
      GaussianMacRegion region(spec.powers, path.gains[t], spec.noise);
      Vec mu = linear_maximize(region, x);
      for (int i = 0; i < m; ++i) {
        double served = std::min(x[i], mu[i]);
        delivered[i] += served;
        if (delivered[i] >= spec.files[i] - 1e-12 && result.completion_slots[i] < 0) {
          result.completion_slots[i] = t + 1;
          --remaining_users;
        }
        double remaining_admit = spec.files[i] - admitted_total[i];
        double mean = x[i] <= 0.0 ? D : std::min(K * std::pow(w[i] / x[i], 1.0 / u.alpha()), D);
        double arrival = model == ArrivalModel::kDeterministicMean
                             ? mean
                             : static_cast<double>(rng.poisson(mean));
        arrival = std::min(arrival, std::max(0.0, remaining_admit));
        admitted_total[i] += arrival;
        x[i] = std::max(0.0, x[i] - mu[i]) + arrival;
      }
    }
  } else {
    throw std::invalid_argument("upload: unsupported policy " + spec.policy.name);
  }

  for (int i = 0; i < m; ++i) {
    if (result.completion_slots[i] > 0) {
      result.upload_rates[i] = spec.files[i] / static_cast<double>(result.completion_slots[i]);
    } else {
      result.all_finished = false;
      result.unfinished.push_back(i);
      result.upload_rates[i] = delivered[i] / static_cast<double>(spec.horizon_cap);
    }
  }
  result.utility = u.value(result.upload_rates);
  return result;
}

Json upload_result_to_json(const UploadResult& result) {
  return Json{{"completion_slots", result.completion_slots},
              {"upload_rates", result.upload_rates},
              {"utility", result.utility},
              {"all_finished", result.all_finished},
              {"unfinished", result.unfinished}};
}

std::string bound_curves_csv(const FadingProcess& process, const Vec& powers, double noise,
                             const UtilityModel& u, int n_points, std::uint64_t seed,
                             double a_override, double b_override) {
  FadingStatistics st = step_statistics(process, powers);
  double sigma_sq = sigma_H_squared(st, powers, noise);
  double sigma = std::sqrt(sigma_sq);
  AveragedRegion averaged = exact_averaged_region(process, powers, noise);
  Vec r_star = brute_force_optimum(averaged, u);
  // The variation bound needs a nonnegative utility; shift by the lowest
  // dominant-face vertex value (concave u attains its face minimum at a
  // vertex; the shift changes neither gaps nor constants, only the u* that
  // enters the bound).
  const int m = process.num_users();
  double vertex_min = 0.0;
  std::vector<int> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    Vec vertex(m);
    Subset prefix = 0;
    double prev = 0.0;
    for (int idx : perm) {
      prefix |= Subset{1} << idx;
      vertex[idx] = averaged.rank(prefix) - prev;
      prev = averaged.rank(prefix);
    }
    vertex_min = std::min(vertex_min, u.value(vertex));
  } while (std::next_permutation(perm.begin(), perm.end()));
  double shift = -vertex_min + 1e-9;
  double u_star = u.value(r_star) + shift;
  UtilityConstants con = estimate_utility_constants(u, process, powers, noise, 160,
                                                    derive_seed(seed, 0xb0d));
  if (a_override > 0) con.A = a_override;
  if (b_override > 0) con.B = b_override;
  // The width term of r(eps) does not depend on eps; estimate it once.
  double width = r_epsilon(process, powers, noise, 1.0, 0.0, 20000, derive_seed(seed, 0xe5));
  double eps_min = 0.001;
  double re_max = std::sqrt(static_cast<double>(process.num_users())) * sigma /
                      std::sqrt(eps_min) +
                  width;
  double omega = con.Omega;
  if (u.is_alpha_fair()) {
    // One conservative curvature bound over the largest r(eps) ball.
    omega = estimate_utility_constants(u, process, powers, noise, 64,
                                       derive_seed(seed, 0x03e6), r_star, re_max)
                .Omega;
  }
  std::string out = "delta,variation_bound,eps,r_eps,curvature_bound\n";
  double d_lo = std::max(sigma_sq, 1e-4);
  double d_hi = std::max(4.0, 8.0 * sigma);
  for (int i = 0; i < n_points; ++i) {
    double t = static_cast<double>(i) / (n_points - 1);
    double delta = d_lo * std::pow(d_hi / d_lo, t);
    double vb = gap_bound_variation(delta, sigma_sq, con.A, con.B, u_star);
    double eps = eps_min + (1.0 - eps_min) * t;
    double re = std::sqrt(static_cast<double>(process.num_users())) * sigma / std::sqrt(eps) +
                width;
    double cb = gap_bound_curvature(eps, omega, re, u_star);
    out += format_double(delta) + "," + format_double(vb) + "," + format_double(eps) + "," +
           format_double(re) + "," + format_double(cb) + "\n";
  }
  return out;
}

Json bounds_report(const FadingProcess& process, const Vec& powers, double noise,
                   const UtilityModel& u, std::uint64_t seed) {
  FadingStatistics st = step_statistics(process, powers);
  double sigma_sq = sigma_H_squared(st, powers, noise);
  Json j{{"mean_gains", st.mean},
         {"v_hat", st.v_hat},
         {"w_hat", st.w_hat},
         {"w_bar", st.w_bar},
         {"sigma_sq", sigma_sq}};
  Vec variances;
  for (int i = 0; i < process.num_users(); ++i) variances.push_back(st.cov[i][i]);
  j["stationary_variances"] = variances;
  if (process.num_users() <= 3) {
    AveragedRegion averaged = exact_averaged_region(process, powers, noise);
    Vec r_star = brute_force_optimum(averaged, u);
    j["reference"] = r_star;
    j["reference_utility"] = u.value(r_star);
    UtilityConstants con = estimate_utility_constants(u, process, powers, noise, 160,
                                                      derive_seed(seed, 0xb0d));
    j["A_est"] = con.A;
    j["B_est"] = con.B;
    j["Omega_est"] = con.Omega;
    j["degenerate_constants"] = con.degenerate;
    try {
      TrackingParameters wc = worst_case_parameters(con.A, con.B, st.w_hat);
      j["worst_case"] = Json{{"k", wc.k}, {"alpha", wc.alpha}, {"theta", wc.theta},
                             {"radius", wc.radius}, {"w_prime", wc.w_prime}};
    } catch (const std::exception& e) {
      j["worst_case"] = Json{{"error", e.what()}};
    }
    TrackingParameters ac = average_case_parameters(con.A, con.B, st.w_hat, st.w_bar);
    j["average_case"] = Json{{"gamma", ac.gamma}, {"k", ac.k}, {"alpha", ac.alpha},
                             {"radius", ac.radius}, {"c", ac.c}};
  }
  return j;
}

}  // namespace macrate
