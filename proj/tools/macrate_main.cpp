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

// macrate: rate allocation over Gaussian multiple-access capacity regions.
//
// Subcommands: project, check, solve, simulate, bounds, upload.
// All rates are nats per channel use; --bits converts printed rates only
// (trace CSV files always stay in nats).

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "macrate/harness.hpp"
#include "macrate/policies.hpp"
#include "macrate/projection.hpp"
#include "macrate/rng.hpp"
#include "macrate/solvers.hpp"

namespace {

using macrate::Json;
using macrate::Vec;

constexpr double kNatsToBits = 1.4426950408889634;  // 1/ln 2

Vec parse_vec(const std::string& csv) {
  Vec v;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) v.push_back(std::stod(tok));
  }
  if (v.empty()) throw std::invalid_argument("expected a comma-separated list of numbers");
  return v;
}

Json load_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot open " + path);
  return Json::parse(f);
}

Vec maybe_bits(Vec rates, bool bits) {
  if (bits) {
    for (double& r : rates) r *= kNatsToBits;
  }
  return rates;
}

void write_or_print(const std::string& out_dir, const std::string& name,
                    const std::string& content) {
  if (out_dir.empty()) {
    std::cout << content;
    if (!content.empty() && content.back() != '\n') std::cout << '\n';
  } else {
    std::filesystem::create_directories(out_dir);
    std::ofstream f(std::filesystem::path(out_dir) / name, std::ios::binary);
    f << content;
    // Keep stdout machine-readable; the path goes to stderr.
    std::cerr << (std::filesystem::path(out_dir) / name).string() << '\n';
  }
}

macrate::UtilityModel utility_from_flags(const std::string& weights, double alpha,
                                         double r_min) {
  return macrate::UtilityModel::alpha_fair(parse_vec(weights), alpha, r_min);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Utility-maximizing rate allocation over Gaussian MAC capacity regions"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  std::string out_dir;
  std::string format = "json";
  bool bits = false;
  app.add_option("--seed", seed, "Base seed for every random quantity");
  app.add_option("--out-dir", out_dir, "Directory for emitted files (stdout when empty)");
  app.add_option("--format", format, "Output format for tabular data")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_flag("--bits", bits, "Print rates in bits instead of nats (output only)");

  // project
  auto* project = app.add_subcommand("project", "Approximate-project a point onto a region");
  std::string region_path, point_arg;
  project->add_option("--region", region_path, "Region JSON file {powers, gains, noise}")
      ->required();
  project->add_option("--point", point_arg, "Comma-separated point to project")->required();

  // check
  auto* check = app.add_subcommand("check", "Rate-splitting feasibility check of a rate point");
  std::string check_region, check_point;
  check->add_option("--region", check_region, "Region JSON file")->required();
  check->add_option("--point", check_point, "Comma-separated rate vector")->required();

  // solve
  auto* solve = app.add_subcommand("solve", "Static utility maximization over a region");
  std::string solve_region, solve_weights = "1", solve_rule = "diminishing";
  std::string solve_method = "gradient_projection";
  double solve_alpha = 1.0, solve_rule_a = 0.1, solve_tol = 1e-9, solve_rmin = 1e-3;
  int solve_max_iter = 50000;
  solve->add_option("--region", solve_region, "Region JSON file")->required();
  solve->add_option("--alpha", solve_alpha, "Alpha-fair exponent (0 = linear)");
  solve->add_option("--weights", solve_weights, "Comma-separated utility weights")->required();
  solve->add_option("--r-min", solve_rmin, "Rate floor of the utility's effective domain");
  solve->add_option("--rule", solve_rule, "Stepsize rule")
      ->check(CLI::IsMember({"constant", "diminishing", "safe"}));
  solve->add_option("--rule-a", solve_rule_a, "Stepsize constant a");
  solve->add_option("--method", solve_method, "Solver")
      ->check(CLI::IsMember({"gradient_projection", "conditional_gradient"}));
  solve->add_option("--max-iter", solve_max_iter, "Iteration cap");
  solve->add_option("--tol", solve_tol, "Stagnation / duality-gap tolerance");

  // simulate
  auto* simulate = app.add_subcommand(
      "simulate",
      "Dynamic policy simulation over fading paths. Trace CSV columns: "
      "n, h_1..h_M, r_1..r_M, utility, avg_r_1..avg_r_M, queue_1..queue_M, iters "
      "(rates in nats, 17 significant digits)");
  std::string experiment_path, experiment_preset;
  simulate->add_option("--experiment", experiment_path, "Experiment JSON file");
  simulate->add_option("--preset", experiment_preset, "Preset: fig5 | fig6-high | fig6-low");

  // bounds
  auto* bounds = app.add_subcommand("bounds", "Bound calculators for a channel configuration");
  std::string bounds_process, bounds_preset = "high", bounds_powers = "1,1";
  std::string bounds_weights = "1.5,1";
  double bounds_noise = 1.0, bounds_alpha = 2.0, bounds_rmin = 1e-3;
  int bounds_users = 2, sweep_n = 0;
  bool channel_only = false;
  bounds->add_option("--process", bounds_process, "Process JSON file");
  bounds->add_option("--preset", bounds_preset, "Chain preset: high | mid | low");
  bounds->add_option("--users", bounds_users, "Number of users for the preset");
  bounds->add_option("--powers", bounds_powers, "Comma-separated transmit powers");
  bounds->add_option("--noise", bounds_noise, "Noise power N0");
  bounds->add_option("--alpha", bounds_alpha, "Alpha-fair exponent");
  bounds->add_option("--weights", bounds_weights, "Utility weights");
  bounds->add_option("--r-min", bounds_rmin, "Utility rate floor");
  bounds->add_flag("--channel", channel_only, "Print channel statistics only");
  bounds->add_option("--sweep", sweep_n, "Emit a bound-curve CSV with this many points");

  // upload
  auto* upload = app.add_subcommand("upload", "File-upload completion scenario");
  // Global flags may appear before or after the subcommand name.
  for (CLI::App* sub : {project, check, solve, simulate, bounds, upload}) sub->fallthrough();
  std::string upload_path;
  upload->add_option("--spec", upload_path, "Upload scenario JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() != 0) {
      Json err{{"error", e.what()}, {"kind", "usage"}};
      std::cerr << err.dump() << '\n';
    }
    return app.exit(e);
  }

  try {
    if (project->parsed()) {
      macrate::GaussianMacRegion region = macrate::region_from_json(load_json(region_path));
      Vec point = parse_vec(point_arg);
      std::vector<macrate::Subset> subsets;
      Vec projected = macrate::approximate_project(point, region, &subsets);
      Json out{{"projected", maybe_bits(projected, bits)}, {"units", bits ? "bits" : "nats"}};
      Json seq = Json::array();
      for (macrate::Subset s : subsets) {
        std::vector<int> members;
        for (int i = 0; i < region.dimension(); ++i) {
          if (s >> i & 1) members.push_back(i + 1);
        }
        seq.push_back(members);
      }
      out["projected_subsets"] = seq;
      if (format == "csv") {
        std::string csv = "coordinate,value\n";
        Vec shown = maybe_bits(projected, bits);
        for (std::size_t i = 0; i < shown.size(); ++i) {
          csv += "r_" + std::to_string(i + 1) + "," + macrate::format_double(shown[i]) + "\n";
        }
        std::cout << csv;
      } else {
        std::cout << out.dump(2) << '\n';
      }
      return 0;
    }

    if (check->parsed()) {
      macrate::GaussianMacRegion region = macrate::region_from_json(load_json(check_region));
      Vec point = parse_vec(check_point);
      macrate::SpinoffResult r = macrate::rate_split_check(region.powers(), point,
                                                           region.gains(), region.noise());
      Json out{{"single_user_codable", r.single_user_codable}};
      if (r.single_user_codable) {
        Json order = Json::array();
        for (int i : r.decoding_order) order.push_back(i + 1);
        out["decoding_order"] = order;
      } else {
        Json viol = Json::array();
        for (int i : r.violated) viol.push_back(i + 1);
        out["violated"] = viol;
        out["violation_nats"] = r.violation;
      }
      std::cout << out.dump(2) << '\n';
      return 0;
    }

    if (solve->parsed()) {
      macrate::GaussianMacRegion region = macrate::region_from_json(load_json(solve_region));
      macrate::UtilityModel u = utility_from_flags(solve_weights, solve_alpha, solve_rmin);
      macrate::SolveOptions opts;
      opts.max_iter = solve_max_iter;
      opts.tol = solve_tol;
      opts.count_violations = region.dimension() <= macrate::kEnumerationGuard;
      opts.record_iterates = true;
      macrate::SolveReport report;
      if (solve_method == "conditional_gradient") {
        report = macrate::conditional_gradient_solve(region, u, {}, opts);
      } else {
        macrate::StepsizeRule rule = macrate::StepsizeRule::diminishing(solve_rule_a);
        if (solve_rule == "constant") rule = macrate::StepsizeRule::constant(solve_rule_a);
        if (solve_rule == "safe") {
          try {
            double b = u.subgradient_bound();
            rule = macrate::StepsizeRule::constant(
                macrate::safe_stepsize(region.effective_powers(), region.noise(), b));
          } catch (const std::domain_error& e) {
            Json warn{{"warning", e.what()}, {"fallback", "constant"}};
            std::cerr << warn.dump() << '\n';
            rule = macrate::StepsizeRule::constant(solve_rule_a);
          }
        }
        report = macrate::gradient_projection_solve(region, u, rule, {}, opts);
      }
      Json out{{"rates", maybe_bits(report.rates, bits)},
               {"utility", report.utility},
               {"iterations", report.iterations},
               {"converged", report.converged},
               {"units", bits ? "bits" : "nats"}};
      if (format == "csv") {
        Vec shown = maybe_bits(report.rates, bits);
        std::string csv = "user,rate\n";
        for (std::size_t i = 0; i < shown.size(); ++i) {
          csv += std::to_string(i + 1) + "," + macrate::format_double(shown[i]) + "\n";
        }
        std::cout << csv;
      } else {
        std::cout << out.dump(2) << '\n';
      }
      // Per-iteration CSV: iter, utility, distance-to-final, violations.
      std::string csv = "iter,utility,distance_to_final,violations\n";
      for (std::size_t k = 0; k < report.utilities.size(); ++k) {
        double dist = 0.0;
        if (k < report.iterates.size()) {
          for (std::size_t i = 0; i < report.rates.size(); ++i) {
            double d = report.iterates[k][i] - report.rates[i];
            dist += d * d;
          }
          dist = std::sqrt(dist);
        }
        csv += std::to_string(k) + "," + macrate::format_double(report.utilities[k]) + "," +
               macrate::format_double(dist) + ",";
        csv += (k < report.violation_counts.size() ? std::to_string(report.violation_counts[k])
                                                   : std::string("0")) +
               "\n";
      }
      if (!out_dir.empty()) write_or_print(out_dir, "solve_iterations.csv", csv);
      return 0;
    }

    if (simulate->parsed()) {
      macrate::ExperimentSpec spec;
      if (!experiment_preset.empty()) {
        spec = macrate::preset_experiment(experiment_preset);
      } else if (!experiment_path.empty()) {
        spec = macrate::experiment_from_json(load_json(experiment_path));
      } else {
        throw std::invalid_argument("simulate: give --experiment or --preset");
      }
      if (app.count("--seed") > 0) spec.seed = seed;
      macrate::ExperimentResult result = macrate::run_experiment(spec, out_dir);
      std::cout << macrate::result_to_json(result).dump(2) << '\n';
      return 0;
    }

    if (bounds->parsed()) {
      macrate::FadingProcess process =
          bounds_process.empty() ? macrate::preset_process(bounds_preset, bounds_users)
                                 : macrate::process_from_json(load_json(bounds_process));
      Vec powers = parse_vec(bounds_powers);
      macrate::FadingStatistics st = macrate::step_statistics(process, powers);
      if (channel_only) {
        Vec variances;
        for (int i = 0; i < process.num_users(); ++i) variances.push_back(st.cov[i][i]);
        Json out{{"mean_gains", st.mean},
                 {"stationary_variances", variances},
                 {"v_hat", st.v_hat},
                 {"w_hat", st.w_hat},
                 {"w_bar", st.w_bar},
                 {"sigma_sq", macrate::sigma_H_squared(st, powers, bounds_noise)}};
        std::cout << out.dump(2) << '\n';
        return 0;
      }
      macrate::UtilityModel u = utility_from_flags(bounds_weights, bounds_alpha, bounds_rmin);
      if (sweep_n > 1) {
        std::string csv =
            macrate::bound_curves_csv(process, powers, bounds_noise, u, sweep_n, seed);
        write_or_print(out_dir, "bound_curves.csv", csv);
        return 0;
      }
      Json out = macrate::bounds_report(process, powers, bounds_noise, u, seed);
      if (bits && out.contains("reference")) {
        out["reference"] = maybe_bits(out["reference"].get<Vec>(), true);
        out["units"] = "bits";
      }
      std::cout << out.dump(2) << '\n';
      return 0;
    }

    if (upload->parsed()) {
      macrate::UploadSpec spec = macrate::upload_from_json(load_json(upload_path));
      if (app.count("--seed") > 0) spec.seed = seed;
      macrate::UploadResult result = macrate::run_upload(spec);
      Json out = macrate::upload_result_to_json(result);
      if (bits) {
        out["upload_rates"] = maybe_bits(result.upload_rates, true);
        out["units"] = "bits";
      }
      std::cout << out.dump(2) << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    Json err{{"error", e.what()}};
    std::cerr << err.dump() << '\n';
    return 1;
  }
  return 0;
}
