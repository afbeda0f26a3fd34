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

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "macrate/channel.hpp"
#include "macrate/harness.hpp"
#include "macrate/policies.hpp"
#include "macrate/projection.hpp"
#include "macrate/region.hpp"
#include "macrate/rng.hpp"
#include "macrate/solvers.hpp"

namespace py = pybind11;
using namespace macrate;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Rate allocation over Gaussian multiple-access capacity regions";

  m.def("awgn_capacity", &awgn_capacity, py::arg("power"), py::arg("noise"),
        "Shannon capacity (1/2) ln(1 + power/noise), in nats");

  py::class_<RegionOracle>(m, "RegionOracle")
      .def("dimension", &RegionOracle::dimension)
      .def("rank", &RegionOracle::rank, py::arg("subset"));

  py::class_<GaussianMacRegion, RegionOracle>(m, "GaussianMacRegion")
      .def(py::init<Vec, Vec, double>(), py::arg("powers"), py::arg("gains"), py::arg("noise"))
      .def_property_readonly("powers", &GaussianMacRegion::powers)
      .def_property_readonly("gains", &GaussianMacRegion::gains)
      .def_property_readonly("noise", &GaussianMacRegion::noise);

  py::class_<AveragedRegion, RegionOracle>(m, "AveragedRegion")
      .def_property_readonly("n_samples", &AveragedRegion::n_samples)
      .def_property_readonly("rank_table", &AveragedRegion::rank_table);

  py::class_<TableRegion, RegionOracle>(m, "TableRegion")
      .def(py::init<int, Vec>(), py::arg("dimension"), py::arg("rank_table"));

  py::class_<Violation>(m, "Violation")
      .def_readonly("subset", &Violation::subset)
      .def_readonly("excess", &Violation::excess);

  m.def("feasibility_report", &feasibility_report, py::arg("region"), py::arg("rates"),
        py::arg("tol") = kFeasibilityTol);
  m.def("is_feasible", &is_feasible, py::arg("region"), py::arg("rates"),
        py::arg("tol") = kFeasibilityTol);
  m.def("on_dominant_face", &on_dominant_face, py::arg("region"), py::arg("rates"),
        py::arg("tol") = kFeasibilityTol);
  m.def("linear_maximize", &linear_maximize, py::arg("region"), py::arg("weights"));
  m.def("expand", &expand, py::arg("region"), py::arg("delta"));
  m.def("region_distance", &region_distance, py::arg("a"), py::arg("b"));

  py::class_<SpinoffResult>(m, "SpinoffResult")
      .def_readonly("single_user_codable", &SpinoffResult::single_user_codable)
      .def_readonly("decoding_order", &SpinoffResult::decoding_order)
      .def_readonly("violated", &SpinoffResult::violated)
      .def_readonly("violation", &SpinoffResult::violation);

  m.def("elevation", py::overload_cast<double, double, double>(&elevation_of),
        py::arg("power"), py::arg("rate"), py::arg("noise"));
  m.def("rate_split_check", &rate_split_check, py::arg("powers"), py::arg("rates"),
        py::arg("gains"), py::arg("noise"), py::arg("elevation_tol") = 0.0);
  m.def(
      "find_violated",
      [](const GaussianMacRegion& region, const Vec& rates) {
        auto s = find_violated(region, rates);
        return s ? py::cast(*s) : py::cast<py::object>(py::none());
      },
      py::arg("region"), py::arg("rates"));
  m.def("project_onto_constraint", &project_onto_constraint, py::arg("point"),
        py::arg("subset"), py::arg("bound"));
  m.def(
      "approximate_project",
      [](Vec point, const GaussianMacRegion& region) {
        std::vector<Subset> log;
        Vec out = approximate_project(std::move(point), region, &log);
        return py::make_tuple(out, log);
      },
      py::arg("point"), py::arg("region"),
      "Returns (projected point, sequence of projected subsets)");
  m.def("count_violations", &count_violations, py::arg("region"), py::arg("point"),
        py::arg("tol") = 0.0);

  py::class_<UtilityModel>(m, "UtilityModel")
      .def_static("alpha_fair", &UtilityModel::alpha_fair, py::arg("weights"),
                  py::arg("alpha"), py::arg("r_min") = 1e-3)
      .def_static("linear", &UtilityModel::linear, py::arg("weights"))
      .def("value", &UtilityModel::value)
      .def("subgradient", &UtilityModel::subgradient)
      .def("subgradient_bound", &UtilityModel::subgradient_bound)
      .def("max_curvature", &UtilityModel::max_curvature)
      .def_property_readonly("alpha", &UtilityModel::alpha)
      .def_property_readonly("weights", &UtilityModel::weights)
      .def_property_readonly("rate_floor", &UtilityModel::rate_floor);

  m.def("alpha_fair_value", &alpha_fair_value, py::arg("weights"), py::arg("alpha"),
        py::arg("rates"));
  m.def("alpha_fair_subgradient", &alpha_fair_subgradient, py::arg("weights"),
        py::arg("alpha"), py::arg("rates"));

  py::class_<StepsizeRule>(m, "StepsizeRule")
      .def_static("constant", &StepsizeRule::constant, py::arg("alpha"))
      .def_static("diminishing", &StepsizeRule::diminishing, py::arg("a"))
      .def("at", &StepsizeRule::at, py::arg("k"));

  py::class_<SolveOptions>(m, "SolveOptions")
      .def(py::init<>())
      .def_readwrite("max_iter", &SolveOptions::max_iter)
      .def_readwrite("tol", &SolveOptions::tol)
      .def_readwrite("stagnation_window", &SolveOptions::stagnation_window)
      .def_readwrite("record_iterates", &SolveOptions::record_iterates)
      .def_readwrite("count_violations", &SolveOptions::count_violations);

  py::class_<SolveReport>(m, "SolveReport")
      .def_readonly("rates", &SolveReport::rates)
      .def_readonly("utility", &SolveReport::utility)
      .def_readonly("iterations", &SolveReport::iterations)
      .def_readonly("converged", &SolveReport::converged)
      .def_readonly("utilities", &SolveReport::utilities)
      .def_readonly("violation_counts", &SolveReport::violation_counts)
      .def_readonly("gaps", &SolveReport::gaps);

  m.def("safe_stepsize", &safe_stepsize, py::arg("effective_powers"), py::arg("noise"),
        py::arg("subgradient_bound"));
  m.def("gradient_projection_solve", &gradient_projection_solve, py::arg("region"),
        py::arg("utility"), py::arg("rule"), py::arg("start") = Vec{},
        py::arg("options") = SolveOptions{});
  m.def("conditional_gradient_solve", &conditional_gradient_solve, py::arg("region"),
        py::arg("utility"), py::arg("start") = Vec{}, py::arg("options") = SolveOptions{});
  m.def("brute_force_optimum", &brute_force_optimum, py::arg("region"), py::arg("utility"),
        py::arg("grid_n") = 2000);

  py::class_<UserChain>(m, "UserChain")
      .def(py::init([](Vec states, std::vector<Vec> transition, Vec initial) {
             return UserChain{std::move(states), std::move(transition), std::move(initial)};
           }),
           py::arg("states"), py::arg("transition"), py::arg("initial"))
      .def_readonly("states", &UserChain::states)
      .def_readonly("transition", &UserChain::transition)
      .def_readonly("initial", &UserChain::initial);

  py::class_<FadingProcess>(m, "FadingProcess")
      .def(py::init<std::vector<UserChain>>(), py::arg("users"))
      .def("num_users", &FadingProcess::num_users)
      .def("stationary", &FadingProcess::stationary, py::arg("user"))
      .def("stationary_mean", &FadingProcess::stationary_mean, py::arg("user"))
      .def("stationary_var", &FadingProcess::stationary_var, py::arg("user"));

  py::class_<ChannelPath>(m, "ChannelPath")
      .def_readonly("gains", &ChannelPath::gains)
      .def_readonly("seed", &ChannelPath::seed)
      .def("length", &ChannelPath::length);

  py::class_<FadingStatistics>(m, "FadingStatistics")
      .def_readonly("mean", &FadingStatistics::mean)
      .def_readonly("cov", &FadingStatistics::cov)
      .def_readonly("v_hat", &FadingStatistics::v_hat)
      .def_readonly("w_bar", &FadingStatistics::w_bar)
      .def_readonly("w_hat", &FadingStatistics::w_hat);

  m.def("sample_path", &sample_path, py::arg("process"), py::arg("n"), py::arg("seed"));
  m.def("step_statistics", &step_statistics, py::arg("process"), py::arg("powers"));
  m.def("sigma_h_squared", &sigma_H_squared, py::arg("stats"), py::arg("powers"),
        py::arg("noise"));
  m.def("region_deviation_bound", &region_deviation_bound, py::arg("sigma_sq"),
        py::arg("delta"));
  m.def("jensen_gap_bound", &jensen_gap_bound, py::arg("f_mean_value"), py::arg("var_x"),
        py::arg("curvature"));
  m.def("log_variance_bound", &log_variance_bound, py::arg("x_bar"), py::arg("var_x"));
  m.def("estimate_averaged_region", &estimate_averaged_region, py::arg("process"),
        py::arg("powers"), py::arg("noise"), py::arg("n_samples"), py::arg("seed"));
  m.def("exact_averaged_region", &exact_averaged_region, py::arg("process"),
        py::arg("powers"), py::arg("noise"));

  py::class_<PolicyTrace>(m, "PolicyTrace")
      .def_readonly("gains", &PolicyTrace::gains)
      .def_readonly("rates", &PolicyTrace::rates)
      .def_readonly("utility", &PolicyTrace::utility)
      .def_readonly("avg_rates", &PolicyTrace::avg_rates)
      .def_readonly("queues", &PolicyTrace::queues)
      .def_readonly("iterations", &PolicyTrace::iterations)
      .def("length", &PolicyTrace::length);

  py::class_<TrackingParameters>(m, "TrackingParameters")
      .def_readonly("k", &TrackingParameters::k)
      .def_readonly("alpha", &TrackingParameters::alpha)
      .def_readonly("radius", &TrackingParameters::radius)
      .def_readonly("theta", &TrackingParameters::theta)
      .def_readonly("gamma", &TrackingParameters::gamma)
      .def_readonly("w_prime", &TrackingParameters::w_prime)
      .def_readonly("c", &TrackingParameters::c);

  m.def(
      "greedy_step",
      [](const Vec& gains, const UtilityModel& u, const Vec& powers, double noise, double tol,
         int max_iter) { return greedy_step(gains, u, powers, noise, nullptr, tol, max_iter); },
      py::arg("gains"), py::arg("utility"), py::arg("powers"), py::arg("noise"),
      py::arg("tol") = 1e-6, py::arg("max_iter") = 4000);
  m.def("greedy_policy_run", &greedy_policy_run, py::arg("path"), py::arg("utility"),
        py::arg("powers"), py::arg("noise"), py::arg("tol") = 1e-6,
        py::arg("max_iter") = 4000);
  m.def("worst_case_parameters", &worst_case_parameters, py::arg("A"), py::arg("B"),
        py::arg("w_hat"));
  m.def("average_case_parameters", &average_case_parameters, py::arg("A"), py::arg("B"),
        py::arg("w_hat"), py::arg("w_bar"));
  m.def("approximate_policy_run", &approximate_policy_run, py::arg("path"), py::arg("utility"),
        py::arg("powers"), py::arg("noise"), py::arg("k"), py::arg("alpha"));
  m.def(
      "improved_policy_run",
      [](const ChannelPath& path, const UtilityModel& u, const Vec& powers, double noise,
         double gamma, int k, double alpha) {
        ImprovedPolicyResult r = improved_policy_run(path, u, powers, noise, gamma, k, alpha);
        return py::make_tuple(r.trace, r.crossings);
      },
      py::arg("path"), py::arg("utility"), py::arg("powers"), py::arg("noise"),
      py::arg("gamma"), py::arg("k"), py::arg("alpha"),
      "Returns (trace, per-slot crossing counts)");

  py::enum_<ArrivalModel>(m, "ArrivalModel")
      .value("DETERMINISTIC_MEAN", ArrivalModel::kDeterministicMean)
      .value("POISSON", ArrivalModel::kPoisson);
  m.def("queue_policy_run", &queue_policy_run, py::arg("path"), py::arg("utility"),
        py::arg("powers"), py::arg("noise"), py::arg("K"), py::arg("D"), py::arg("arrivals"),
        py::arg("seed"));

  py::class_<RatePowerAllocation>(m, "RatePowerAllocation")
      .def_readonly("rates", &RatePowerAllocation::rates)
      .def_readonly("powers", &RatePowerAllocation::powers)
      .def_readonly("objective", &RatePowerAllocation::objective);
  m.def("tse_rate_power_step", &tse_rate_power_step, py::arg("gains"), py::arg("mu"),
        py::arg("lambda"), py::arg("noise"));

  py::class_<LambdaFit>(m, "LambdaFit")
      .def_readonly("lambda_", &LambdaFit::lambda)
      .def_readonly("avg_power", &LambdaFit::avg_power)
      .def_readonly("residual", &LambdaFit::residual)
      .def_readonly("converged", &LambdaFit::converged)
      .def_readonly("iterations", &LambdaFit::iterations);
  m.def("find_lambda", &find_lambda, py::arg("process"), py::arg("mu"), py::arg("p_bar"),
        py::arg("noise"), py::arg("n_samples"), py::arg("seed"), py::arg("tol") = 1e-3,
        py::arg("max_iter") = 400);
  m.def("boundary_point", &boundary_point, py::arg("process"), py::arg("mu"),
        py::arg("p_bar"), py::arg("noise"), py::arg("n_samples"), py::arg("seed"));

  py::class_<PowerControlSolution>(m, "PowerControlSolution")
      .def_readonly("rates", &PowerControlSolution::rates)
      .def_readonly("mu_star", &PowerControlSolution::mu_star)
      .def_readonly("lambda_", &PowerControlSolution::lambda)
      .def_readonly("iterations", &PowerControlSolution::iterations)
      .def_readonly("converged", &PowerControlSolution::converged)
      .def_readonly("gaps", &PowerControlSolution::gaps);
  m.def("power_control_solve", &power_control_solve, py::arg("process"), py::arg("utility"),
        py::arg("p_bar"), py::arg("noise"), py::arg("n_samples"), py::arg("seed"),
        py::arg("max_iter") = 60, py::arg("tol") = 1e-6);

  m.def("opt_distance_bound", &opt_distance_bound, py::arg("delta"), py::arg("A"),
        py::arg("B"));
  m.def("gap_bound_variation", &gap_bound_variation, py::arg("delta"), py::arg("sigma_sq"),
        py::arg("A"), py::arg("B"), py::arg("u_star"));
  m.def("gap_bound_curvature", &gap_bound_curvature, py::arg("eps"), py::arg("omega"),
        py::arg("r_eps"), py::arg("u_star"));
  m.def("r_epsilon", &r_epsilon, py::arg("process"), py::arg("powers"), py::arg("noise"),
        py::arg("eps"), py::arg("sigma_h"), py::arg("n_samples"), py::arg("seed"));

  py::class_<UtilityConstants>(m, "UtilityConstants")
      .def_readonly("A", &UtilityConstants::A)
      .def_readonly("B", &UtilityConstants::B)
      .def_readonly("Omega", &UtilityConstants::Omega)
      .def_readonly("degenerate", &UtilityConstants::degenerate)
      .def_readonly("samples", &UtilityConstants::samples);
  m.def("estimate_utility_constants", &estimate_utility_constants, py::arg("utility"),
        py::arg("process"), py::arg("powers"), py::arg("noise"), py::arg("budget"),
        py::arg("seed"), py::arg("omega_center") = Vec{}, py::arg("omega_radius") = 0.0);

  // Harness entry points operate on JSON strings for simple interop.
  m.def(
      "run_experiment_json",
      [](const std::string& spec_json, const std::string& out_dir) {
        ExperimentSpec spec = experiment_from_json(Json::parse(spec_json));
        return result_to_json(run_experiment(spec, out_dir)).dump();
      },
      py::arg("spec_json"), py::arg("out_dir") = std::string{});
  m.def(
      "run_upload_json",
      [](const std::string& spec_json) {
        return upload_result_to_json(run_upload(upload_from_json(Json::parse(spec_json))))
            .dump();
      },
      py::arg("spec_json"));
  m.def(
      "preset_experiment_json",
      [](const std::string& name) { return experiment_to_json(preset_experiment(name)).dump(); },
      py::arg("name"));
  m.def("preset_process", &preset_process, py::arg("name"), py::arg("users"));
  m.def("derive_seed", &derive_seed, py::arg("base"), py::arg("counter"));

  m.attr("__version__") = "0.1.0";
}
