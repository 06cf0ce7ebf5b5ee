// Copyright 2026 The sgdrm Authors
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


#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "sgdrm/errors.hpp"
#include "sgdrm/scenario.hpp"

namespace py = pybind11;
using namespace sgdrm;

namespace {

template <class T>
std::string repr_id(const char* type, const T& v) {
  return std::string("<") + type + " '" + v.id + "'>";
}

py::dict result_dict(const scenario::SweepResult& r) {
  py::dict out;
  out["axis_value"] = r.axis_value;
  out["feasible"] = r.feasible;
  out["status"] = r.status;
  out["reason"] = r.reason;
  py::list ops;
  for (const auto& o : r.operators) {
    py::dict d;
    d["id"] = o.id;
    d["transmit_power"] = o.transmit_power;
    d["coverage"] = o.coverage;
    d["n_bs"] = o.n_bs;
    d["users_per_bs"] = o.users_per_bs;
    d["energy"] = o.energy;
    d["price"] = o.price;
    if (o.empirical) {
      d["mc_coverage"] = o.empirical->mean;
      d["mc_half_width_95"] = o.empirical->half_width_95;
    }
    ops.append(d);
  }
  out["operators"] = ops;
  py::list sups;
  for (const auto& s : r.suppliers) {
    py::dict d;
    d["id"] = s.id;
    d["production"] = s.production;
    d["profit"] = s.profit;
    d["emissions"] = s.emissions;
    sups.append(d);
  }
  out["suppliers"] = sups;
  if (r.solution) out["allocation"] = r.solution->allocation.q;
  return out;
}

}  // namespace

PYBIND11_MODULE(_sgdrm, m) {
  m.doc() = "Coverage-driven energy demand and alpha-fair demand response";

  auto base = py::register_exception<std::runtime_error>(m, "SgdrmError");
  py::register_exception<InfeasibleQoS>(m, "InfeasibleQoS", base.ptr());
  py::register_exception<InfeasibleInstance>(m, "InfeasibleInstance", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<DivergentIntegral>(m, "DivergentIntegral", PyExc_ValueError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);

  // geometry
  py::class_<geometry::OperatorSpec>(m, "OperatorSpec")
      .def(py::init<>())
      .def(py::init([](std::string id, double bs_density, double user_density, double sinr_threshold,
                       double coverage_target) {
             geometry::OperatorSpec op{std::move(id), bs_density, user_density, sinr_threshold,
                                       coverage_target};
             op.validate();
             return op;
           }),
           py::arg("id"), py::arg("bs_density"), py::arg("user_density"), py::arg("sinr_threshold"),
           py::arg("coverage_target"))
      .def_readwrite("id", &geometry::OperatorSpec::id)
      .def_readwrite("bs_density", &geometry::OperatorSpec::bs_density)
      .def_readwrite("user_density", &geometry::OperatorSpec::user_density)
      .def_readwrite("sinr_threshold", &geometry::OperatorSpec::sinr_threshold)
      .def_readwrite("coverage_target", &geometry::OperatorSpec::coverage_target)
      .def("__repr__", [](const geometry::OperatorSpec& o) { return repr_id("OperatorSpec", o); });

  py::class_<geometry::PhysicsParams>(m, "PhysicsParams")
      .def(py::init<>())
      .def_readwrite("path_loss_exp", &geometry::PhysicsParams::path_loss_exp)
      .def_readwrite("noise_power", &geometry::PhysicsParams::noise_power)
      .def_readwrite("fading_rate", &geometry::PhysicsParams::fading_rate)
      .def_readwrite("exclusion_distance", &geometry::PhysicsParams::exclusion_distance)
      .def_readwrite("area", &geometry::PhysicsParams::area);

  m.def("mhcpp_intensity", &geometry::mhcpp_intensity, py::arg("bs_density"), py::arg("exclusion_distance"));
  m.def("interference_factor", &geometry::interference_factor, py::arg("sinr_threshold"),
        py::arg("path_loss_exp"));
  m.def("coverage_probability", &geometry::coverage_probability, py::arg("op"), py::arg("physics"),
        py::arg("transmit_power"));
  m.def("coverage_ceiling", &geometry::coverage_ceiling, py::arg("op"), py::arg("physics"));
  m.def("solve_transmit_power", &geometry::solve_transmit_power, py::arg("op"), py::arg("physics"));

  // spatial
  py::class_<spatial::CoverageEstimate>(m, "CoverageEstimate")
      .def_readonly("mean", &spatial::CoverageEstimate::mean)
      .def_readonly("half_width_95", &spatial::CoverageEstimate::half_width_95)
      .def_readonly("n_trials", &spatial::CoverageEstimate::n_trials);
  m.def("derive_seed", &spatial::derive_seed, py::arg("seed"), py::arg("index"));
  m.def(
      "sample_ppp",
      [](double density, double half_side, std::uint64_t seed) {
        const auto p = spatial::sample_ppp(density, spatial::Window::centered(half_side), seed);
        Eigen::MatrixX2d xy(static_cast<Eigen::Index>(p.points.size()), 2);
        for (std::size_t i = 0; i < p.points.size(); ++i) {
          xy(static_cast<Eigen::Index>(i), 0) = p.points[i].x;
          xy(static_cast<Eigen::Index>(i), 1) = p.points[i].y;
        }
        return xy;
      },
      py::arg("density"), py::arg("half_side"), py::arg("seed"),
      "PPP on the square [-half_side, half_side]^2 as an (n, 2) array.");
  m.def(
      "empirical_coverage",
      [](const geometry::OperatorSpec& op, const geometry::PhysicsParams& phys, double transmit_power,
         long n_trials, std::uint64_t seed, unsigned threads) {
        spatial::EmpiricalOptions opts;
        opts.threads = threads;
        py::gil_scoped_release release;
        return spatial::empirical_coverage(op, phys, transmit_power, n_trials, seed, opts);
      },
      py::arg("op"), py::arg("physics"), py::arg("transmit_power"), py::arg("n_trials"), py::arg("seed"),
      py::arg("threads") = 0);

  // power
  py::class_<power::PowerModelParams>(m, "PowerModelParams")
      .def(py::init<>())
      .def_readwrite("amp_slope", &power::PowerModelParams::amp_slope)
      .def_readwrite("site_offset", &power::PowerModelParams::site_offset)
      .def_readwrite("duration", &power::PowerModelParams::duration);
  py::class_<power::OperatorDemand>(m, "OperatorDemand")
      .def(py::init([](std::string id, double total_energy, double n_bs) {
             power::OperatorDemand d;
             d.operator_id = std::move(id);
             d.total_energy = total_energy;
             d.n_bs = n_bs;
             return d;
           }),
           py::arg("operator_id"), py::arg("total_energy"), py::arg("n_bs") = 1.0)
      .def_readonly("operator_id", &power::OperatorDemand::operator_id)
      .def_readonly("n_bs", &power::OperatorDemand::n_bs)
      .def_readonly("users_per_bs", &power::OperatorDemand::users_per_bs)
      .def_readonly("per_bs_consumed", &power::OperatorDemand::per_bs_consumed)
      .def_readonly("total_energy", &power::OperatorDemand::total_energy);
  m.def("operator_demand", &power::operator_demand, py::arg("op"), py::arg("physics"), py::arg("power_model"),
        py::arg("per_user_power"));

  // market
  py::class_<market::SupplierSpec>(m, "SupplierSpec")
      .def(py::init([](std::string id, double w, double c, double capacity, double psi, double phi, int gamma) {
             market::SupplierSpec s{std::move(id), w, c, capacity, psi, phi, gamma};
             s.validate();
             return s;
           }),
           py::arg("id"), py::arg("benchmark_price"), py::arg("unit_cost"), py::arg("capacity"),
           py::arg("emis_quad") = 0.0, py::arg("emis_lin") = 0.0, py::arg("price_sensitivity") = 0)
      .def_readwrite("id", &market::SupplierSpec::id)
      .def_readwrite("benchmark_price", &market::SupplierSpec::benchmark_price)
      .def_readwrite("unit_cost", &market::SupplierSpec::unit_cost)
      .def_readwrite("capacity", &market::SupplierSpec::capacity)
      .def_readwrite("emis_quad", &market::SupplierSpec::emis_quad)
      .def_readwrite("emis_lin", &market::SupplierSpec::emis_lin)
      .def_readwrite("price_sensitivity", &market::SupplierSpec::price_sensitivity)
      .def("__repr__", [](const market::SupplierSpec& s) { return repr_id("SupplierSpec", s); });
  m.def("unit_price", &market::unit_price, py::arg("supplier"), py::arg("q"));

  // drm
  py::class_<drm::ProblemInstance>(m, "ProblemInstance")
      .def(py::init([](std::vector<power::OperatorDemand> ops, std::vector<market::SupplierSpec> sups,
                       double emissions_cap, double fairness) {
             drm::ProblemInstance inst{std::move(ops), std::move(sups), emissions_cap, fairness};
             inst.validate();
             return inst;
           }),
           py::arg("operators"), py::arg("suppliers"),
           py::arg("emissions_cap") = std::numeric_limits<double>::infinity(), py::arg("fairness") = 0.0)
      .def_readonly("operators", &drm::ProblemInstance::operators)
      .def_readonly("suppliers", &drm::ProblemInstance::suppliers)
      .def_readonly("emissions_cap", &drm::ProblemInstance::emissions_cap)
      .def_readonly("fairness", &drm::ProblemInstance::fairness)
      .def("closed_form_applicable", &drm::ProblemInstance::closed_form_applicable);

  py::class_<drm::DualState>(m, "DualState")
      .def_static("zeros", &drm::DualState::zeros)
      .def_readonly("delta", &drm::DualState::delta)
      .def_readonly("xi", &drm::DualState::xi)
      .def_readonly("zeta", &drm::DualState::zeta)
      .def_readonly("theta", &drm::DualState::theta);

  py::class_<drm::Solution>(m, "Solution")
      .def_property_readonly("allocation", [](const drm::Solution& s) { return s.allocation.q; })
      .def_readonly("profits", &drm::Solution::profits)
      .def_readonly("utility", &drm::Solution::utility)
      .def_readonly("duals", &drm::Solution::duals)
      .def_property_readonly("method", [](const drm::Solution& s) { return s.diagnostics.method; })
      .def_property_readonly("converged", [](const drm::Solution& s) { return s.diagnostics.converged; })
      .def_property_readonly("iterations", [](const drm::Solution& s) { return s.diagnostics.iterations; })
      .def_property_readonly("kkt_residual", [](const drm::Solution& s) { return s.diagnostics.kkt_residual; })
      .def_property_readonly("max_violation",
                             [](const drm::Solution& s) { return s.diagnostics.max_violation; })
      .def_property_readonly("resolution_bound",
                             [](const drm::Solution& s) { return s.diagnostics.resolution_bound; });

  m.def("utility", &drm::utility, py::arg("profits"), py::arg("alpha"));
  m.def(
      "solve_dual_subgradient",
      [](const drm::ProblemInstance& inst, int max_iters, double step0) {
        return drm::solve_dual_subgradient(inst, drm::DualState::zeros(inst), max_iters, step0);
      },
      py::arg("instance"), py::arg("max_iters") = 3000, py::arg("step0") = 0.5);
  m.def(
      "solve_closed_form",
      [](const drm::ProblemInstance& inst, const drm::DualState& duals) {
        return drm::solve_closed_form(inst, duals).q;
      },
      py::arg("instance"), py::arg("duals"));
  m.def("brute_force_oracle", &drm::brute_force_oracle, py::arg("instance"), py::arg("grid_points"));
  m.def(
      "kkt_residual",
      [](const drm::ProblemInstance& inst, const Eigen::MatrixXd& q) {
        drm::Solution sol = drm::solve_interior_point(inst, market::AllocationMatrix(q));
        return drm::kkt_residual(inst, sol);
      },
      py::arg("instance"), py::arg("allocation"),
      "KKT residual of the interior-point solution warm-started at `allocation`.");
  m.def(
      "max_violation",
      [](const drm::ProblemInstance& inst, const Eigen::MatrixXd& q) {
        return drm::check_constraints(inst, market::AllocationMatrix(q)).max_relative_violation;
      },
      py::arg("instance"), py::arg("allocation"));

  // scenario: documents cross the boundary as JSON text
  m.def("profile_names", &scenario::profile_names);
  m.def("_profile_json", [](const std::string& name) { return scenario::profile_document(name).dump(); });
  m.def("_run_json", [](const std::string& text) {
    const auto cfg = scenario::parse_config(nlohmann::json::parse(text));
    std::vector<scenario::SweepResult> results;
    {
      py::gil_scoped_release release;
      results = scenario::run_pipeline(cfg);
    }
    py::list out;
    for (const auto& r : results) out.append(result_dict(r));
    return out;
  });
  m.def("_emit_json", [](const std::string& text, const std::filesystem::path& out_dir) {
    const auto cfg = scenario::parse_config(nlohmann::json::parse(text));
    std::vector<scenario::SweepResult> results;
    std::vector<std::filesystem::path> files;
    {
      py::gil_scoped_release release;
      results = scenario::run_pipeline(cfg);
      files = scenario::emit_outputs(results, cfg, out_dir);
    }
    return py::make_tuple(scenario::exit_code(results), files);
  });
}
