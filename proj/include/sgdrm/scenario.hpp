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


#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "sgdrm/drm.hpp"
#include "sgdrm/geometry.hpp"
#include "sgdrm/market.hpp"
#include "sgdrm/power.hpp"
#include "sgdrm/spatial.hpp"

namespace sgdrm::scenario {

enum class SolverChoice {
  kAuto,         // closed when applicable, else subgradient
  kClosed,       // dual subgradient with the closed-form inner step
  kSubgradient,  // dual subgradient with the projected-gradient inner step
  kOracle,       // brute-force grid (small instances only)
};

struct SolverSpec {
  SolverChoice method = SolverChoice::kAuto;
  int max_iters = 3000;
  double step0 = 0.5;
  int oracle_grid = 40;
};

struct SweepSpec {
  std::string axis;            // dotted path, e.g. operators.0.sinr_threshold_db
  std::vector<double> values;  // sorted ascending
};

struct McSpec {
  long trials = 0;  // 0 disables the Monte Carlo cross-check
  std::uint64_t seed = 0;
};

struct ScenarioConfig {
  geometry::PhysicsParams physics;
  power::PowerModelParams power_model;
  std::vector<geometry::OperatorSpec> operators;
  std::vector<market::SupplierSpec> suppliers;
  double emissions_cap = std::numeric_limits<double>::infinity();
  double fairness = 0.0;
  drm::EnergyConvention convention = drm::EnergyConvention::kNetworkTotal;
  SolverSpec solver;
  std::optional<SweepSpec> sweep;
  McSpec mc;
  std::string profile;  // empty when none was applied
  /// Canonical document: every key present, in the units of the schema.
  nlohmann::json document;
};

/// Built-in profiles: "paper-baseline" and "fig1".
std::vector<std::string> profile_names();
nlohmann::json profile_document(const std::string& name);

/// Reads `path` and merges it over the named profile (the file's "profile" key
/// is used when `profile` is empty). Objects merge key by key; arrays replace.
nlohmann::json load_document(const std::filesystem::path& path, const std::string& profile = "");

/// Validates a document and converts units (dB -> linear, kJ -> J, km^2 -> m^2).
/// Throws ConfigError naming the offending field.
ScenarioConfig parse_config(const nlohmann::json& doc);

inline ScenarioConfig load_config(const std::filesystem::path& path, const std::string& profile = "") {
  return parse_config(load_document(path, profile));
}

/// The configuration with the sweep axis set to `value`.
ScenarioConfig config_at(const ScenarioConfig& cfg, double value);

struct OperatorResult {
  std::string id;
  double transmit_power = 0.0;  // watts per user
  double coverage = 0.0;        // analytic, at transmit_power
  double n_bs = 0.0;
  double users_per_bs = 0.0;
  double energy = 0.0;          // joules
  double price = 0.0;           // mean unit price paid, MU per joule
  std::optional<spatial::CoverageEstimate> empirical;
};

struct SupplierResult {
  std::string id;
  double production = 0.0;  // joules
  double profit = 0.0;
  double emissions = 0.0;
};

struct SweepResult {
  std::optional<double> axis_value;
  bool feasible = false;
  std::string status;  // ok, not-converged, infeasible-qos, infeasible-<aggregate>, solver-error
  std::string reason;
  std::vector<OperatorResult> operators;
  std::vector<SupplierResult> suppliers;
  std::optional<drm::Solution> solution;
};

/// One sweep point: transmit power -> demand -> allocation. Failures are
/// recorded in the result, never thrown.
SweepResult run_point(const ScenarioConfig& cfg, std::optional<double> axis_value,
                      std::uint64_t point_index = 0);

/// All sweep points in axis order (a single point without a sweep).
std::vector<SweepResult> run_pipeline(const ScenarioConfig& cfg);

/// 0 when every point has status "ok", 2 otherwise.
int exit_code(const std::vector<SweepResult>& results);

/// Writes results.csv, allocation.csv, diagnostics.csv, run_meta.json and the
/// demand / price / profit SVG plots. Returns the written paths.
std::vector<std::filesystem::path> emit_outputs(const std::vector<SweepResult>& results,
                                                const ScenarioConfig& cfg,
                                                const std::filesystem::path& out_dir);

/// Column names of results.csv (2 + 3 N_op + 3 N_R).
std::vector<std::string> results_header(const ScenarioConfig& cfg);

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;  // NaN breaks the line
};

/// Minimal line chart; one polyline per series.
std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<Series>& series);

}  // namespace sgdrm::scenario
