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


#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "sgdrm/errors.hpp"
#include "sgdrm/scenario.hpp"
#include "sgdrm/units.hpp"

namespace sgdrm::scenario {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

json baseline() {
  // One BS per disc of radius 200 m.
  const double bs_per_km2 = 1e6 / (std::numbers::pi * 200.0 * 200.0);
  return json{
      {"physics",
       {{"path_loss_exp", 4.0},
        {"noise_power_db", -115.0},
        {"fading_rate", 1.0},
        {"exclusion_distance_m", 1000.0},
        {"area_km2", 100.0}}},
      {"power_model", {{"amp_slope", 7.84}, {"site_offset_w", 71.5}, {"duration_s", 1.0}}},
      {"operators",
       json::array({
           {{"id", "op1"}, {"bs_density_per_km2", bs_per_km2}, {"user_density_per_km2", 15.0},
            {"sinr_threshold_db", 15.0}, {"coverage_target", 0.7}},
           {{"id", "op2"}, {"bs_density_per_km2", bs_per_km2}, {"user_density_per_km2", 30.0},
            {"sinr_threshold_db", 10.0}, {"coverage_target", 0.8}},
           {{"id", "op3"}, {"bs_density_per_km2", bs_per_km2}, {"user_density_per_km2", 40.0},
            {"sinr_threshold_db", 5.0}, {"coverage_target", 0.9}},
       })},
      {"suppliers",
       json::array({
           {{"id", "sup1"}, {"benchmark_price", 1.0}, {"unit_cost", 0.1}, {"capacity_kj", 150.0},
            {"emis_quad", 0.004}, {"emis_lin", 0.001}, {"price_sensitivity", 0}},
           {{"id", "sup2"}, {"benchmark_price", 2.0}, {"unit_cost", 0.5}, {"capacity_kj", 150.0},
            {"emis_quad", 0.002}, {"emis_lin", 0.0005}, {"price_sensitivity", 0}},
           {{"id", "sup3"}, {"benchmark_price", 3.0}, {"unit_cost", 2.5}, {"capacity_kj", 150.0},
            {"emis_quad", 0.0}, {"emis_lin", 0.0001}, {"price_sensitivity", 0}},
       })},
      {"emissions_cap", 1e7},
      {"fairness", 0.5},
  };
}

json fig1() {
  json doc = baseline();
  doc["suppliers"] = json::array({
      {{"id", "sup1"}, {"benchmark_price", 1.0}, {"unit_cost", 0.1}, {"capacity_kj", 170.0},
       {"emis_quad", 0.004}, {"emis_lin", 0.001}, {"price_sensitivity", 1}},
      {{"id", "sup3"}, {"benchmark_price", 3.0}, {"unit_cost", 2.5}, {"capacity_kj", 170.0},
       {"emis_quad", 0.0}, {"emis_lin", 0.0001}, {"price_sensitivity", 1}},
  });
  doc["emissions_cap"] = 4.5e7;
  doc["fairness"] = 0.0;
  json values = json::array();
  for (int t = 5; t <= 16; ++t) values.push_back(static_cast<double>(t));
  doc["sweep"] = {{"axis", "operators.0.sinr_threshold_db"}, {"values", values}};
  return doc;
}

[[noreturn]] void fail(const std::string& field, const std::string& constraint) {
  throw ConfigError(field, constraint);
}

std::string join(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  if (!obj.is_object()) fail(where.empty() ? "<root>" : where, "must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) fail(join(where, key), "unknown key");
  }
}

// Number, or the string "inf" when `allow_inf`.
double number(const json& obj, const std::string& key, const std::string& where,
              std::optional<double> fallback, bool allow_inf = false) {
  const std::string field = join(where, key);
  if (!obj.contains(key)) {
    if (!fallback) fail(field, "is required");
    return *fallback;
  }
  const json& v = obj.at(key);
  if (allow_inf && v.is_string() && v.get<std::string>() == "inf") return kInf;
  if (!v.is_number()) fail(field, allow_inf ? "must be a number or \"inf\"" : "must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(field, "must be finite");
  return x;
}

long integer(const json& obj, const std::string& key, const std::string& where, long fallback) {
  const std::string field = join(where, key);
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) fail(field, "must be an integer");
  return v.get<long>();
}

std::string text(const json& obj, const std::string& key, const std::string& where,
                 const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) fail(join(where, key), "must be a string");
  return v.get<std::string>();
}

json number_json(double x) { return std::isinf(x) ? json("inf") : json(x); }

// Runs a domain validate() and reports failures against `field`.
template <typename T>
void validated(const T& value, const std::string& field) {
  try {
    value.validate();
  } catch (const InvalidArgument& e) {
    fail(field, e.what());
  }
}

void merge(json& base, const json& patch) {
  for (const auto& [key, value] : patch.items()) {
    if (value.is_object() && base.contains(key) && base[key].is_object()) {
      merge(base[key], value);
    } else {
      base[key] = value;
    }
  }
}

json::json_pointer pointer_of(const std::string& axis) {
  std::string p;
  std::stringstream in(axis);
  std::string part;
  while (std::getline(in, part, '.')) {
    if (part.empty()) fail("sweep.axis", "empty path component in '" + axis + "'");
    p += "/" + part;
  }
  return json::json_pointer(p);
}

bool names_number(const json& doc, const std::string& axis) {
  json::json_pointer ptr;
  try {
    ptr = pointer_of(axis);
  } catch (const json::exception&) {
    return false;
  }
  if (!doc.contains(ptr)) return false;
  const json& v = doc.at(ptr);
  return v.is_number() || (v.is_string() && v.get<std::string>() == "inf");
}

}  // namespace

std::vector<std::string> profile_names() { return {"paper-baseline", "fig1"}; }

json profile_document(const std::string& name) {
  if (name == "paper-baseline") return baseline();
  if (name == "fig1") return fig1();
  fail("profile", "unknown profile '" + name + "' (expected paper-baseline or fig1)");
}

json load_document(const std::filesystem::path& path, const std::string& profile) {
  std::ifstream in(path);
  if (!in) fail(path.string(), "cannot open configuration file");
  json file;
  try {
    file = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(path.string(), std::string("parse error: ") + e.what());
  }
  if (!file.is_object()) fail(path.string(), "top level must be an object");
  std::string name = profile;
  if (name.empty() && file.contains("profile")) {
    if (!file["profile"].is_string()) fail("profile", "must be a string");
    name = file["profile"].get<std::string>();
  }
  if (name.empty()) return file;
  json doc = profile_document(name);
  merge(doc, file);
  doc["profile"] = name;
  return doc;
}

ScenarioConfig parse_config(const json& doc) {
  check_keys(doc, "", {"profile", "physics", "power_model", "operators", "suppliers", "emissions_cap",
                       "fairness", "energy_convention", "solver", "sweep", "mc"});
  ScenarioConfig cfg;
  cfg.profile = text(doc, "profile", "", "");
  json canon = json::object();
  if (!cfg.profile.empty()) canon["profile"] = cfg.profile;

  {
    const json phys = doc.value("physics", json::object());
    check_keys(phys, "physics",
               {"path_loss_exp", "noise_power_db", "noise_power_w", "fading_rate", "exclusion_distance_m",
                "area_km2"});
    auto& p = cfg.physics;
    p.path_loss_exp = number(phys, "path_loss_exp", "physics", 4.0);
    if (phys.contains("noise_power_db") && phys.contains("noise_power_w")) {
      fail("physics.noise_power_w", "give either noise_power_db or noise_power_w, not both");
    }
    json c = {{"path_loss_exp", p.path_loss_exp}};
    if (phys.contains("noise_power_w")) {
      p.noise_power = number(phys, "noise_power_w", "physics", std::nullopt);
      c["noise_power_w"] = p.noise_power;
    } else {
      const double db = number(phys, "noise_power_db", "physics", -115.0);
      p.noise_power = units::db_to_linear(db);
      c["noise_power_db"] = db;
    }
    p.fading_rate = number(phys, "fading_rate", "physics", 1.0);
    p.exclusion_distance = number(phys, "exclusion_distance_m", "physics", 1000.0);
    const double area_km2 = number(phys, "area_km2", "physics", 100.0);
    p.area = area_km2 * 1e6;
    c["fading_rate"] = p.fading_rate;
    c["exclusion_distance_m"] = p.exclusion_distance;
    c["area_km2"] = area_km2;
    validated(p, "physics");
    canon["physics"] = c;
  }

  {
    const json pm = doc.value("power_model", json::object());
    check_keys(pm, "power_model", {"amp_slope", "site_offset_w", "duration_s"});
    auto& m = cfg.power_model;
    m.amp_slope = number(pm, "amp_slope", "power_model", 7.84);
    m.site_offset = number(pm, "site_offset_w", "power_model", 71.5);
    m.duration = number(pm, "duration_s", "power_model", 1.0);
    validated(m, "power_model");
    canon["power_model"] = {{"amp_slope", m.amp_slope}, {"site_offset_w", m.site_offset}, {"duration_s", m.duration}};
  }

  if (!doc.contains("operators")) fail("operators", "is required");
  if (!doc["operators"].is_array() || doc["operators"].empty()) fail("operators", "must be a non-empty list");
  canon["operators"] = json::array();
  for (std::size_t i = 0; i < doc["operators"].size(); ++i) {
    const std::string where = "operators." + std::to_string(i);
    const json& o = doc["operators"][i];
    check_keys(o, where, {"id", "bs_density_per_km2", "user_density_per_km2", "sinr_threshold_db", "coverage_target"});
    geometry::OperatorSpec op;
    op.id = text(o, "id", where, "op" + std::to_string(i + 1));
    const double bs = number(o, "bs_density_per_km2", where, std::nullopt);
    const double users = number(o, "user_density_per_km2", where, std::nullopt);
    const double t_db = number(o, "sinr_threshold_db", where, std::nullopt);
    op.coverage_target = number(o, "coverage_target", where, std::nullopt);
    if (!(op.coverage_target > 0.0 && op.coverage_target < 1.0)) {
      fail(where + ".coverage_target", "must lie in (0, 1)");
    }
    if (!(bs > 0.0)) fail(where + ".bs_density_per_km2", "must be > 0");
    if (users < 0.0) fail(where + ".user_density_per_km2", "must be >= 0");
    op.bs_density = units::per_km2_to_per_m2(bs);
    op.user_density = units::per_km2_to_per_m2(users);
    op.sinr_threshold = units::db_to_linear(t_db);
    validated(op, where);
    cfg.operators.push_back(op);
    canon["operators"].push_back({{"id", op.id},
                                  {"bs_density_per_km2", bs},
                                  {"user_density_per_km2", users},
                                  {"sinr_threshold_db", t_db},
                                  {"coverage_target", op.coverage_target}});
  }

  if (!doc.contains("suppliers")) fail("suppliers", "is required");
  if (!doc["suppliers"].is_array() || doc["suppliers"].empty()) fail("suppliers", "must be a non-empty list");
  canon["suppliers"] = json::array();
  for (std::size_t i = 0; i < doc["suppliers"].size(); ++i) {
    const std::string where = "suppliers." + std::to_string(i);
    const json& s = doc["suppliers"][i];
    check_keys(s, where, {"id", "benchmark_price", "unit_cost", "capacity_kj", "emis_quad", "emis_lin", "price_sensitivity"});
    market::SupplierSpec sup;
    sup.id = text(s, "id", where, "sup" + std::to_string(i + 1));
    sup.benchmark_price = number(s, "benchmark_price", where, std::nullopt);
    sup.unit_cost = number(s, "unit_cost", where, std::nullopt);
    const double cap_kj = number(s, "capacity_kj", where, std::nullopt);
    sup.capacity = units::kj_to_j(cap_kj);
    sup.emis_quad = number(s, "emis_quad", where, 0.0);
    sup.emis_lin = number(s, "emis_lin", where, 0.0);
    const long gamma = integer(s, "price_sensitivity", where, 0);
    if (gamma < 0 || gamma > 16) fail(where + ".price_sensitivity", "must be an integer in [0, 16]");
    sup.price_sensitivity = static_cast<int>(gamma);
    validated(sup, where);
    cfg.suppliers.push_back(sup);
    canon["suppliers"].push_back({{"id", sup.id},
                                  {"benchmark_price", sup.benchmark_price},
                                  {"unit_cost", sup.unit_cost},
                                  {"capacity_kj", cap_kj},
                                  {"emis_quad", sup.emis_quad},
                                  {"emis_lin", sup.emis_lin},
                                  {"price_sensitivity", gamma}});
  }

  cfg.emissions_cap = number(doc, "emissions_cap", "", kInf, true);
  if (!(cfg.emissions_cap > 0.0)) fail("emissions_cap", "must be > 0");
  canon["emissions_cap"] = number_json(cfg.emissions_cap);
  cfg.fairness = number(doc, "fairness", "", 0.0, true);
  if (cfg.fairness < 0.0) fail("fairness", "must be >= 0 or \"inf\"");
  canon["fairness"] = number_json(cfg.fairness);

  const std::string convention = text(doc, "energy_convention", "", "network-total");
  if (convention == "network-total") {
    cfg.convention = drm::EnergyConvention::kNetworkTotal;
  } else if (convention == "per-bs") {
    cfg.convention = drm::EnergyConvention::kPerBsVerbatim;
  } else {
    fail("energy_convention", "must be \"network-total\" or \"per-bs\"");
  }
  canon["energy_convention"] = convention;

  {
    const json sv = doc.value("solver", json::object());
    check_keys(sv, "solver", {"method", "max_iters", "step0", "oracle_grid"});
    const std::string method = text(sv, "method", "solver", "auto");
    if (method == "auto") {
      cfg.solver.method = SolverChoice::kAuto;
    } else if (method == "closed") {
      cfg.solver.method = SolverChoice::kClosed;
    } else if (method == "subgradient") {
      cfg.solver.method = SolverChoice::kSubgradient;
    } else if (method == "oracle") {
      cfg.solver.method = SolverChoice::kOracle;
    } else {
      fail("solver.method", "must be auto, closed, subgradient or oracle");
    }
    const long iters = integer(sv, "max_iters", "solver", 3000);
    if (iters < 1 || iters > 10000000) fail("solver.max_iters", "must be in [1, 1e7]");
    cfg.solver.max_iters = static_cast<int>(iters);
    cfg.solver.step0 = number(sv, "step0", "solver", 0.5);
    if (!(cfg.solver.step0 > 0.0)) fail("solver.step0", "must be > 0");
    const long grid = integer(sv, "oracle_grid", "solver", 40);
    if (grid < 2 || grid > drm::kOracleMaxGridPoints) fail("solver.oracle_grid", "must be in [2, 200]");
    cfg.solver.oracle_grid = static_cast<int>(grid);
    canon["solver"] = {{"method", method}, {"max_iters", iters}, {"step0", cfg.solver.step0}, {"oracle_grid", grid}};
  }

  {
    const json mc = doc.value("mc", json::object());
    check_keys(mc, "mc", {"trials", "seed"});
    cfg.mc.trials = integer(mc, "trials", "mc", 0);
    if (cfg.mc.trials < 0) fail("mc.trials", "must be >= 0");
    if (mc.contains("seed") && !(mc["seed"].is_number_unsigned() || (mc["seed"].is_number_integer() && mc["seed"].get<long>() >= 0))) {
      fail("mc.seed", "must be a nonnegative integer");
    }
    cfg.mc.seed = mc.contains("seed") ? mc["seed"].get<std::uint64_t>() : 0;
    canon["mc"] = {{"trials", cfg.mc.trials}, {"seed", cfg.mc.seed}};
  }

  if (doc.contains("sweep")) {
    const json& sw = doc["sweep"];
    check_keys(sw, "sweep", {"axis", "values"});
    SweepSpec spec;
    spec.axis = text(sw, "axis", "sweep", "");
    if (spec.axis.empty()) fail("sweep.axis", "is required");
    if (spec.axis.rfind("sweep", 0) == 0 || spec.axis.rfind("mc", 0) == 0 || spec.axis.rfind("solver", 0) == 0) {
      fail("sweep.axis", "must name a model parameter");
    }
    if (!names_number(canon, spec.axis)) fail("sweep.axis", "'" + spec.axis + "' names no numeric parameter");
    if (!sw.contains("values") || !sw["values"].is_array() || sw["values"].empty()) {
      fail("sweep.values", "must be a non-empty list");
    }
    for (std::size_t i = 0; i < sw["values"].size(); ++i) {
      const json& v = sw["values"][i];
      const std::string field = "sweep.values." + std::to_string(i);
      if (v.is_string() && v.get<std::string>() == "inf") {
        spec.values.push_back(kInf);
      } else if (v.is_number() && std::isfinite(v.get<double>())) {
        spec.values.push_back(v.get<double>());
      } else {
        fail(field, "must be a finite number or \"inf\"");
      }
    }
    std::sort(spec.values.begin(), spec.values.end());
    json values = json::array();
    for (double v : spec.values) values.push_back(number_json(v));
    canon["sweep"] = {{"axis", spec.axis}, {"values", values}};
    cfg.sweep = spec;
  }

  cfg.document = canon;
  return cfg;
}

ScenarioConfig config_at(const ScenarioConfig& cfg, double value) {
  if (!cfg.sweep) throw InvalidArgument("config_at: configuration has no sweep");
  json doc = cfg.document;
  doc[pointer_of(cfg.sweep->axis)] = number_json(value);
  ScenarioConfig out = parse_config(doc);
  return out;
}

}  // namespace sgdrm::scenario
