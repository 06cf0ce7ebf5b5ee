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


#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "sgdrm/errors.hpp"
#include "sgdrm/scenario.hpp"
#include "sgdrm/units.hpp"

using namespace sgdrm;
using namespace sgdrm::scenario;
using nlohmann::json;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "sgdrm_unit" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string read(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string config_error_field(const json& doc) {
  try {
    (void)parse_config(doc);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

// Small, fast scenario: one operator, two flat-price suppliers.
json small() {
  json doc = profile_document("paper-baseline");
  doc["operators"] = json::array({doc["operators"][2]});
  doc["suppliers"] = json::array({doc["suppliers"][0], doc["suppliers"][2]});
  doc["emissions_cap"] = "inf";
  doc["fairness"] = 0;
  return doc;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream in(line);
  std::string cell;
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

TEST_SUITE("scenario") {

TEST_CASE("paper-baseline profile") {
  const auto cfg = parse_config(profile_document("paper-baseline"));
  REQUIRE(cfg.operators.size() == 3);
  REQUIRE(cfg.suppliers.size() == 3);
  const double t_db[] = {15, 10, 5};
  const double target[] = {0.7, 0.8, 0.9};
  const double w[] = {1, 2, 3};
  const double c[] = {0.1, 0.5, 2.5};
  for (int i = 0; i < 3; ++i) {
    CHECK(cfg.operators[i].sinr_threshold == doctest::Approx(units::db_to_linear(t_db[i])));
    CHECK(cfg.operators[i].coverage_target == target[i]);
    CHECK(cfg.suppliers[i].benchmark_price == w[i]);
    CHECK(cfg.suppliers[i].unit_cost == c[i]);
    CHECK(cfg.suppliers[i].capacity == 150e3);
  }
  CHECK(cfg.physics.noise_power == doctest::Approx(std::pow(10.0, -11.5)));
  CHECK(cfg.physics.area == 1e8);
  CHECK(cfg.emissions_cap == 1e7);
}

TEST_CASE("fig1 profile") {
  const auto cfg = parse_config(profile_document("fig1"));
  REQUIRE(cfg.suppliers.size() == 2);
  CHECK(cfg.suppliers[0].price_sensitivity == 1);
  CHECK(cfg.suppliers[1].capacity == 170e3);
  CHECK(cfg.emissions_cap == 4.5e7);
  CHECK(cfg.fairness == 0.0);
  REQUIRE(cfg.sweep);
  CHECK(cfg.sweep->values.size() == 12);
}

TEST_CASE("validation errors name the field") {
  json doc = profile_document("paper-baseline");
  doc["operators"][1]["coverage_target"] = 1.2;
  CHECK(config_error_field(doc) == "operators.1.coverage_target");

  doc = profile_document("paper-baseline");
  doc.erase("suppliers");
  CHECK(config_error_field(doc) == "suppliers");

  doc = profile_document("paper-baseline");
  doc["physics"]["path_loss"] = 4;
  CHECK(config_error_field(doc) == "physics.path_loss");

  doc = profile_document("paper-baseline");
  doc["suppliers"][0]["unit_cost"] = 2.0;
  CHECK(config_error_field(doc) == "suppliers.0");

  doc = profile_document("paper-baseline");
  doc["sweep"] = {{"axis", "operators.7.sinr_threshold_db"}, {"values", {1, 2}}};
  CHECK(config_error_field(doc) == "sweep.axis");

  doc = profile_document("paper-baseline");
  doc["fairness"] = "max";
  CHECK(config_error_field(doc) == "fairness");
}

TEST_CASE("load_document merges a file over a profile") {
  const auto dir = scratch("load");
  const auto path = dir / "cfg.json";
  std::ofstream(path) << R"({"profile": "paper-baseline", "fairness": "inf", "emissions_cap": 2e7})";
  const auto cfg = load_config(path);
  CHECK(std::isinf(cfg.fairness));
  CHECK(cfg.emissions_cap == 2e7);
  CHECK(cfg.operators.size() == 3);
  CHECK(load_config(path, "fig1").suppliers.size() == 2);

  std::ofstream(dir / "bare.json") << R"({"fairness": 1})";
  CHECK_THROWS_AS(load_config(dir / "bare.json"), ConfigError);
  std::ofstream(dir / "broken.json") << "{";
  CHECK_THROWS_AS(load_config(dir / "broken.json"), ConfigError);
}

TEST_CASE("config_at sets the sweep axis") {
  json doc = small();
  doc["sweep"] = {{"axis", "suppliers.1.unit_cost"}, {"values", {2.0, 1.0}}};
  const auto cfg = parse_config(doc);
  CHECK(cfg.sweep->values == std::vector<double>{1.0, 2.0});
  CHECK(config_at(cfg, 1.5).suppliers[1].unit_cost == 1.5);
  CHECK(config_at(cfg, 1.5).suppliers[0].unit_cost == 0.1);
}

TEST_CASE("pipeline on a small scenario") {
  json doc = small();
  doc["sweep"] = {{"axis", "operators.0.sinr_threshold_db"}, {"values", {3, 5, 40}}};
  const auto cfg = parse_config(doc);
  const auto results = run_pipeline(cfg);
  REQUIRE(results.size() == 3);
  CHECK(results[0].status == "ok");
  CHECK(results[1].status == "ok");
  CHECK(results[2].status == "infeasible-qos");
  CHECK_FALSE(results[2].feasible);
  CHECK(exit_code(results) == 2);
  CHECK(results[0].operators[0].energy < results[1].operators[0].energy);
  // Flat prices, linear objective: the better margin covers the whole demand.
  CHECK(results[1].suppliers[0].production == doctest::Approx(results[1].operators[0].energy));
  CHECK(results[1].operators[0].price == doctest::Approx(1.0));
}

TEST_CASE("infeasible market aggregate is reported") {
  json doc = small();
  doc["suppliers"][0]["capacity_kj"] = 10;
  doc["suppliers"][1]["capacity_kj"] = 10;
  const auto results = run_pipeline(parse_config(doc));
  REQUIRE(results.size() == 1);
  CHECK(results[0].status == "infeasible-capacity");
  CHECK_FALSE(results[0].reason.empty());
}

TEST_CASE("outputs: header, rows and recomputation") {
  json doc = small();
  doc["sweep"] = {{"axis", "suppliers.1.unit_cost"}, {"values", {1.0, 2.0, 2.9}}};
  doc["fairness"] = 1;
  const auto cfg = parse_config(doc);
  const auto results = run_pipeline(cfg);
  const auto dir = scratch("outputs");
  const auto files = emit_outputs(results, cfg, dir);
  for (const auto& f : files) CHECK(std::filesystem::exists(f));

  std::ifstream in(dir / "results.csv");
  std::string line;
  std::getline(in, line);
  const auto header = split(line);
  CHECK(header.size() == 2 + 3 * cfg.operators.size() + 3 * cfg.suppliers.size());
  CHECK(header == results_header(cfg));
  int rows = 0;
  while (std::getline(in, line)) {
    const auto cells = split(line);
    CHECK(cells.size() == header.size());
    // Profit recomputes from the reported production under flat prices.
    const double prod = std::stod(cells[5]);
    const double profit = std::stod(cells[6]);
    CHECK(profit == doctest::Approx(prod * (1.0 - 0.1)).epsilon(1e-9));
    ++rows;
  }
  CHECK(rows == 3);

  const auto meta = json::parse(read(dir / "run_meta.json"));
  CHECK(meta["rng"] == "mt19937_64");
  CHECK(meta["config"]["fairness"] == 1.0);
  CHECK(read(dir / "demand.svg").find("<polyline") != std::string::npos);
}

TEST_CASE("empty result list writes a header-only csv") {
  const auto cfg = parse_config(small());
  const auto dir = scratch("empty");
  emit_outputs({}, cfg, dir);
  const auto text = read(dir / "results.csv");
  CHECK(std::count(text.begin(), text.end(), '\n') == 1);
  CHECK(std::filesystem::exists(dir / "run_meta.json"));
}

TEST_CASE("infeasible rows carry no numbers") {
  json doc = small();
  doc["sweep"] = {{"axis", "operators.0.coverage_target"}, {"values", {0.5, 0.99}}};
  const auto cfg = parse_config(doc);
  const auto dir = scratch("blank");
  emit_outputs(run_pipeline(cfg), cfg, dir);
  std::ifstream in(dir / "results.csv");
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  std::getline(in, line);
  const auto cells = split(line);
  CHECK(cells[1] == "0");
  for (std::size_t i = 2; i < cells.size(); ++i) CHECK(cells[i].empty());
}

TEST_CASE("monte carlo column is seeded and reproducible") {
  json doc = small();
  doc["mc"] = {{"trials", 300}, {"seed", 9}};
  const auto cfg = parse_config(doc);
  const auto a = run_pipeline(cfg);
  const auto b = run_pipeline(cfg);
  REQUIRE(a[0].operators[0].empirical);
  CHECK(a[0].operators[0].empirical->mean == b[0].operators[0].empirical->mean);
  CHECK(a[0].operators[0].empirical->n_trials == 300);
}

TEST_CASE("svg chart breaks lines at NaN") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const auto svg = svg_line_chart("t", "x", "y", {{"s", {0, 1, 2, 3}, {1, nan, 2, 3}}});
  CHECK(svg.rfind("<svg", 0) == 0);
  std::size_t lines = 0;
  for (auto p = svg.find("<polyline"); p != std::string::npos; p = svg.find("<polyline", p + 1)) ++lines;
  CHECK(lines == 2);
}

}  // TEST_SUITE
