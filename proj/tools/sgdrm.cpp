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


#include <CLI11.hpp>
#include <iostream>
#include <sstream>

#include "sgdrm/errors.hpp"
#include "sgdrm/scenario.hpp"

namespace {

using nlohmann::json;
namespace sc = sgdrm::scenario;

// "AXIS=v1,v2,..." -> {"axis": AXIS, "values": [...]}
json parse_sweep(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw sgdrm::ConfigError("--sweep", "expected AXIS=v1,v2,...");
  json values = json::array();
  std::stringstream in(text.substr(eq + 1));
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item == "inf") {
      values.push_back("inf");
      continue;
    }
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      values.push_back(v);
    } catch (const std::exception&) {
      throw sgdrm::ConfigError("--sweep", "'" + item + "' is not a number");
    }
  }
  return {{"axis", text.substr(0, eq)}, {"values", values}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy allocation from smart-grid suppliers to cellular operators"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a scenario (optionally a sweep) and write CSV, JSON and SVG outputs");
  std::string config_path;
  std::string out_dir = "out";
  std::string profile;
  std::string sweep;
  long mc_trials = -1;
  std::optional<std::uint64_t> seed;
  std::string solver;
  run->add_option("config", config_path, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory")->capture_default_str();
  run->add_option("--profile", profile, "Built-in defaults")->check(CLI::IsMember(sc::profile_names()));
  run->add_option("--sweep", sweep, "AXIS=v1,v2,... with AXIS a dotted config path");
  run->add_option("--mc-trials", mc_trials, "Monte Carlo coverage trials per operator (0 disables)");
  run->add_option("--seed", seed, "Monte Carlo seed");
  run->add_option("--solver", solver, "Allocation solver")->check(CLI::IsMember({"closed", "subgradient", "oracle"}));

  auto* profiles = app.add_subcommand("profile", "Print a built-in profile as JSON");
  std::string profile_name;
  profiles->add_option("name", profile_name)->required()->check(CLI::IsMember(sc::profile_names()));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  if (*profiles) {
    std::cout << sc::profile_document(profile_name).dump(2) << '\n';
    return 0;
  }

  sc::ScenarioConfig cfg;
  try {
    json doc = sc::load_document(config_path, profile);
    if (!sweep.empty()) doc["sweep"] = parse_sweep(sweep);
    if (mc_trials >= 0) doc["mc"]["trials"] = mc_trials;
    if (seed) doc["mc"]["seed"] = *seed;
    if (!solver.empty()) doc["solver"]["method"] = solver;
    cfg = sc::parse_config(doc);
    const auto results = sc::run_pipeline(cfg);
    sc::emit_outputs(results, cfg, out_dir);
    for (std::size_t i = 0; i < results.size(); ++i) {
      const auto& r = results[i];
      std::cerr << "point " << i;
      if (r.axis_value) std::cerr << " (" << cfg.sweep->axis << " = " << *r.axis_value << ")";
      std::cerr << ": " << r.status;
      if (!r.reason.empty()) std::cerr << " [" << r.reason << "]";
      std::cerr << '\n';
    }
    return sc::exit_code(results);
  } catch (const sgdrm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
