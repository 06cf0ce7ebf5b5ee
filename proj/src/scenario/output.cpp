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


#include <charconv>
#include <cmath>
#include <fstream>

#include "sgdrm/errors.hpp"
#include "sgdrm/scenario.hpp"

#ifndef SGDRM_VERSION
#define SGDRM_VERSION "unknown"
#endif

namespace sgdrm::scenario {

namespace {

// Shortest round-trip representation; locale independent.
std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

std::string quoted(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string axis_cell(const SweepResult& r) { return r.axis_value ? num(*r.axis_value) : ""; }

void write_row(std::ofstream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out << ',';
    out << cells[i];
  }
  out << '\n';
}

std::ofstream open(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  return out;
}

void write_results(const std::filesystem::path& path, const std::vector<SweepResult>& results,
                   const ScenarioConfig& cfg) {
  auto out = open(path);
  write_row(out, results_header(cfg));
  const std::size_t blanks = 3 * (cfg.operators.size() + cfg.suppliers.size());
  for (const auto& r : results) {
    std::vector<std::string> row{axis_cell(r), r.feasible ? "1" : "0"};
    if (!r.feasible) {
      row.resize(row.size() + blanks);
    } else {
      for (const auto& o : r.operators) {
        row.push_back(num(o.transmit_power));
        row.push_back(num(o.energy));
        row.push_back(num(o.price));
      }
      for (const auto& s : r.suppliers) {
        row.push_back(num(s.production));
        row.push_back(num(s.profit));
        row.push_back(num(s.emissions));
      }
    }
    write_row(out, row);
  }
}

void write_allocation(const std::filesystem::path& path, const std::vector<SweepResult>& results) {
  auto out = open(path);
  write_row(out, {"point", "axis_value", "supplier", "operator", "energy_j"});
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    if (!r.solution) continue;
    const auto& q = r.solution->allocation.q;
    for (std::size_t n = 0; n < r.suppliers.size(); ++n) {
      for (std::size_t l = 0; l < r.operators.size(); ++l) {
        write_row(out, {std::to_string(i), axis_cell(r), quoted(r.suppliers[n].id), quoted(r.operators[l].id),
                        num(q(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(l)))});
      }
    }
  }
}

void write_diagnostics(const std::filesystem::path& path, const std::vector<SweepResult>& results) {
  auto out = open(path);
  write_row(out, {"point", "axis_value", "status", "method", "iterations", "converged", "polished", "utility",
                  "kkt_residual", "max_violation", "dual_bound", "zeta", "reason"});
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    std::vector<std::string> row{std::to_string(i), axis_cell(r), r.status};
    if (r.solution) {
      const auto& d = r.solution->diagnostics;
      row.insert(row.end(), {quoted(d.method), std::to_string(d.iterations), d.converged ? "1" : "0",
                             d.polished ? "1" : "0", num(r.solution->utility), num(d.kkt_residual),
                             num(d.max_violation), num(d.dual_bound), num(r.solution->duals.zeta)});
    } else {
      row.resize(row.size() + 9);
    }
    row.push_back(quoted(r.reason));
    write_row(out, row);
  }
}

void write_coverage(const std::filesystem::path& path, const std::vector<SweepResult>& results) {
  auto out = open(path);
  write_row(out, {"point", "axis_value", "operator", "transmit_power_w", "coverage", "n_bs", "users_per_bs",
                  "energy_j", "mc_coverage", "mc_half_width_95", "mc_trials"});
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    for (const auto& o : r.operators) {
      std::vector<std::string> row{std::to_string(i), axis_cell(r), quoted(o.id), num(o.transmit_power),
                                   num(o.coverage), num(o.n_bs), num(o.users_per_bs), num(o.energy)};
      if (o.empirical) {
        row.insert(row.end(), {num(o.empirical->mean), num(o.empirical->half_width_95),
                               std::to_string(o.empirical->n_trials)});
      } else {
        row.resize(row.size() + 3);
      }
      write_row(out, row);
    }
  }
}

void write_meta(const std::filesystem::path& path, const std::vector<SweepResult>& results,
                const ScenarioConfig& cfg) {
  nlohmann::json meta;
  meta["version"] = SGDRM_VERSION;
  meta["config"] = cfg.document;
  meta["rng"] = "mt19937_64";
  meta["mc_seed"] = cfg.mc.seed;
  nlohmann::json seeds = nlohmann::json::array();
  nlohmann::json statuses = nlohmann::json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    nlohmann::json per_op = nlohmann::json::array();
    for (std::size_t l = 0; l < cfg.operators.size(); ++l) {
      per_op.push_back(spatial::derive_seed(spatial::derive_seed(cfg.mc.seed, i), l));
    }
    seeds.push_back(per_op);
    statuses.push_back(results[i].status);
  }
  if (cfg.mc.trials > 0) meta["operator_seeds"] = seeds;
  meta["status"] = statuses;
  meta["exit_code"] = exit_code(results);
  auto out = open(path);
  out << meta.dump(2) << '\n';
}

std::vector<double> x_values(const std::vector<SweepResult>& results) {
  std::vector<double> x;
  for (std::size_t i = 0; i < results.size(); ++i) {
    x.push_back(results[i].axis_value ? *results[i].axis_value : static_cast<double>(i));
  }
  return x;
}

void write_plot(const std::filesystem::path& path, const std::string& title, const std::string& x_label,
                const std::string& y_label, const std::vector<Series>& series) {
  auto out = open(path);
  out << svg_line_chart(title, x_label, y_label, series);
}

}  // namespace

std::vector<std::string> results_header(const ScenarioConfig& cfg) {
  std::vector<std::string> h{"axis_value", "feasible"};
  for (const auto& o : cfg.operators) {
    h.push_back(o.id + "_transmit_power_w");
    h.push_back(o.id + "_energy_j");
    h.push_back(o.id + "_price");
  }
  for (const auto& s : cfg.suppliers) {
    h.push_back(s.id + "_production_j");
    h.push_back(s.id + "_profit");
    h.push_back(s.id + "_emissions");
  }
  return h;
}

std::vector<std::filesystem::path> emit_outputs(const std::vector<SweepResult>& results, const ScenarioConfig& cfg,
                                                const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  auto add = [&](const std::string& name) { return written.emplace_back(out_dir / name); };
  write_results(add("results.csv"), results, cfg);
  write_allocation(add("allocation.csv"), results);
  write_diagnostics(add("diagnostics.csv"), results);
  write_coverage(add("coverage.csv"), results);
  write_meta(add("run_meta.json"), results, cfg);

  const std::vector<double> x = x_values(results);
  const std::string x_label = cfg.sweep ? cfg.sweep->axis : "point";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto collect = [&](std::size_t count, auto label, auto value) {
    std::vector<Series> series;
    for (std::size_t k = 0; k < count; ++k) {
      Series s{label(k), x, {}};
      for (const auto& r : results) s.y.push_back(r.feasible ? value(r, k) : nan);
      series.push_back(std::move(s));
    }
    return series;
  };
  const auto op_label = [&](std::size_t l) { return cfg.operators[l].id; };
  const auto sup_label = [&](std::size_t n) { return cfg.suppliers[n].id; };
  write_plot(add("demand.svg"), "Operator energy demand", x_label, "energy (kJ)",
             collect(cfg.operators.size(), op_label,
                     [](const SweepResult& r, std::size_t l) { return r.operators[l].energy / 1e3; }));
  write_plot(add("price.svg"), "Mean unit price paid", x_label, "price (MU/J)",
             collect(cfg.operators.size(), op_label,
                     [](const SweepResult& r, std::size_t l) { return r.operators[l].price; }));
  write_plot(add("profit.svg"), "Supplier profit", x_label, "profit (MU)",
             collect(cfg.suppliers.size(), sup_label,
                     [](const SweepResult& r, std::size_t n) { return r.suppliers[n].profit; }));
  write_plot(add("production.svg"), "Supplier production", x_label, "energy (kJ)",
             collect(cfg.suppliers.size(), sup_label,
                     [](const SweepResult& r, std::size_t n) { return r.suppliers[n].production / 1e3; }));
  return written;
}

}  // namespace sgdrm::scenario
