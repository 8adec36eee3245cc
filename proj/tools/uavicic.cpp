// Copyright 2026 The uavicic Authors
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

// Command-line front end: run, sweep, region, validate-config.

#include "uavicic.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  std::string schemes;
  std::optional<std::size_t> snapshots;
  std::size_t parallel = 1;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "Scenario JSON file (defaults apply when omitted)");
  cmd->add_option("--seed", c.seed, "Master seed override");
  cmd->add_option("--out", c.out, "Output directory");
  cmd->add_option("--schemes", c.schemes, "Comma-separated schemes to run");
  cmd->add_option("--snapshots", c.snapshots, "Number of channel snapshots");
  cmd->add_option("--parallel", c.parallel, "Worker threads over snapshots")->check(CLI::PositiveNumber);
}

uavicic::ScenarioConfig resolve_config(const Common& c) {
  uavicic::ScenarioConfig cfg = c.config.empty() ? uavicic::parse_config(nlohmann::json::object())
                                                 : uavicic::load_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (c.snapshots) cfg.snapshots = *c.snapshots;
  if (!c.schemes.empty()) {
    cfg.schemes.clear();
    std::stringstream ss(c.schemes);
    for (std::string s; std::getline(ss, s, ',');) {
      if (!s.empty()) cfg.schemes.push_back(s);
    }
  }
  cfg.validate();
  return cfg;
}

std::filesystem::path output_file(const Common& c, const std::string& name) {
  std::filesystem::create_directories(c.out);
  return std::filesystem::path(c.out) / name;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UAV uplink interference coordination simulator"};
  app.require_subcommand(1);

  Common run_opts, sweep_opts, region_opts, validate_opts;
  auto* run = app.add_subcommand("run", "Run all configured schemes and write report.json");
  add_common(run, run_opts);

  auto* sw = app.add_subcommand("sweep", "Sweep one parameter and write sweep.csv");
  add_common(sw, sweep_opts);
  std::string axis;
  std::vector<double> values;
  sw->add_option("--axis", axis, "pmax | num_ues | altitude | beamwidth")->required();
  sw->add_option("--values", values, "Axis values (dBm, count, m or degrees)")->required()->delimiter(',');

  auto* region = app.add_subcommand("region", "Trace the UAV/ground rate region and write region.csv");
  add_common(region, region_opts);
  std::vector<double> ratios{0.25, 0.5, 1.0, 2.0, 4.0};
  region->add_option("--ratios", ratios, "mu_g / mu_u ratios")->delimiter(',');

  auto* validate = app.add_subcommand("validate-config", "Check a config file and exit");
  add_common(validate, validate_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (run->parsed()) {
      const auto cfg = resolve_config(run_opts);
      const auto rep = uavicic::run_scenario(cfg, {run_opts.parallel});
      const auto path = output_file(run_opts, "report.json");
      write_text(path, uavicic::to_json(rep).dump(2) + "\n");
      std::cout << "wrote " << path.string() << "\n";
    } else if (sw->parsed()) {
      const auto cfg = resolve_config(sweep_opts);
      const auto res = uavicic::sweep(cfg, uavicic::parse_axis(axis), values, {sweep_opts.parallel});
      std::ostringstream csv;
      uavicic::write_sweep_csv(res, csv);
      const auto path = output_file(sweep_opts, "sweep.csv");
      write_text(path, csv.str());
      std::cout << "wrote " << path.string() << "\n";
    } else if (region->parsed()) {
      const auto cfg = resolve_config(region_opts);
      const auto pts = uavicic::rate_region(cfg, ratios, {region_opts.parallel});
      std::ostringstream csv;
      uavicic::write_region_csv(pts, csv);
      const auto path = output_file(region_opts, "region.csv");
      write_text(path, csv.str());
      std::cout << "wrote " << path.string() << "\n";
    } else if (validate->parsed()) {
      const auto cfg = resolve_config(validate_opts);
      uavicic::build_scenario(cfg);
      std::cout << "ok\n";
    }
  } catch (const uavicic::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const uavicic::GeometryError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const uavicic::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
