// Copyright 2026 The Bluffsim Authors
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

// bluffsim: run a scenario or sweep one numeric parameter.
//
//   bluffsim run --config scenario.json --out results/ [--seed N] [--dry-run]
//   bluffsim sweep --config scenario.json --param detector.fusion_threshold \
//       --values 0.3,0.5,0.7 --out sweep/
//
// Exit codes: 0 success, 2 configuration or usage error, 1 runtime error.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bluffsim/config.h"
#include "bluffsim/io.h"
#include "bluffsim/pipeline.h"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

bluffsim::ScenarioConfig load(const std::string& path,
                              std::optional<uint64_t> seed) {
  bluffsim::ScenarioConfig cfg = bluffsim::load_config(path);
  if (seed) {
    cfg.seed = *seed;
    cfg.validate();
  }
  return cfg;
}

int cmd_run(const std::string& config, const std::string& out,
            std::optional<uint64_t> seed, bool dry_run) {
  const bluffsim::ScenarioConfig cfg = load(config, seed);
  if (dry_run) {
    std::cout << "config ok: " << config << "\n";
    return 0;
  }
  const auto start = std::chrono::steady_clock::now();
  const bluffsim::Simulation sim = bluffsim::simulate(cfg);
  const bluffsim::Evaluation ev = bluffsim::evaluate(sim, cfg.detector);
  bluffsim::write_outputs(out, sim, ev);
  const std::chrono::duration<double> took =
      std::chrono::steady_clock::now() - start;
  for (const auto& [k, v] : bluffsim::summary_rows(sim, ev)) {
    std::cout << k << " " << v << "\n";
  }
  std::cout << "wrote " << out << " in " << took.count() << " s\n";
  return 0;
}

int cmd_sweep(const std::string& config, const std::string& param,
              const std::vector<double>& values, const std::string& out) {
  const bluffsim::ScenarioConfig cfg = bluffsim::load_config(config);
  const auto rows = bluffsim::sweep(cfg, param, values);
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) throw std::runtime_error(out + ": " + ec.message());
  const std::string csv = bluffsim::sweep_csv(param, rows);
  bluffsim::write_file_atomic(std::filesystem::path(out) / "sweep.csv", csv);
  bluffsim::write_file_atomic(std::filesystem::path(out) / "config.json",
                              bluffsim::to_json(cfg).dump(2) + "\n");
  std::cout << csv;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Click-fraud simulator with decoy ad injection"};
  app.require_subcommand(1);

  std::string config, out, param;
  std::optional<uint64_t> seed;
  bool dry_run = false;
  std::vector<double> values;

  CLI::App* run = app.add_subcommand("run", "Simulate, detect and report");
  run->add_option("--config", config, "Scenario JSON")->required();
  run->add_option("--out", out, "Output directory");
  run->add_option("--seed", seed, "Override the config seed");
  run->add_flag("--dry-run", dry_run, "Validate the config only");

  CLI::App* sw = app.add_subcommand("sweep", "Vary one numeric parameter");
  sw->add_option("--config", config, "Scenario JSON")->required();
  sw->add_option("--param", param, "Dotted config path")->required();
  sw->add_option("--values", values, "Comma-separated values")
      ->required()
      ->delimiter(',');
  sw->add_option("--out", out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) {
      if (out.empty() && !dry_run) {
        std::cerr << "run: --out is required unless --dry-run is given\n";
        return kExitConfig;
      }
      return cmd_run(config, out, seed, dry_run);
    }
    return cmd_sweep(config, param, values, out);
  } catch (const bluffsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
