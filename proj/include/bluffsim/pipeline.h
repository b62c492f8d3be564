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

#ifndef BLUFFSIM_PIPELINE_H_
#define BLUFFSIM_PIPELINE_H_

#include <array>
#include <filesystem>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "bluffsim/broker.h"
#include "bluffsim/config.h"
#include "bluffsim/detection.h"
#include "bluffsim/metrics.h"
#include "bluffsim/traffic.h"

namespace bluffsim {

// Explicit campaigns from the config, or a generated inventory of
// campaigns_per_topic campaigns per topic. Ad ids run from 1.
std::vector<CampaignSpec> build_campaigns(const ScenarioConfig& cfg);

ReferenceProfile reference_profile(const ScenarioConfig& cfg);

// Traffic side of one run: everything the detector does not own.
struct Simulation {
  ScenarioConfig config;
  std::unique_ptr<Population> population;
  std::unique_ptr<Broker> broker;
  TrafficRun traffic;
};

Simulation simulate(const ScenarioConfig& cfg);

struct Evaluation {
  ReportMap reports;  // agents with at least one event
  Confusion confusion;
  std::array<Confusion, 6> by_kind;  // indexed by AgentKind
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double auc = 0.0;  // NaN when only one class is present
  EconomicSummary economics;
};

Evaluation evaluate(const Simulation& sim, const DetectorConfig& detector);

std::vector<std::pair<std::string, std::string>> summary_rows(
    const Simulation& sim, const Evaluation& eval);

// events.jsonl, truth.csv, verdicts.csv, summary.csv and config.json.
void write_outputs(const std::filesystem::path& dir, const Simulation& sim,
                   const Evaluation& eval);

struct SweepRow {
  double value = 0.0;
  std::vector<std::pair<std::string, std::string>> summary;
};

// Detector-side parameters (detector.*) reuse one traffic run.
std::vector<SweepRow> sweep(const ScenarioConfig& cfg,
                            const std::string& param,
                            const std::vector<double>& values);

std::string sweep_csv(const std::string& param,
                      const std::vector<SweepRow>& rows);

}  // namespace bluffsim

#endif  // BLUFFSIM_PIPELINE_H_
