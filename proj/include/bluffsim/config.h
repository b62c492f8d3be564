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

#ifndef BLUFFSIM_CONFIG_H_
#define BLUFFSIM_CONFIG_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bluffsim/broker.h"
#include "bluffsim/detection.h"
#include "bluffsim/traffic.h"
#include "json.hpp"

namespace bluffsim {

struct CampaignConfig {
  AdvertiserId advertiser_id = 0;
  Money bid;
  Money daily_budget;
  std::vector<double> targeting;
};

// Generated inventory, used when no explicit campaign list is given.
struct InventoryConfig {
  int campaigns_per_topic = 3;
  int ads_per_campaign = 2;
  int64_t bid_min_micros = 100'000;
  int64_t bid_max_micros = 1'000'000;
  int64_t daily_budget_micros = 200'000'000;
};

struct ScenarioConfig {
  uint64_t seed = 42;
  int horizon_days = 7;
  int slots_per_page = 4;
  std::size_t topic_dim = kDefaultTopicDim;
  int regions = 4;
  std::vector<double> benign_region_weights{0.8, 0.2, 0.0, 0.0};
  std::vector<double> botnet_region_weights{0.0, 0.0, 0.5, 0.5};
  DiurnalCurve diurnal = flat_diurnal();
  TrafficMix mix;
  // Indexed by AgentKind. Click-model fields are shared; activity fields
  // (sessions, pages, gaps, click delays) are per cohort.
  std::array<BehaviorParams, 6> behavior;
  InjectionConfig injection;
  DetectorConfig detector;
  // Reference profile weights; default to the diurnal curve and the benign
  // region weights.
  std::optional<std::vector<double>> reference_hours;
  std::optional<std::vector<double>> reference_regions;
  std::vector<CampaignConfig> campaigns;
  InventoryConfig inventory;
  int view_bot_target = 0;  // campaign index ViewBots impersonate

  ScenarioConfig();

  Timestamp horizon() const { return {horizon_days * kMsPerDay}; }
  // Throws ConfigError naming the offending field.
  void validate() const;
};

// Named starting points. "default-attack" equals the built-in defaults.
std::vector<std::string_view> preset_names();
ScenarioConfig preset(std::string_view name);

// Parses a JSON key tree. Unknown keys are errors; absent keys keep their
// defaults. An optional top-level "preset" picks the starting point.
ScenarioConfig parse_config(const nlohmann::json& doc);
ScenarioConfig load_config(const std::filesystem::path& path);

// Fully resolved tree in the same format parse_config accepts.
nlohmann::ordered_json to_json(const ScenarioConfig& cfg);

// Sets a numeric field by dotted path on the resolved tree and re-parses.
// Throws ConfigError if the path does not name a numeric field.
ScenarioConfig with_parameter(const ScenarioConfig& cfg,
                              std::string_view dotted_path, double value);

}  // namespace bluffsim

#endif  // BLUFFSIM_CONFIG_H_
