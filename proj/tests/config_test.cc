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

#include "bluffsim/config.h"

#include <gtest/gtest.h>

#include <string>

namespace bluffsim {
namespace {

using nlohmann::json;

std::string error_of(const json& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(ConfigTest, MinimalConfigTakesDefaults) {
  const ScenarioConfig cfg = parse_config(json{{"seed", 1}});
  const ScenarioConfig defaults;
  EXPECT_EQ(cfg.seed, 1u);
  EXPECT_EQ(cfg.horizon_days, 7);
  EXPECT_EQ(cfg.slots_per_page, 4);
  EXPECT_EQ(cfg.topic_dim, 16u);
  EXPECT_EQ(cfg.mix.count(AgentKind::kBenign), 1000);
  EXPECT_EQ(cfg.mix.count(AgentKind::kRandomBot), 30);
  EXPECT_EQ(cfg.mix.count(AgentKind::kTrainedBot), 20);
  EXPECT_EQ(cfg.injection.rho, 0.1);
  EXPECT_EQ(cfg.behavior[0].accidental_rate, 0.002);
  EXPECT_EQ(cfg.behavior[0].bot_click_rate, 0.3);
  EXPECT_EQ(cfg.detector.pvalue_threshold, 1e-4);
  auto echo = to_json(cfg);
  echo["seed"] = defaults.seed;
  EXPECT_EQ(echo, to_json(defaults));
}

TEST(ConfigTest, RangeErrorsNameTheField) {
  EXPECT_NE(error_of({{"injection", {{"rho", 1.5}}}}).find("injection.rho"),
            std::string::npos);
  EXPECT_NE(error_of({{"detector", {{"min_clicks", 0}}}}).find("detector.min_clicks"),
            std::string::npos);
  EXPECT_NE(error_of({{"horizon_days", 0}}).find("horizon_days"), std::string::npos);
}

TEST(ConfigTest, UnknownKeysFail) {
  EXPECT_NE(error_of({{"sede", 1}}).find("sede"), std::string::npos);
  EXPECT_NE(error_of({{"injection", {{"roh", 0.1}}}}).find("injection.roh"),
            std::string::npos);
  EXPECT_NE(error_of({{"behavior", {{"activity", {{"benign", {{"pages", 3}}}}}}}})
                .find("behavior.activity.benign.pages"),
            std::string::npos);
}

TEST(ConfigTest, TypeErrors) {
  EXPECT_NE(error_of({{"seed", "one"}}).find("seed"), std::string::npos);
  EXPECT_NE(error_of({{"slots_per_page", 2.5}}).find("slots_per_page"),
            std::string::npos);
  EXPECT_NE(error_of({{"diurnal", {1, 2, 3}}}).find("diurnal"), std::string::npos);
}

TEST(ConfigTest, Presets) {
  EXPECT_EQ(to_json(parse_config(json{{"preset", "default-attack"}})),
            to_json(ScenarioConfig{}));
  const auto nb = parse_config(json{{"preset", "no-bluff"}});
  EXPECT_EQ(nb.injection.rho, 0.0);
  const auto dict = parse_config(json{{"preset", "dictionary-attack"}, {"seed", 3}});
  EXPECT_EQ(dict.seed, 3u);
  EXPECT_EQ(dict.mix.count(AgentKind::kTrainedBot), 0);
  EXPECT_EQ(dict.mix.count(AgentKind::kDictionaryBot), 20);
  EXPECT_EQ(dict.behavior[0].dictionary_skill, 1.0);
  const auto benign = parse_config(json{{"preset", "benign-only"}});
  EXPECT_EQ(benign.mix.total(), benign.mix.count(AgentKind::kBenign));
  for (auto name : preset_names()) EXPECT_NO_THROW(preset(name));
  EXPECT_NE(error_of({{"preset", "nope"}}).find("preset"), std::string::npos);
}

TEST(ConfigTest, EchoRoundTrips) {
  for (auto name : preset_names()) {
    const auto cfg = preset(name);
    const auto echo = to_json(cfg);
    EXPECT_EQ(to_json(parse_config(json::parse(echo.dump()))), echo) << name;
  }
}

TEST(ConfigTest, ExplicitCampaigns) {
  json doc = {{"campaigns",
               {{{"advertiser_id", 7},
                 {"bid_micros", 5000},
                 {"daily_budget_micros", 100000},
                 {"targeting", std::vector<double>(16, 1.0)}}}}};
  const auto cfg = parse_config(doc);
  ASSERT_EQ(cfg.campaigns.size(), 1u);
  EXPECT_EQ(cfg.campaigns[0].bid.micros, 5000);
  doc["campaigns"][0]["targeting"] = std::vector<double>(3, 1.0);
  EXPECT_NE(error_of(doc).find("campaigns[0].targeting"), std::string::npos);
}

TEST(ConfigTest, WithParameter) {
  const ScenarioConfig base;
  EXPECT_EQ(with_parameter(base, "injection.rho", 0.0).injection.rho, 0.0);
  EXPECT_EQ(with_parameter(base, "detector.min_clicks", 8).detector.min_clicks, 8);
  EXPECT_THROW(with_parameter(base, "detector.min_clicks", 8.5), ConfigError);
  EXPECT_THROW(with_parameter(base, "detector.nothing", 1), ConfigError);
  EXPECT_THROW(with_parameter(base, "diurnal", 1), ConfigError);
  EXPECT_THROW(with_parameter(base, "injection.rho", 2.0), ConfigError);
}

}  // namespace
}  // namespace bluffsim
