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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace bluffsim {

using nlohmann::json;

namespace {

constexpr std::string_view kDefaultPreset = "default-attack";

void set_activity(BehaviorParams& b, double sessions, int pages, double gap,
                  int64_t delay_min, int64_t delay_max) {
  b.sessions_per_day = sessions;
  b.pages_per_session = pages;
  b.page_gap_ms = gap;
  b.click_delay_min_ms = delay_min;
  b.click_delay_max_ms = delay_max;
}

BehaviorParams& cohort(ScenarioConfig& c, AgentKind k) {
  return c.behavior[static_cast<int>(k)];
}

// Strict reader over one JSON object: remembers which keys were consumed so
// that anything left over is reported as unknown.
class Fields {
 public:
  Fields(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) fail("", "expected an object");
  }

  [[noreturn]] void fail(std::string_view key, std::string_view what) const {
    throw ConfigError(at(key) + ": " + std::string(what));
  }

  std::string at(std::string_view key) const {
    if (key.empty()) return path_.empty() ? "<root>" : path_;
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  const json* find(std::string_view key) {
    const auto it = obj_.find(std::string(key));
    if (it == obj_.end()) return nullptr;
    used_.insert(std::string(key));
    return &*it;
  }

  void real(std::string_view key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) fail(key, "expected a number");
      out = v->get<double>();
    }
  }

  template <typename Int>
  void integer(std::string_view key, Int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) fail(key, "expected an integer");
      if constexpr (std::is_unsigned_v<Int>) {
        if (v->is_number_unsigned()) {
          out = static_cast<Int>(v->get<uint64_t>());
          return;
        }
        if (v->get<int64_t>() < 0) fail(key, "must be non-negative");
      }
      out = static_cast<Int>(v->get<int64_t>());
    }
  }

  void reals(std::string_view key, std::vector<double>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array()) fail(key, "expected an array of numbers");
      out.clear();
      for (const auto& x : *v) {
        if (!x.is_number()) fail(key, "expected an array of numbers");
        out.push_back(x.get<double>());
      }
    }
  }

  void finish() const {
    for (const auto& [key, _] : obj_.items()) {
      if (!used_.contains(key)) fail(key, "unknown key");
    }
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> used_;
};

void parse_activity(Fields& f, BehaviorParams& b) {
  f.real("sessions_per_day", b.sessions_per_day);
  f.integer("pages_per_session", b.pages_per_session);
  f.real("page_gap_ms", b.page_gap_ms);
  f.integer("click_delay_min_ms", b.click_delay_min_ms);
  f.integer("click_delay_max_ms", b.click_delay_max_ms);
}

void parse_behavior(const json& j, ScenarioConfig& c) {
  Fields f(j, "behavior");
  BehaviorParams shared = c.behavior[0];
  f.real("base_ctr", shared.base_ctr);
  f.real("accidental_rate", shared.accidental_rate);
  f.real("bot_click_rate", shared.bot_click_rate);
  f.real("dictionary_skill", shared.dictionary_skill);
  f.real("harvest_threshold", shared.harvest_threshold);
  for (auto& b : c.behavior) {
    b.base_ctr = shared.base_ctr;
    b.accidental_rate = shared.accidental_rate;
    b.bot_click_rate = shared.bot_click_rate;
    b.dictionary_skill = shared.dictionary_skill;
    b.harvest_threshold = shared.harvest_threshold;
  }
  if (const json* act = f.find("activity")) {
    Fields a(*act, "behavior.activity");
    for (AgentKind k : kAllAgentKinds) {
      if (const json* one = a.find(to_string(k))) {
        Fields cf(*one, a.at(to_string(k)));
        parse_activity(cf, cohort(c, k));
        cf.finish();
      }
    }
    a.finish();
  }
  f.finish();
}

void parse_mix(const json& j, TrafficMix& mix) {
  Fields f(j, "mix");
  for (AgentKind k : kAllAgentKinds) {
    f.integer("n_" + std::string(to_string(k)), mix.count(k));
  }
  f.integer("ip_sharing_factor", mix.ip_sharing_factor);
  f.finish();
}

void parse_injection(const json& j, InjectionConfig& inj) {
  Fields f(j, "injection");
  f.real("rho", inj.rho);
  f.real("type_b_share", inj.type_b_share);
  f.integer("bluff_pool_size", inj.bluff_pool_size);
  f.real("bluff_epsilon", inj.bluff_epsilon);
  f.finish();
}

void parse_detector(const json& j, DetectorConfig& d) {
  Fields f(j, "detector");
  f.real("p0", d.p0);
  f.real("pvalue_threshold", d.pvalue_threshold);
  f.integer("min_clicks", d.min_clicks);
  f.integer("window_ms", d.window_ms);
  f.integer("click_cap", d.click_cap);
  f.integer("blacklist_ttl_ms", d.blacklist_ttl_ms);
  f.real("divergence_threshold", d.divergence_threshold);
  f.real("mismatch_eps", d.mismatch_eps);
  f.real("w_bluff", d.w_bluff);
  f.real("w_thresh", d.w_thresh);
  f.real("w_profile", d.w_profile);
  f.real("fusion_threshold", d.fusion_threshold);
  f.finish();
}

void parse_inventory(const json& j, InventoryConfig& inv) {
  Fields f(j, "inventory");
  f.integer("campaigns_per_topic", inv.campaigns_per_topic);
  f.integer("ads_per_campaign", inv.ads_per_campaign);
  f.integer("bid_min_micros", inv.bid_min_micros);
  f.integer("bid_max_micros", inv.bid_max_micros);
  f.integer("daily_budget_micros", inv.daily_budget_micros);
  f.finish();
}

void parse_campaigns(const json& j, std::vector<CampaignConfig>& out) {
  if (!j.is_array()) throw ConfigError("campaigns: expected an array");
  out.clear();
  for (std::size_t i = 0; i < j.size(); ++i) {
    Fields f(j[i], "campaigns[" + std::to_string(i) + "]");
    CampaignConfig c;
    f.integer("advertiser_id", c.advertiser_id);
    f.integer("bid_micros", c.bid.micros);
    f.integer("daily_budget_micros", c.daily_budget.micros);
    f.reals("targeting", c.targeting);
    f.finish();
    out.push_back(std::move(c));
  }
}

void check_weights(const std::vector<double>& w, std::size_t n,
                   const std::string& name) {
  if (w.size() != n) {
    throw ConfigError(name + ": expected " + std::to_string(n) + " weights");
  }
  double sum = 0.0;
  for (double x : w) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw ConfigError(name + ": weights must be finite and >= 0");
    }
    sum += x;
  }
  if (!(sum > 0.0)) throw ConfigError(name + ": weights must not all be 0");
}

}  // namespace

ScenarioConfig::ScenarioConfig() {
  // Quiet nights, a midday bump and an evening peak.
  diurnal = {0.3, 0.2, 0.15, 0.1, 0.1, 0.15, 0.3, 0.6, 0.8, 0.9, 1.0, 1.0,
             1.1, 1.0, 0.9, 0.9, 1.0, 1.1, 1.3, 1.5, 1.6, 1.4, 1.0, 0.6};
  mix.count(AgentKind::kBenign) = 1000;
  mix.count(AgentKind::kRandomBot) = 30;
  mix.count(AgentKind::kTrainedBot) = 20;
  // Calibrated on benign-only runs, where about 0.8% of clicks hit decoys.
  detector.p0 = 0.012;
  set_activity(cohort(*this, AgentKind::kBenign), 3.0, 12, 40'000.0, 500,
               5'000);
  set_activity(cohort(*this, AgentKind::kRandomBot), 1.0, 8, 2'000.0, 200,
               1'500);
  set_activity(cohort(*this, AgentKind::kTrainedBot), 3.0, 5, 40'000.0, 500,
               5'000);
  set_activity(cohort(*this, AgentKind::kDictionaryBot), 3.0, 5, 40'000.0,
               500, 5'000);
  set_activity(cohort(*this, AgentKind::kProfileHarvester), 2.0, 10, 3'000.0,
               200, 1'500);
  set_activity(cohort(*this, AgentKind::kViewBot), 8.0, 20, 5'000.0, 200,
               1'500);
}

void ScenarioConfig::validate() const {
  if (horizon_days < 1) throw ConfigError("horizon_days: must be >= 1");
  if (slots_per_page < 1) throw ConfigError("slots_per_page: must be >= 1");
  if (topic_dim < 2) throw ConfigError("topic_dim: must be >= 2");
  if (regions < 1 || regions > 200) {
    throw ConfigError("regions: must be in [1, 200]");
  }
  check_weights(benign_region_weights, regions, "benign_region_weights");
  check_weights(botnet_region_weights, regions, "botnet_region_weights");
  check_weights({diurnal.begin(), diurnal.end()}, 24, "diurnal");
  if (reference_hours) check_weights(*reference_hours, 24, "reference_hours");
  if (reference_regions) {
    check_weights(*reference_regions, regions, "reference_regions");
  }
  try {
    mix.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(e.what()));
  }
  for (AgentKind k : kAllAgentKinds) {
    try {
      behavior[static_cast<int>(k)].validate();
    } catch (const ConfigError& e) {
      throw ConfigError(std::string(e.what()) + " (cohort " +
                        std::string(to_string(k)) + ")");
    }
  }
  injection.validate();
  detector.validate();

  std::set<AdvertiserId> seen;
  for (std::size_t i = 0; i < campaigns.size(); ++i) {
    const auto& c = campaigns[i];
    const std::string where = "campaigns[" + std::to_string(i) + "]";
    if (!seen.insert(c.advertiser_id).second) {
      throw ConfigError(where + ".advertiser_id: duplicate");
    }
    if (c.bid.micros <= 0) throw ConfigError(where + ".bid_micros: must be > 0");
    if (c.daily_budget.micros < 0) {
      throw ConfigError(where + ".daily_budget_micros: must be >= 0");
    }
    check_weights(c.targeting, topic_dim, where + ".targeting");
  }
  if (campaigns.empty()) {
    if (inventory.campaigns_per_topic < 0) {
      throw ConfigError("inventory.campaigns_per_topic: must be >= 0");
    }
    if (inventory.ads_per_campaign < 1) {
      throw ConfigError("inventory.ads_per_campaign: must be >= 1");
    }
    if (inventory.bid_min_micros < 1 ||
        inventory.bid_max_micros < inventory.bid_min_micros) {
      throw ConfigError("inventory.bid_min_micros/bid_max_micros");
    }
    if (inventory.daily_budget_micros < 0) {
      throw ConfigError("inventory.daily_budget_micros: must be >= 0");
    }
  } else if (inventory.ads_per_campaign < 1) {
    throw ConfigError("inventory.ads_per_campaign: must be >= 1");
  }
  if (mix.count(AgentKind::kViewBot) > 0) {
    const int n = campaigns.empty()
                      ? inventory.campaigns_per_topic * static_cast<int>(topic_dim)
                      : static_cast<int>(campaigns.size());
    if (view_bot_target < 0 || view_bot_target >= n) {
      throw ConfigError("view_bot_target: no such campaign");
    }
  }
}

std::vector<std::string_view> preset_names() {
  return {"default-attack", "no-bluff", "benign-only", "dictionary-attack",
          "view-fraud"};
}

ScenarioConfig preset(std::string_view name) {
  ScenarioConfig c;
  if (name == kDefaultPreset) return c;
  if (name == "no-bluff") {
    c.injection.rho = 0.0;
    return c;
  }
  if (name == "benign-only") {
    c.mix.counts.fill(0);
    c.mix.count(AgentKind::kBenign) = 1000;
    return c;
  }
  if (name == "dictionary-attack") {
    c.mix.count(AgentKind::kTrainedBot) = 0;
    c.mix.count(AgentKind::kDictionaryBot) = 20;
    c.mix.count(AgentKind::kProfileHarvester) = 20;
    for (auto& b : c.behavior) b.dictionary_skill = 1.0;
    return c;
  }
  if (name == "view-fraud") {
    c.mix.count(AgentKind::kViewBot) = 20;
    return c;
  }
  throw ConfigError("preset: unknown preset '" + std::string(name) + "'");
}

ScenarioConfig parse_config(const json& doc) {
  Fields f(doc, "");
  ScenarioConfig c;
  if (const json* p = f.find("preset")) {
    if (!p->is_string()) f.fail("preset", "expected a string");
    c = preset(p->get<std::string>());
  }
  f.integer("seed", c.seed);
  f.integer("horizon_days", c.horizon_days);
  f.integer("slots_per_page", c.slots_per_page);
  f.integer("topic_dim", c.topic_dim);
  f.integer("regions", c.regions);
  f.reals("benign_region_weights", c.benign_region_weights);
  f.reals("botnet_region_weights", c.botnet_region_weights);
  if (f.find("diurnal") != nullptr) {
    std::vector<double> d;
    f.reals("diurnal", d);
    if (d.size() != 24) f.fail("diurnal", "expected 24 hourly weights");
    std::copy(d.begin(), d.end(), c.diurnal.begin());
  }
  if (f.find("reference_hours") != nullptr) {
    c.reference_hours.emplace();
    f.reals("reference_hours", *c.reference_hours);
  }
  if (f.find("reference_regions") != nullptr) {
    c.reference_regions.emplace();
    f.reals("reference_regions", *c.reference_regions);
  }
  f.integer("view_bot_target", c.view_bot_target);
  if (const json* j = f.find("mix")) parse_mix(*j, c.mix);
  if (const json* j = f.find("behavior")) parse_behavior(*j, c);
  if (const json* j = f.find("injection")) parse_injection(*j, c.injection);
  if (const json* j = f.find("detector")) parse_detector(*j, c.detector);
  if (const json* j = f.find("inventory")) parse_inventory(*j, c.inventory);
  if (const json* j = f.find("campaigns")) parse_campaigns(*j, c.campaigns);
  f.finish();
  c.validate();
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

nlohmann::ordered_json to_json(const ScenarioConfig& c) {
  using oj = nlohmann::ordered_json;
  oj j;
  j["seed"] = c.seed;
  j["horizon_days"] = c.horizon_days;
  j["slots_per_page"] = c.slots_per_page;
  j["topic_dim"] = c.topic_dim;
  j["regions"] = c.regions;
  j["benign_region_weights"] = c.benign_region_weights;
  j["botnet_region_weights"] = c.botnet_region_weights;
  j["diurnal"] = std::vector<double>(c.diurnal.begin(), c.diurnal.end());
  j["reference_hours"] =
      c.reference_hours.value_or(std::vector<double>(c.diurnal.begin(),
                                                     c.diurnal.end()));
  j["reference_regions"] =
      c.reference_regions.value_or(c.benign_region_weights);
  j["view_bot_target"] = c.view_bot_target;

  oj mix;
  for (AgentKind k : kAllAgentKinds) {
    mix["n_" + std::string(to_string(k))] = c.mix.count(k);
  }
  mix["ip_sharing_factor"] = c.mix.ip_sharing_factor;
  j["mix"] = mix;

  const BehaviorParams& shared = c.behavior[0];
  oj beh;
  beh["base_ctr"] = shared.base_ctr;
  beh["accidental_rate"] = shared.accidental_rate;
  beh["bot_click_rate"] = shared.bot_click_rate;
  beh["dictionary_skill"] = shared.dictionary_skill;
  beh["harvest_threshold"] = shared.harvest_threshold;
  oj act;
  for (AgentKind k : kAllAgentKinds) {
    const BehaviorParams& b = c.behavior[static_cast<int>(k)];
    oj a;
    a["sessions_per_day"] = b.sessions_per_day;
    a["pages_per_session"] = b.pages_per_session;
    a["page_gap_ms"] = b.page_gap_ms;
    a["click_delay_min_ms"] = b.click_delay_min_ms;
    a["click_delay_max_ms"] = b.click_delay_max_ms;
    act[std::string(to_string(k))] = a;
  }
  beh["activity"] = act;
  j["behavior"] = beh;

  j["injection"] = {{"rho", c.injection.rho},
                    {"type_b_share", c.injection.type_b_share},
                    {"bluff_pool_size", c.injection.bluff_pool_size},
                    {"bluff_epsilon", c.injection.bluff_epsilon}};
  const DetectorConfig& d = c.detector;
  j["detector"] = {{"p0", d.p0},
                   {"pvalue_threshold", d.pvalue_threshold},
                   {"min_clicks", d.min_clicks},
                   {"window_ms", d.window_ms},
                   {"click_cap", d.click_cap},
                   {"blacklist_ttl_ms", d.blacklist_ttl_ms},
                   {"divergence_threshold", d.divergence_threshold},
                   {"mismatch_eps", d.mismatch_eps},
                   {"w_bluff", d.w_bluff},
                   {"w_thresh", d.w_thresh},
                   {"w_profile", d.w_profile},
                   {"fusion_threshold", d.fusion_threshold}};
  j["inventory"] = {
      {"campaigns_per_topic", c.inventory.campaigns_per_topic},
      {"ads_per_campaign", c.inventory.ads_per_campaign},
      {"bid_min_micros", c.inventory.bid_min_micros},
      {"bid_max_micros", c.inventory.bid_max_micros},
      {"daily_budget_micros", c.inventory.daily_budget_micros}};
  oj camps = oj::array();
  for (const auto& cc : c.campaigns) {
    camps.push_back({{"advertiser_id", cc.advertiser_id},
                     {"bid_micros", cc.bid.micros},
                     {"daily_budget_micros", cc.daily_budget.micros},
                     {"targeting", cc.targeting}});
  }
  j["campaigns"] = camps;
  return j;
}

ScenarioConfig with_parameter(const ScenarioConfig& cfg,
                              std::string_view dotted_path, double value) {
  json doc = json::parse(to_json(cfg).dump());
  json* node = &doc;
  std::string path(dotted_path);
  std::stringstream ss(path);
  std::string part;
  while (std::getline(ss, part, '.')) {
    if (!node->is_object() || !node->contains(part)) {
      throw ConfigError(path + ": no such config field");
    }
    node = &(*node)[part];
  }
  if (!node->is_number()) throw ConfigError(path + ": not a numeric field");
  if (node->is_number_integer()) {
    if (value != std::floor(value)) {
      throw ConfigError(path + ": integer field needs an integral value");
    }
    *node = static_cast<int64_t>(value);
  } else {
    *node = value;
  }
  return parse_config(doc);
}

}  // namespace bluffsim
