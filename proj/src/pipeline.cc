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

#include "bluffsim/pipeline.h"

#include <cmath>
#include <limits>

#include "bluffsim/io.h"
#include "bluffsim/rng.h"

namespace bluffsim {

namespace {

// Content matches the targeting topics with some per-ad jitter.
TopicVector ad_content(const TopicVector& targeting, SplitMix64& rng) {
  std::vector<double> w(targeting.weights().begin(), targeting.weights().end());
  for (double& x : w) {
    if (x > 0.0) x *= rng.uniform(0.8, 1.2);
  }
  return TopicVector(std::move(w));
}

CampaignSpec make_campaign(AdvertiserId advertiser, Money bid, Money budget,
                           const TopicVector& targeting, int ads,
                           AdId& next_id, SplitMix64& rng) {
  CampaignSpec spec;
  spec.advertiser_id = advertiser;
  spec.daily_budget = budget;
  for (int i = 0; i < ads; ++i) {
    AdUnit ad;
    ad.ad_id = next_id++;
    ad.advertiser_id = advertiser;
    ad.kind = AdKind::kReal;
    ad.targeting = targeting;
    ad.content = ad_content(targeting, rng);
    ad.bid = bid;
    spec.ads.push_back(std::move(ad));
  }
  return spec;
}

std::string money(Money m) { return std::to_string(m.micros); }

}  // namespace

std::vector<CampaignSpec> build_campaigns(const ScenarioConfig& cfg) {
  auto rng = SplitMix64::for_stream(cfg.seed, RngStream::kInventory);
  std::vector<CampaignSpec> out;
  AdId next_id = 1;
  if (!cfg.campaigns.empty()) {
    for (const auto& c : cfg.campaigns) {
      out.push_back(make_campaign(c.advertiser_id, c.bid, c.daily_budget,
                                  TopicVector(c.targeting),
                                  cfg.inventory.ads_per_campaign, next_id,
                                  rng));
    }
    return out;
  }
  const auto& inv = cfg.inventory;
  const std::size_t dim = cfg.topic_dim;
  AdvertiserId advertiser = 1;
  for (std::size_t topic = 0; topic < dim; ++topic) {
    for (int k = 0; k < inv.campaigns_per_topic; ++k) {
      std::vector<double> w(dim, 0.0);
      w[topic] = 1.0;
      const std::size_t other = (topic + 1 + rng.below(dim - 1)) % dim;
      w[other] = rng.uniform(0.0, 0.3);
      const int64_t span = (inv.bid_max_micros - inv.bid_min_micros) / 1000;
      const int64_t bid =
          inv.bid_min_micros +
          1000 * static_cast<int64_t>(rng.below(static_cast<uint64_t>(span) + 1));
      out.push_back(make_campaign(advertiser++, Money{bid},
                                  Money{inv.daily_budget_micros},
                                  TopicVector(std::move(w)),
                                  inv.ads_per_campaign, next_id, rng));
    }
  }
  return out;
}

ReferenceProfile reference_profile(const ScenarioConfig& cfg) {
  const std::vector<double> hours =
      cfg.reference_hours.value_or(
          std::vector<double>(cfg.diurnal.begin(), cfg.diurnal.end()));
  const std::vector<double> regions =
      cfg.reference_regions.value_or(cfg.benign_region_weights);
  return ReferenceProfile::from_weights(hours, regions);
}

Simulation simulate(const ScenarioConfig& cfg) {
  Simulation sim;
  sim.config = cfg;
  auto campaigns = build_campaigns(cfg);

  PopulationConfig pop;
  pop.topic_dim = cfg.topic_dim;
  pop.regions = cfg.regions;
  pop.benign_region_weights = cfg.benign_region_weights;
  pop.botnet_region_weights = cfg.botnet_region_weights;
  if (cfg.mix.count(AgentKind::kViewBot) > 0) {
    pop.view_bot_target =
        campaigns.at(static_cast<std::size_t>(cfg.view_bot_target))
            .ads.front()
            .targeting;
  }
  sim.population = build_population(cfg.mix, cfg.behavior, pop, cfg.seed);
  sim.broker = std::make_unique<Broker>(std::move(campaigns), cfg.injection,
                                        cfg.topic_dim, cfg.seed);
  TrafficOptions opts;
  opts.slots_per_page = cfg.slots_per_page;
  opts.horizon = cfg.horizon();
  opts.diurnal = cfg.diurnal;
  opts.seed = cfg.seed;
  sim.traffic = run_traffic(*sim.population, *sim.broker, opts);
  return sim;
}

Evaluation evaluate(const Simulation& sim, const DetectorConfig& detector) {
  Evaluation ev;
  const Broker& broker = *sim.broker;
  ev.reports = run_detection(
      sim.traffic.events,
      [&broker](AdId id) { return broker.find_ad(id); }, detector,
      reference_profile(sim.config));
  ev.confusion = confusion(ev.reports, sim.traffic.truth);
  for (AgentKind k : kAllAgentKinds) {
    ev.by_kind[static_cast<int>(k)] =
        cohort_confusion(ev.reports, sim.traffic.truth, k);
  }
  ev.precision = precision(ev.confusion);
  ev.recall = recall(ev.confusion);
  ev.f1 = f1(ev.confusion);
  try {
    ev.auc = roc_points(ev.reports, sim.traffic.truth).auc;
  } catch (const DomainError&) {
    ev.auc = std::numeric_limits<double>::quiet_NaN();
  }
  ev.economics = economics(sim.traffic.events, broker.ledger(), ev.reports,
                           sim.traffic.truth, broker.displacements());
  return ev;
}

std::vector<std::pair<std::string, std::string>> summary_rows(
    const Simulation& sim, const Evaluation& ev) {
  const EconomicSummary& e = ev.economics;
  const double fraud_share =
      e.total_spend.micros > 0
          ? static_cast<double>(e.fraud_spend.micros) /
                static_cast<double>(e.total_spend.micros)
          : 0.0;
  std::vector<std::pair<std::string, std::string>> rows = {
      {"precision", format_double(ev.precision)},
      {"recall", format_double(ev.recall)},
      {"f1", format_double(ev.f1)},
      {"auc", format_double(ev.auc)},
      {"total_spend", money(e.total_spend)},
      {"fraud_spend", money(e.fraud_spend)},
      {"fraud_spend_flagged", money(e.fraud_spend_flagged)},
      {"bluff_impression_share", format_double(e.bluff_impression_share)},
      {"bluff_slot_overhead", money(e.bluff_slot_overhead)},
      {"fraud_spend_share", format_double(fraud_share)},
      {"tp", std::to_string(ev.confusion.tp)},
      {"fp", std::to_string(ev.confusion.fp)},
      {"tn", std::to_string(ev.confusion.tn)},
      {"fn", std::to_string(ev.confusion.fn)},
      {"page_views", std::to_string(sim.traffic.page_views)},
      {"impressions", std::to_string(e.impressions)},
      {"bluff_impressions", std::to_string(e.bluff_impressions)},
      {"clicks", std::to_string(e.clicks)},
  };
  for (AgentKind k : kAllAgentKinds) {
    if (!is_fraudulent(k)) continue;
    const double r = sim.config.mix.count(k) == 0
                         ? std::numeric_limits<double>::quiet_NaN()
                         : recall(ev.by_kind[static_cast<int>(k)]);
    rows.emplace_back("recall_" + std::string(to_string(k)), format_double(r));
  }
  return rows;
}

void write_outputs(const std::filesystem::path& dir, const Simulation& sim,
                   const Evaluation& ev) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error(dir.string() + ": " + ec.message());
  write_file_atomic(dir / "events.jsonl", events_jsonl(sim.traffic.events));
  write_file_atomic(dir / "truth.csv", truth_csv(sim.traffic.truth));
  write_file_atomic(dir / "verdicts.csv", verdicts_csv(ev.reports));
  write_file_atomic(dir / "summary.csv", metric_csv(summary_rows(sim, ev)));
  write_file_atomic(dir / "config.json", to_json(sim.config).dump(2) + "\n");
}

std::vector<SweepRow> sweep(const ScenarioConfig& cfg,
                            const std::string& param,
                            const std::vector<double>& values) {
  // Validate every value before spending time on traffic.
  std::vector<ScenarioConfig> configs;
  configs.reserve(values.size());
  for (double v : values) configs.push_back(with_parameter(cfg, param, v));

  std::vector<SweepRow> rows;
  const bool detector_only = param.starts_with("detector.");
  std::unique_ptr<Simulation> shared;
  if (detector_only) shared = std::make_unique<Simulation>(simulate(cfg));
  for (std::size_t i = 0; i < values.size(); ++i) {
    SweepRow row;
    row.value = values[i];
    if (detector_only) {
      shared->config = configs[i];
      row.summary = summary_rows(*shared, evaluate(*shared, configs[i].detector));
    } else {
      const Simulation sim = simulate(configs[i]);
      row.summary = summary_rows(sim, evaluate(sim, configs[i].detector));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string sweep_csv(const std::string& param,
                      const std::vector<SweepRow>& rows) {
  std::string out = param;
  if (!rows.empty()) {
    for (const auto& [k, v] : rows.front().summary) out += "," + k;
  }
  out += "\n";
  for (const auto& row : rows) {
    out += format_double(row.value);
    for (const auto& [k, v] : row.summary) out += "," + v;
    out += "\n";
  }
  return out;
}

}  // namespace bluffsim
