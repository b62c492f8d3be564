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

#include "bluffsim/traffic.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <string>
#include <tuple>
#include <unordered_map>

namespace bluffsim {

namespace {

bool in_unit(double p) { return p >= 0.0 && p <= 1.0; }

std::size_t draw_categorical(std::span<const double> weights,
                             SplitMix64& rng) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double u = rng.uniform() * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (u < weights[i]) return i;
    u -= weights[i];
  }
  // Rounding fallthrough: last positive weight.
  for (std::size_t i = weights.size(); i-- > 0;) {
    if (weights[i] > 0.0) return i;
  }
  return 0;
}

void check_region_weights(const std::vector<double>& w, int regions,
                          const char* name) {
  if (static_cast<int>(w.size()) != regions) {
    throw ConfigError(std::string(name) + ": expected one weight per region");
  }
  double sum = 0.0;
  for (double x : w) {
    if (!(x >= 0.0)) throw ConfigError(std::string(name) + ": negative weight");
    sum += x;
  }
  if (!(sum > 0.0)) throw ConfigError(std::string(name) + ": all zero");
}

bool follows_diurnal(AgentKind k) {
  return k == AgentKind::kBenign || k == AgentKind::kTrainedBot ||
         k == AgentKind::kDictionaryBot;
}

}  // namespace

void BehaviorParams::validate() const {
  if (!in_unit(base_ctr)) throw ConfigError("behavior.base_ctr");
  if (!in_unit(accidental_rate)) throw ConfigError("behavior.accidental_rate");
  if (!(accidental_rate < base_ctr)) {
    throw ConfigError("behavior.accidental_rate must be below base_ctr");
  }
  if (!in_unit(bot_click_rate)) throw ConfigError("behavior.bot_click_rate");
  if (!in_unit(dictionary_skill)) {
    throw ConfigError("behavior.dictionary_skill");
  }
  if (!in_unit(harvest_threshold)) {
    throw ConfigError("behavior.harvest_threshold");
  }
  if (!(sessions_per_day > 0.0)) throw ConfigError("behavior.sessions_per_day");
  if (pages_per_session < 1) throw ConfigError("behavior.pages_per_session");
  if (!(page_gap_ms > 0.0)) throw ConfigError("behavior.page_gap_ms");
  if (click_delay_min_ms < 0 || click_delay_max_ms < click_delay_min_ms) {
    throw ConfigError("behavior.click_delay_ms");
  }
}

int TrafficMix::total() const {
  return std::accumulate(counts.begin(), counts.end(), 0);
}

void TrafficMix::validate() const {
  for (int c : counts) {
    if (c < 0) throw ConfigError("mix: negative cohort size");
  }
  if (total() <= 0) throw ConfigError("mix: empty population");
  if (ip_sharing_factor < 1) throw ConfigError("mix.ip_sharing_factor");
}

DiurnalCurve flat_diurnal() {
  DiurnalCurve c;
  c.fill(1.0);
  return c;
}

Population::Population(std::array<BehaviorParams, 6> behavior,
                       std::vector<Agent> agents)
    : behavior_(behavior), agents_(std::move(agents)) {
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    if (agents_[i].agent_id != i) {
      throw ConfigError("agent ids must be dense and ordered");
    }
    agents_[i].behavior = &behavior_[static_cast<int>(agents_[i].kind)];
  }
}

TopicVector draw_persona(std::size_t dim, SplitMix64& rng) {
  std::vector<double> w(dim);
  for (auto& x : w) x = rng.uniform(0.0, 0.02);
  const int interests = 2 + static_cast<int>(rng.below(2));
  for (int i = 0; i < interests; ++i) {
    w[rng.below(dim)] = rng.uniform(0.5, 1.0);
  }
  return TopicVector(std::move(w));
}

TopicVector draw_specialized_persona(std::size_t dim, SplitMix64& rng) {
  std::vector<double> w(dim);
  for (auto& x : w) x = rng.uniform(0.0, 0.02);
  w[rng.below(dim)] = 1.0;
  return TopicVector(std::move(w));
}

std::unique_ptr<Population> build_population(
    const TrafficMix& mix, const std::array<BehaviorParams, 6>& behavior,
    const PopulationConfig& cfg, uint64_t seed) {
  mix.validate();
  for (const auto& b : behavior) b.validate();
  if (cfg.regions < 1 || cfg.regions > 200) throw ConfigError("regions");
  check_region_weights(cfg.benign_region_weights, cfg.regions,
                       "benign_region_weights");
  check_region_weights(cfg.botnet_region_weights, cfg.regions,
                       "botnet_region_weights");

  auto rng = SplitMix64::for_stream(seed, RngStream::kPopulation);
  std::vector<uint32_t> next_host(cfg.regions, 1);
  std::vector<Agent> agents;
  agents.reserve(mix.total());

  for (AgentKind kind : kAllAgentKinds) {
    const int n = mix.count(kind);
    const bool benign = kind == AgentKind::kBenign;
    const auto& region_weights = follows_diurnal(kind)
                                     ? cfg.benign_region_weights
                                     : cfg.botnet_region_weights;
    const int group = benign ? 1 : mix.ip_sharing_factor;
    int region = 0;
    Ipv4 ip = 0;
    for (int i = 0; i < n; ++i) {
      if (i % group == 0) {
        region = static_cast<int>(draw_categorical(region_weights, rng));
        ip = make_ip(region, next_host[region]++);
      }
      Agent a;
      a.agent_id = static_cast<AgentId>(agents.size());
      a.kind = kind;
      a.region = region;
      a.ip = ip;
      a.profile = (kind == AgentKind::kViewBot && cfg.view_bot_target)
                      ? *cfg.view_bot_target
                      : draw_persona(cfg.topic_dim, rng);
      agents.push_back(std::move(a));
    }
  }
  return std::make_unique<Population>(behavior, std::move(agents));
}

double benign_click_prob(double r, const BehaviorParams& b) {
  if (!(r >= 0.0 && r <= 1.0)) throw DomainError("relevance outside [0,1]");
  return b.accidental_rate + (b.base_ctr - b.accidental_rate) * r;
}

std::vector<int> decide_clicks(const Agent& agent,
                               std::span<const AdUnit* const> served,
                               SplitMix64& rng) {
  if (agent.behavior == nullptr) {
    throw DomainError("decide_clicks: agent without behavior params");
  }
  const BehaviorParams& b = *agent.behavior;
  std::vector<int> clicked;
  for (std::size_t slot = 0; slot < served.size(); ++slot) {
    const AdUnit& ad = *served[slot];
    double p = 0.0;
    switch (agent.kind) {
      case AgentKind::kBenign:
        p = benign_click_prob(relevance(agent.profile, ad.content), b);
        break;
      case AgentKind::kRandomBot:
      case AgentKind::kTrainedBot:
        p = b.bot_click_rate;
        break;
      case AgentKind::kDictionaryBot:
        p = b.bot_click_rate;
        if (ad.kind == AdKind::kBluffA && rng.bernoulli(b.dictionary_skill)) {
          p = b.accidental_rate;
        }
        break;
      case AgentKind::kProfileHarvester:
        p = relevance(agent.profile, ad.content) >= b.harvest_threshold
                ? b.bot_click_rate
                : 0.0;
        break;
      case AgentKind::kViewBot:
        continue;
      default:
        throw DomainError("decide_clicks: unknown agent kind");
    }
    if (rng.bernoulli(p)) clicked.push_back(static_cast<int>(slot));
  }
  return clicked;
}

std::vector<Timestamp> session_starts(const BehaviorParams& b,
                                      const DiurnalCurve& curve,
                                      Timestamp horizon, SplitMix64& rng) {
  std::vector<Timestamp> out;
  if (horizon.ms <= 0) return out;
  const double mean_w =
      std::accumulate(curve.begin(), curve.end(), 0.0) / 24.0;
  const double max_w = *std::max_element(curve.begin(), curve.end());
  if (!(mean_w > 0.0)) throw ConfigError("diurnal curve is all zero");
  // Thinning: candidate rate at the curve's peak, accept by hourly weight.
  const double peak_rate_per_ms =
      b.sessions_per_day * (max_w / mean_w) / static_cast<double>(kMsPerDay);
  double t = 0.0;
  while (true) {
    t += rng.exponential(1.0 / peak_rate_per_ms);
    if (t >= static_cast<double>(horizon.ms)) break;
    const Timestamp ts{static_cast<int64_t>(t)};
    if (rng.uniform() * max_w < curve[ts.hour_of_day()]) out.push_back(ts);
  }
  return out;
}

std::vector<SessionPlan> plan_sessions(std::span<const Agent> agents,
                                       const DiurnalCurve& diurnal,
                                       Timestamp horizon, uint64_t seed) {
  if (agents.empty()) throw DomainError("plan_sessions: empty population");
  for (double w : diurnal) {
    if (!(w >= 0.0)) throw ConfigError("diurnal weights must be >= 0");
  }
  const DiurnalCurve flat = flat_diurnal();
  std::vector<SessionPlan> plans;
  for (const Agent& a : agents) {
    if (a.behavior == nullptr) throw DomainError("agent without behavior");
    const BehaviorParams& b = *a.behavior;
    auto rng = SplitMix64::for_stream(seed, RngStream::kTraffic,
                                      2 * static_cast<uint64_t>(a.agent_id));
    const auto& curve = follows_diurnal(a.kind) ? diurnal : flat;
    for (Timestamp start : session_starts(b, curve, horizon, rng)) {
      SessionPlan plan{a.agent_id, {start}};
      Timestamp t = start;
      for (int p = 1; p < b.pages_per_session; ++p) {
        t.ms += std::max<int64_t>(1, std::llround(rng.exponential(b.page_gap_ms)));
        if (t >= horizon) break;
        plan.arrivals.push_back(t);
      }
      plans.push_back(std::move(plan));
    }
  }
  std::stable_sort(plans.begin(), plans.end(),
                   [](const SessionPlan& x, const SessionPlan& y) {
                     return std::tie(x.arrivals.front(), x.agent_id) <
                            std::tie(y.arrivals.front(), y.agent_id);
                   });
  return plans;
}

namespace {

struct PageView {
  Timestamp t;
  AgentId agent = 0;
  std::size_t plan = 0;
};

struct PendingClick {
  Timestamp t;
  AgentId agent = 0;
  AdId ad_id = 0;
  PageId page = 0;
  int slot = 0;
  AdKind kind = AdKind::kReal;

  auto key() const { return std::tie(t, agent, ad_id, page, slot); }
};

struct LaterClick {
  bool operator()(const PendingClick& a, const PendingClick& b) const {
    return a.key() > b.key();
  }
};

}  // namespace

TrafficRun run_traffic(const Population& population, Broker& broker,
                       const TrafficOptions& opts) {
  TrafficRun run;
  const auto agents = population.agents();
  for (const Agent& a : agents) run.truth.emplace(a.agent_id, a.kind);
  if (agents.empty() || opts.horizon.ms <= 0) return run;
  if (opts.slots_per_page < 1) throw ConfigError("slots_per_page");

  const auto plans =
      plan_sessions(agents, opts.diurnal, opts.horizon, opts.seed);
  std::vector<PageView> pages;
  for (std::size_t i = 0; i < plans.size(); ++i) {
    for (Timestamp t : plans[i].arrivals) {
      pages.push_back({t, plans[i].agent_id, i});
    }
  }
  std::sort(pages.begin(), pages.end(), [](const PageView& x, const PageView& y) {
    return std::tie(x.t, x.agent, x.plan) < std::tie(y.t, y.agent, y.plan);
  });

  std::vector<SplitMix64> click_rng, inject_rng;
  click_rng.reserve(agents.size());
  inject_rng.reserve(agents.size());
  for (const Agent& a : agents) {
    click_rng.push_back(SplitMix64::for_stream(
        opts.seed, RngStream::kTraffic, 2 * static_cast<uint64_t>(a.agent_id) + 1));
    inject_rng.push_back(
        SplitMix64::for_stream(opts.seed, RngStream::kInjection, a.agent_id));
  }
  std::unordered_map<std::size_t, TopicVector> session_persona;

  std::priority_queue<PendingClick, std::vector<PendingClick>, LaterClick>
      pending;
  auto& events = run.events;
  PageId next_page = 1;
  std::size_t next_view = 0;

  while (next_view < pages.size() || !pending.empty()) {
    const bool take_click =
        !pending.empty() &&
        (next_view == pages.size() ||
         std::tie(pending.top().t, pending.top().agent) <
             std::tie(pages[next_view].t, pages[next_view].agent));
    if (take_click) {
      const PendingClick c = pending.top();
      pending.pop();
      broker.record_click(c.ad_id, c.t, c.agent);
      events.push_back({c.t, EventType::kClick, c.agent,
                        agents[c.agent].ip, c.page, c.ad_id, c.kind, c.slot});
      continue;
    }

    const PageView& view = pages[next_view++];
    const Agent& agent = agents[view.agent];
    Agent acting = agent;
    if (agent.kind == AgentKind::kProfileHarvester) {
      // A fresh fake persona for every harvesting session.
      auto it = session_persona.find(view.plan);
      if (it == session_persona.end()) {
        it = session_persona
                 .emplace(view.plan,
                          draw_specialized_persona(agent.profile.dim(),
                                                   click_rng[agent.agent_id]))
                 .first;
      }
      acting.profile = it->second;
    }
    const PageId page = next_page++;
    ++run.page_views;
    const auto slate =
        broker.serve_page(agent.agent_id, acting.profile, opts.slots_per_page,
                          view.t, inject_rng[agent.agent_id]);
    for (std::size_t s = 0; s < slate.size(); ++s) {
      events.push_back({view.t, EventType::kImpression, agent.agent_id,
                        agent.ip, page, slate[s]->ad_id, slate[s]->kind,
                        static_cast<int>(s)});
    }
    const BehaviorParams& b = *agent.behavior;
    auto& rng = click_rng[agent.agent_id];
    for (int s : decide_clicks(acting, slate, rng)) {
      const auto span = static_cast<uint64_t>(b.click_delay_max_ms -
                                              b.click_delay_min_ms + 1);
      const Timestamp at{view.t.ms + b.click_delay_min_ms +
                         static_cast<int64_t>(rng.below(span))};
      pending.push({at, agent.agent_id, slate[s]->ad_id, page, s,
                    slate[s]->kind});
    }
  }
  std::sort(events.begin(), events.end(), event_order_less);
  return run;
}

}  // namespace bluffsim
