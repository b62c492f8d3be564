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

#ifndef BLUFFSIM_TRAFFIC_H_
#define BLUFFSIM_TRAFFIC_H_

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "bluffsim/broker.h"
#include "bluffsim/domain.h"
#include "bluffsim/rng.h"

namespace bluffsim {

struct BehaviorParams {
  double base_ctr = 0.05;          // benign click probability at relevance 1
  double accidental_rate = 0.002;  // benign click probability on noise
  double bot_click_rate = 0.3;
  double dictionary_skill = 0.9;   // chance a dictionary bot spots a BluffA
  double harvest_threshold = 0.5;
  double sessions_per_day = 3.0;
  int pages_per_session = 8;
  double page_gap_ms = 40'000.0;   // mean gap between page views
  int64_t click_delay_min_ms = 500;
  int64_t click_delay_max_ms = 5'000;

  void validate() const;
};

struct TrafficMix {
  std::array<int, 6> counts{};  // indexed by AgentKind
  int ip_sharing_factor = 3;    // agents per IP within a bot cohort

  int& count(AgentKind k) { return counts[static_cast<int>(k)]; }
  int count(AgentKind k) const { return counts[static_cast<int>(k)]; }
  int total() const;
  void validate() const;
};

// Relative session intensity per hour of day. Flat by default.
using DiurnalCurve = std::array<double, 24>;
DiurnalCurve flat_diurnal();

struct SessionPlan {
  AgentId agent_id = 0;
  std::vector<Timestamp> arrivals;  // page views, strictly increasing
};

struct PopulationConfig {
  std::size_t topic_dim = kDefaultTopicDim;
  int regions = 4;
  std::vector<double> benign_region_weights;  // size == regions
  std::vector<double> botnet_region_weights;  // size == regions
  std::optional<TopicVector> view_bot_target;  // persona for ViewBots
};

// Agents plus the BehaviorParams each one points at. Not copyable because
// agents hold pointers into `behavior`.
class Population {
 public:
  Population(std::array<BehaviorParams, 6> behavior, std::vector<Agent> agents);
  Population(const Population&) = delete;
  Population& operator=(const Population&) = delete;

  std::span<const Agent> agents() const { return agents_; }
  const Agent& agent(AgentId id) const { return agents_.at(id); }
  const BehaviorParams& behavior(AgentKind k) const {
    return behavior_[static_cast<int>(k)];
  }

 private:
  std::array<BehaviorParams, 6> behavior_;
  std::vector<Agent> agents_;
};

// Builds the agent population from the population stream of `seed`.
// Agent ids are assigned cohort by cohort in AgentKind order.
std::unique_ptr<Population> build_population(
    const TrafficMix& mix, const std::array<BehaviorParams, 6>& behavior,
    const PopulationConfig& cfg, uint64_t seed);

// Interest profile: two or three strong topics over faint background noise.
TopicVector draw_persona(std::size_t dim, SplitMix64& rng);
// Single dominant topic over faint background noise.
TopicVector draw_specialized_persona(std::size_t dim, SplitMix64& rng);

// alpha + (base_ctr - alpha) * r.
double benign_click_prob(double r, const BehaviorParams& b);

// Slot indices the agent clicks on this slate. `agent.profile` is the
// persona in effect for this page view.
std::vector<int> decide_clicks(const Agent& agent,
                               std::span<const AdUnit* const> served,
                               SplitMix64& rng);

// Benign, TrainedBot and DictionaryBot sessions follow the diurnal curve;
// the other cohorts arrive uniformly over the horizon. Sorted by first
// arrival. Throws DomainError for an empty population.
std::vector<SessionPlan> plan_sessions(std::span<const Agent> agents,
                                       const DiurnalCurve& diurnal,
                                       Timestamp horizon, uint64_t seed);

// Session start times for one agent, before pages are laid out.
std::vector<Timestamp> session_starts(const BehaviorParams& b,
                                      const DiurnalCurve& curve,
                                      Timestamp horizon, SplitMix64& rng);

struct TrafficOptions {
  int slots_per_page = 4;
  Timestamp horizon{7 * kMsPerDay};
  DiurnalCurve diurnal = flat_diurnal();
  uint64_t seed = 0;
};

struct TrafficRun {
  std::vector<Event> events;                // sorted by the documented order
  std::map<AgentId, AgentKind> truth;       // side channel, never in events
  uint64_t page_views = 0;
};

// Serve -> decide -> record loop in timestamp order. Clicks land a random
// delay after their impression and are billed when they land.
TrafficRun run_traffic(const Population& population, Broker& broker,
                       const TrafficOptions& opts);

}  // namespace bluffsim

#endif  // BLUFFSIM_TRAFFIC_H_
