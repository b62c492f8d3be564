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

#ifndef BLUFFSIM_BROKER_H_
#define BLUFFSIM_BROKER_H_

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "bluffsim/domain.h"
#include "bluffsim/rng.h"

namespace bluffsim {

// Laplace-smoothed click-through estimate.
struct QualityScore {
  uint64_t impressions = 0;
  uint64_t clicks = 0;

  double value() const {
    return (static_cast<double>(clicks) + 1.0) /
           (static_cast<double>(impressions) + 2.0);
  }
};

struct InjectionConfig {
  double rho = 0.10;          // per-slot bluff probability
  double type_b_share = 0.5;  // share of bluff slots that are BluffB
  int bluff_pool_size = 64;
  double bluff_epsilon = kDefaultBluffEpsilon;

  void validate() const;
};

// An advertiser's campaign as handed to the broker. Every ad must be Real and
// carry this campaign's advertiser id.
struct CampaignSpec {
  AdvertiserId advertiser_id = 0;
  Money daily_budget;
  std::vector<AdUnit> ads;
};

struct Campaign {
  AdvertiserId advertiser_id = 0;
  std::vector<AdId> ads;
  Money daily_budget;
  Money spent_today;
  int64_t day = 0;

  Money remaining() const { return daily_budget - spent_today; }
  bool exhausted() const { return spent_today >= daily_budget; }
};

struct LedgerEntry {
  Timestamp t;
  AdvertiserId advertiser_id = 0;
  AdId ad_id = 0;
  Money amount;
  AgentId agent_id = 0;
};

// Append-only record of per-click charges. Only Real ads ever appear here.
class BillingLedger {
 public:
  void append(const LedgerEntry& e) { entries_.push_back(e); }
  std::span<const LedgerEntry> entries() const { return entries_; }
  Money total() const;

 private:
  std::vector<LedgerEntry> entries_;
};

// A real ad that lost its slot to a bluff ad, valued at its ranking score.
struct Displacement {
  Timestamp t;
  AgentId agent_id = 0;
  AdId ad_id = 0;
  Money value;
};

struct RankCandidate {
  const AdUnit* ad = nullptr;
  double quality = 0.5;
};

struct RankedAd {
  const AdUnit* ad = nullptr;
  double score = 0.0;
};

// bid_micros * quality * relevance(profile, targeting).
double ad_score(const TopicVector& profile, const RankCandidate& c);

// Top `slots` candidates by score, ties by ascending ad_id. The caller passes
// only budget-eligible ads.
std::vector<RankedAd> rank_ads(const TopicVector& profile,
                               std::span<const RankCandidate> inventory,
                               int slots);

// Sparse "specialized" content vectors that bluff ads draw from.
std::vector<TopicVector> make_bluff_pool(std::size_t dim, int size,
                                         SplitMix64& rng);

// BluffA: targeted at `profile`, content irrelevant to it. Falls back to the
// basis vector of the profile's weakest topic; throws ConfigError if even
// that is within epsilon.
AdUnit make_bluff_a(const TopicVector& profile,
                    std::span<const TopicVector> pool, double bluff_epsilon,
                    int max_draws, SplitMix64& rng);

// BluffB: untargeted, content dominated (>= 90% of mass) by one random topic.
AdUnit make_bluff_b(std::size_t dim, SplitMix64& rng);

class Broker {
 public:
  Broker(std::vector<CampaignSpec> campaigns, InjectionConfig injection,
         std::size_t topic_dim, uint64_t seed);

  Broker(const Broker&) = delete;
  Broker& operator=(const Broker&) = delete;

  // Quality-weighted auction over campaigns with budget left at `t`.
  std::vector<RankedAd> rank_ads(const TopicVector& profile, int slots,
                                 Timestamp t);

  // Ranks, then replaces each slot by a bluff ad with probability rho.
  // Real ads left on the slate get one impression each.
  std::vector<const AdUnit*> serve_page(AgentId agent,
                                        const TopicVector& profile, int slots,
                                        Timestamp t, SplitMix64& rng);

  // Charges min(bid, remaining budget) for Real ads, nothing for bluff ads.
  // Throws IntegrityError for an ad id the broker never issued.
  Money record_click(AdId ad_id, Timestamp t, AgentId agent);

  const AdUnit& ad(AdId id) const;
  const AdUnit* find_ad(AdId id) const;
  QualityScore quality(AdId id) const;
  // Pooled over all ads of the campaign.
  QualityScore campaign_quality(std::size_t campaign_index) const;
  // Mean 1-based position of the campaign's best ad in the full ranking,
  // over every request where the campaign was eligible. 0 if never ranked.
  double mean_rank(std::size_t campaign_index) const;

  std::span<const Campaign> campaigns() const { return campaigns_; }
  const BillingLedger& ledger() const { return ledger_; }
  std::span<const Displacement> displacements() const {
    return displacements_;
  }
  uint64_t bluff_clicks() const { return bluff_clicks_; }
  uint64_t bluff_impressions() const { return bluff_impressions_; }
  const InjectionConfig& injection() const { return injection_; }

 private:
  struct RealAd {
    std::size_t campaign = 0;
    QualityScore quality;
  };

  void roll_day(Campaign& c, Timestamp t);
  AdId register_bluff(AdUnit ad, Timestamp t);

  InjectionConfig injection_;
  std::size_t topic_dim_;
  std::vector<TopicVector> bluff_pool_;
  std::vector<Campaign> campaigns_;
  std::unordered_map<AdId, AdUnit> ads_;
  std::unordered_map<AdId, RealAd> real_;
  std::vector<AdId> real_order_;
  std::vector<uint64_t> rank_sum_;
  std::vector<uint64_t> rank_count_;
  BillingLedger ledger_;
  std::vector<Displacement> displacements_;
  AdId next_bluff_id_ = 0;
  uint64_t bluff_clicks_ = 0;
  uint64_t bluff_impressions_ = 0;
};

}  // namespace bluffsim

#endif  // BLUFFSIM_BROKER_H_
