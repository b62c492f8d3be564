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

#include "bluffsim/broker.h"

#include <algorithm>
#include <cmath>
#include <string>

namespace bluffsim {

void InjectionConfig::validate() const {
  if (!(rho >= 0.0 && rho <= 1.0)) throw ConfigError("injection.rho");
  if (!(type_b_share >= 0.0 && type_b_share <= 1.0)) {
    throw ConfigError("injection.type_b_share");
  }
  if (bluff_pool_size < 1) throw ConfigError("injection.bluff_pool_size");
  if (!(bluff_epsilon > 0.0 && bluff_epsilon <= 1.0)) {
    throw ConfigError("injection.bluff_epsilon");
  }
}

Money BillingLedger::total() const {
  Money sum;
  for (const auto& e : entries_) sum += e.amount;
  return sum;
}

double ad_score(const TopicVector& profile, const RankCandidate& c) {
  return static_cast<double>(c.ad->bid.micros) * c.quality *
         relevance(profile, c.ad->targeting);
}

namespace {

bool ranks_before(const RankedAd& a, const RankedAd& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.ad->ad_id < b.ad->ad_id;
}

std::vector<RankedAd> score_all(const TopicVector& profile,
                                std::span<const RankCandidate> inventory) {
  std::vector<RankedAd> scored;
  scored.reserve(inventory.size());
  for (const auto& c : inventory) scored.push_back({c.ad, ad_score(profile, c)});
  return scored;
}

}  // namespace

std::vector<RankedAd> rank_ads(const TopicVector& profile,
                               std::span<const RankCandidate> inventory,
                               int slots) {
  if (slots < 1) throw DomainError("rank_ads: slots must be >= 1");
  auto scored = score_all(profile, inventory);
  const auto keep = std::min<std::size_t>(scored.size(), slots);
  std::partial_sort(scored.begin(), scored.begin() + keep, scored.end(),
                    ranks_before);
  scored.resize(keep);
  return scored;
}

std::vector<TopicVector> make_bluff_pool(std::size_t dim, int size,
                                         SplitMix64& rng) {
  std::vector<TopicVector> pool;
  pool.reserve(size);
  for (int i = 0; i < size; ++i) {
    std::vector<double> w(dim, 0.0);
    const auto main = rng.below(dim);
    w[main] = rng.uniform(0.7, 1.0);
    if (rng.bernoulli(0.5)) {
      w[rng.below(dim)] += rng.uniform(0.0, 0.3);
    }
    pool.emplace_back(std::move(w));
  }
  return pool;
}

AdUnit make_bluff_a(const TopicVector& profile,
                    std::span<const TopicVector> pool, double bluff_epsilon,
                    int max_draws, SplitMix64& rng) {
  if (!profile.has_positive_weight()) {
    throw DomainError("make_bluff_a: empty profile");
  }
  AdUnit ad;
  ad.kind = AdKind::kBluffA;
  ad.targeting = profile;
  for (int i = 0; i < max_draws && !pool.empty(); ++i) {
    const auto& candidate = pool[rng.below(pool.size())];
    if (relevance(profile, candidate) < bluff_epsilon) {
      ad.content = candidate;
      return ad;
    }
  }
  ad.content = TopicVector::basis(profile.dim(), profile.argmin());
  if (relevance(profile, ad.content) >= bluff_epsilon) {
    throw ConfigError(
        "cannot build an irrelevant bluff ad for a profile this dense; "
        "lower topic overlap or raise injection.bluff_epsilon");
  }
  return ad;
}

AdUnit make_bluff_b(std::size_t dim, SplitMix64& rng) {
  AdUnit ad;
  ad.kind = AdKind::kBluffB;
  ad.targeting = TopicVector::uniform(dim);
  const auto main = rng.below(dim);
  const double share = rng.uniform(0.9, 1.0);
  std::vector<double> rest(dim, 0.0);
  double rest_sum = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    if (i == main) continue;
    rest[i] = rng.uniform();
    rest_sum += rest[i];
  }
  std::vector<double> w(dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) {
    w[i] = i == main ? share
                     : (rest_sum > 0.0 ? (1.0 - share) * rest[i] / rest_sum
                                       : 0.0);
  }
  ad.content = TopicVector(std::move(w));
  return ad;
}

Broker::Broker(std::vector<CampaignSpec> campaigns, InjectionConfig injection,
               std::size_t topic_dim, uint64_t seed)
    : injection_(injection), topic_dim_(topic_dim) {
  injection_.validate();
  auto pool_rng = SplitMix64::for_stream(seed, RngStream::kBluffPool);
  bluff_pool_ = make_bluff_pool(topic_dim_, injection_.bluff_pool_size,
                                pool_rng);
  AdId max_id = 0;
  for (auto& spec : campaigns) {
    if (spec.daily_budget.micros < 0) {
      throw ConfigError("campaign daily_budget must be non-negative");
    }
    Campaign c;
    c.advertiser_id = spec.advertiser_id;
    c.daily_budget = spec.daily_budget;
    for (auto& ad : spec.ads) {
      if (ad.kind != AdKind::kReal || ad.advertiser_id != spec.advertiser_id) {
        throw ConfigError("campaign ads must be real ads of the advertiser");
      }
      if (auto err = check_ad_invariants(ad, injection_.bluff_epsilon);
          !err.empty()) {
        throw ConfigError("ad " + std::to_string(ad.ad_id) + ": " + err);
      }
      if (ad.targeting.dim() != topic_dim_ || ad.content.dim() != topic_dim_) {
        throw ConfigError("ad topic dimension mismatch");
      }
      if (ads_.contains(ad.ad_id)) {
        throw ConfigError("duplicate ad id " + std::to_string(ad.ad_id));
      }
      max_id = std::max(max_id, ad.ad_id);
      c.ads.push_back(ad.ad_id);
      real_.emplace(ad.ad_id, RealAd{campaigns_.size(), {}});
      real_order_.push_back(ad.ad_id);
      ads_.emplace(ad.ad_id, std::move(ad));
    }
    campaigns_.push_back(std::move(c));
  }
  std::sort(real_order_.begin(), real_order_.end());
  rank_sum_.assign(campaigns_.size(), 0);
  rank_count_.assign(campaigns_.size(), 0);
  next_bluff_id_ = max_id + 1;
}

void Broker::roll_day(Campaign& c, Timestamp t) {
  if (t.day() != c.day) {
    c.day = t.day();
    c.spent_today = Money{0};
  }
}

std::vector<RankedAd> Broker::rank_ads(const TopicVector& profile, int slots,
                                       Timestamp t) {
  if (slots < 1) throw DomainError("rank_ads: slots must be >= 1");
  for (auto& c : campaigns_) roll_day(c, t);
  std::vector<RankCandidate> eligible;
  eligible.reserve(real_order_.size());
  for (AdId id : real_order_) {
    const auto& state = real_.at(id);
    if (campaigns_[state.campaign].exhausted()) continue;
    eligible.push_back({&ads_.at(id), state.quality.value()});
  }
  auto scored = score_all(profile, eligible);
  std::sort(scored.begin(), scored.end(), ranks_before);

  std::vector<bool> seen(campaigns_.size(), false);
  for (std::size_t pos = 0; pos < scored.size(); ++pos) {
    const auto campaign = real_.at(scored[pos].ad->ad_id).campaign;
    if (seen[campaign]) continue;
    seen[campaign] = true;
    rank_sum_[campaign] += pos + 1;
    ++rank_count_[campaign];
  }
  scored.resize(std::min<std::size_t>(scored.size(), slots));
  return scored;
}

AdId Broker::register_bluff(AdUnit ad, Timestamp t) {
  ad.ad_id = next_bluff_id_++;
  ad.created_at = t;
  const AdId id = ad.ad_id;
  ads_.emplace(id, std::move(ad));
  return id;
}

std::vector<const AdUnit*> Broker::serve_page(AgentId agent,
                                              const TopicVector& profile,
                                              int slots, Timestamp t,
                                              SplitMix64& rng) {
  const auto ranked = rank_ads(profile, slots, t);
  std::vector<const AdUnit*> slate;
  slate.reserve(ranked.size());
  for (const auto& r : ranked) {
    if (!rng.bernoulli(injection_.rho)) {
      slate.push_back(r.ad);
      continue;
    }
    AdUnit bluff = rng.bernoulli(injection_.type_b_share)
                       ? make_bluff_b(topic_dim_, rng)
                       : make_bluff_a(profile, bluff_pool_,
                                      injection_.bluff_epsilon,
                                      injection_.bluff_pool_size, rng);
    displacements_.push_back(
        {t, agent, r.ad->ad_id, Money{std::llround(r.score)}});
    slate.push_back(&ads_.at(register_bluff(std::move(bluff), t)));
  }
  for (const AdUnit* ad : slate) {
    if (ad->kind == AdKind::kReal) {
      ++real_.at(ad->ad_id).quality.impressions;
    } else {
      ++bluff_impressions_;
    }
  }
  return slate;
}

Money Broker::record_click(AdId ad_id, Timestamp t, AgentId agent) {
  const auto it = ads_.find(ad_id);
  if (it == ads_.end()) {
    throw IntegrityError("click on unknown ad " + std::to_string(ad_id));
  }
  const AdUnit& ad = it->second;
  if (ad.kind != AdKind::kReal) {
    ++bluff_clicks_;
    return Money{0};
  }
  auto& state = real_.at(ad_id);
  if (state.quality.clicks >= state.quality.impressions) {
    throw IntegrityError("click without impression on ad " +
                         std::to_string(ad_id));
  }
  ++state.quality.clicks;
  Campaign& c = campaigns_[state.campaign];
  roll_day(c, t);
  const Money charge = min(ad.bid, c.remaining());
  if (charge.micros > 0) {
    c.spent_today += charge;
    ledger_.append({t, c.advertiser_id, ad_id, charge, agent});
  }
  if (c.spent_today > c.daily_budget) {
    throw IntegrityError("campaign spend exceeds daily budget");
  }
  return charge;
}

const AdUnit& Broker::ad(AdId id) const {
  const auto* a = find_ad(id);
  if (a == nullptr) throw IntegrityError("unknown ad " + std::to_string(id));
  return *a;
}

const AdUnit* Broker::find_ad(AdId id) const {
  const auto it = ads_.find(id);
  return it == ads_.end() ? nullptr : &it->second;
}

QualityScore Broker::quality(AdId id) const {
  const auto it = real_.find(id);
  return it == real_.end() ? QualityScore{} : it->second.quality;
}

QualityScore Broker::campaign_quality(std::size_t campaign_index) const {
  QualityScore total;
  for (AdId id : campaigns_.at(campaign_index).ads) {
    const auto q = real_.at(id).quality;
    total.impressions += q.impressions;
    total.clicks += q.clicks;
  }
  return total;
}

double Broker::mean_rank(std::size_t campaign_index) const {
  const auto n = rank_count_.at(campaign_index);
  return n == 0 ? 0.0
                : static_cast<double>(rank_sum_[campaign_index]) /
                      static_cast<double>(n);
}

}  // namespace bluffsim
