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

#include "bluffsim/detection.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "bluffsim/rng.h"

namespace bluffsim {
namespace {

// Direct pmf summation with Pascal-triangle coefficients in long double.
long double tail_oracle(int k, int n, long double p) {
  std::vector<std::vector<long double>> c(n + 1);
  for (int i = 0; i <= n; ++i) {
    c[i].assign(i + 1, 1.0L);
    for (int j = 1; j < i; ++j) c[i][j] = c[i - 1][j - 1] + c[i - 1][j];
  }
  long double sum = 0.0L;
  for (int j = k; j <= n; ++j) {
    sum += c[n][j] * std::pow(p, j) * std::pow(1.0L - p, n - j);
  }
  return sum;
}

TEST(BinomTailTest, Examples) {
  for (int n : {0, 1, 10, 50, 500}) EXPECT_EQ(binom_tail_pvalue(0, n, 0.3), 1.0);
  EXPECT_NEAR(binom_tail_pvalue(3, 3, 0.5), 0.125, 1e-15);
  EXPECT_NEAR(binom_tail_pvalue(2, 10, 0.05), 0.08614, 5e-6);
  EXPECT_NEAR(binom_tail_pvalue(2, 10, 0.05),
              static_cast<double>(tail_oracle(2, 10, 0.05L)), 1e-15);
  EXPECT_THROW(binom_tail_pvalue(4, 3, 0.5), DomainError);
  EXPECT_THROW(binom_tail_pvalue(1, 3, 0.0), DomainError);
}

TEST(BinomTailTest, MatchesOracleOnSmallN) {
  SplitMix64 rng(12);
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(50));
    const int k = static_cast<int>(rng.below(n + 1));
    const double p = rng.uniform(0.001, 0.999);
    ASSERT_NEAR(binom_tail_pvalue(k, n, p),
                static_cast<double>(tail_oracle(k, n, p)), 1e-12)
        << k << " " << n << " " << p;
  }
}

TEST(BinomTailTest, LargeNMatchesOracle) {
  for (int n : {51, 100, 400}) {
    for (int k : {1, 3, 10, 30}) {
      const double got = binom_tail_pvalue(k, n, 0.012);
      const double want = static_cast<double>(tail_oracle(k, n, 0.012L));
      EXPECT_NEAR(got / want, 1.0, 1e-9) << k << " " << n;
    }
  }
}

TEST(BinomTailTest, Monotonicity) {
  SplitMix64 rng(13);
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(300));
    const int k = 1 + static_cast<int>(rng.below(n));
    const double p = rng.uniform(0.001, 0.5);
    const double q = p + rng.uniform(0.0, 0.4);
    const double base = binom_tail_pvalue(k, n, p);
    if (k < n) EXPECT_LE(binom_tail_pvalue(k + 1, n, p), base * (1 + 1e-12));
    EXPECT_GE(binom_tail_pvalue(k, n, q), base * (1 - 1e-12));
  }
}

TEST(BluffScoreTest, Ramp) {
  const double tau = 1e-4;
  EXPECT_EQ(bluff_score_from_pvalue(1.0, tau), 0.0);
  EXPECT_EQ(bluff_score_from_pvalue(tau, tau), 1.0);
  EXPECT_EQ(bluff_score_from_pvalue(1e-9, tau), 1.0);
  EXPECT_NEAR(bluff_score_from_pvalue(std::sqrt(tau), tau), 0.5, 1e-15);
}

TEST(BluffScoreTest, ScoreGates) {
  DetectorConfig cfg;
  AgentLedgerEntry e;
  e.total_clicks = 100;
  e.decoy_clicks = 0;
  EXPECT_EQ(score_bluff(e, cfg).score, 0.0);
  EXPECT_EQ(score_bluff(e, cfg).p_value, 1.0);
  e.total_clicks = 4;
  e.decoy_clicks = 4;  // strong evidence, too few clicks
  EXPECT_EQ(score_bluff(e, cfg).score, 0.0);
  e.total_clicks = 5;
  e.decoy_clicks = 5;
  EXPECT_EQ(score_bluff(e, cfg).score, 1.0);
}

TEST(ClassifyDecoyTest, Examples) {
  DetectorConfig cfg;
  const TopicVector observed = TopicVector::basis(16, 0);
  AdUnit ad{1, std::nullopt, AdKind::kBluffA, observed,
            TopicVector::basis(16, 1), Money{0}, {}};
  EXPECT_TRUE(classify_decoy_click(ad, observed, 0, cfg));
  ad.kind = AdKind::kReal;
  ad.advertiser_id = 1;
  EXPECT_FALSE(classify_decoy_click(ad, observed, 50, cfg));

  AdUnit b{2, std::nullopt, AdKind::kBluffB, TopicVector::uniform(16),
           TopicVector::basis(16, 1), Money{0}, {}};
  std::vector<double> w(16, 0.0);
  w[0] = 0.6;
  w[1] = 0.8;
  EXPECT_NEAR(relevance(TopicVector(w), b.content), 0.8, 1e-15);
  EXPECT_FALSE(classify_decoy_click(b, TopicVector(w), 50, cfg));
  EXPECT_TRUE(classify_decoy_click(b, observed, 50, cfg));
  // Too little history to call it a mismatch.
  EXPECT_FALSE(classify_decoy_click(b, observed, 4, cfg));
}

std::vector<Timestamp> at_seconds(std::initializer_list<int64_t> s) {
  std::vector<Timestamp> out;
  for (int64_t x : s) out.push_back({x * 1000});
  return out;
}

TEST(ThresholdTest, Examples) {
  DetectorConfig cfg;
  std::vector<Timestamp> burst;
  for (int i = 0; i < 11; ++i) burst.push_back({i * 1000});
  auto r = threshold_scan(burst, Timestamp{1'000'000}, cfg);
  EXPECT_EQ(r.max_window_clicks, 11);
  EXPECT_NEAR(r.score, 0.1, 1e-15);
  burst.pop_back();
  EXPECT_EQ(threshold_scan(burst, Timestamp{1'000'000}, cfg).score, 0.0);

  cfg.click_cap = 2;
  const auto clicks = at_seconds({0, 30, 59, 61, 90});
  r = threshold_scan(clicks, Timestamp{100'000}, cfg);
  EXPECT_EQ(r.max_window_clicks, 3);
  EXPECT_DOUBLE_EQ(r.score, 0.5);
}

TEST(ThresholdTest, WindowIsHalfOpen) {
  DetectorConfig cfg;
  const auto clicks = at_seconds({0, 60});
  EXPECT_EQ(threshold_scan(clicks, Timestamp{60'000}, cfg).max_window_clicks, 1);
  const auto close = at_seconds({0, 59});
  EXPECT_EQ(threshold_scan(close, Timestamp{60'000}, cfg).max_window_clicks, 2);
  EXPECT_EQ(threshold_scan(close, Timestamp{30'000}, cfg).max_window_clicks, 1);
}

int brute_force_max(const std::vector<Timestamp>& c, int64_t w) {
  int best = 0;
  for (const Timestamp& end : c) {
    int n = 0;
    for (const Timestamp& x : c) n += x.ms > end.ms - w && x.ms <= end.ms;
    best = std::max(best, n);
  }
  return best;
}

TEST(ThresholdTest, ScanAndStreamingWindowMatchBruteForce) {
  DetectorConfig cfg;
  SplitMix64 rng(21);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<Timestamp> clicks(rng.below(201));
    for (auto& c : clicks) c.ms = static_cast<int64_t>(rng.below(600'000));
    std::sort(clicks.begin(), clicks.end());
    const int want = brute_force_max(clicks, cfg.window_ms);
    ASSERT_EQ(threshold_scan(clicks, Timestamp{INT64_MAX}, cfg).max_window_clicks,
              want);
    IpWindow window;
    for (const auto& c : clicks) window.record(c, cfg.window_ms);
    ASSERT_EQ(window.max_count(), want);
  }
}

TEST(BlacklistTest, Examples) {
  const int64_t ttl = 7 * kMsPerDay;
  Blacklist bl(ttl);
  const Ipv4 ip = make_ip(1, 5);
  EXPECT_FALSE(bl.check(ip, Timestamp{0}));
  const Timestamp t{1000};
  bl.add(ip, t);
  EXPECT_TRUE(bl.check(ip, Timestamp{t.ms + ttl - 1}));
  EXPECT_FALSE(bl.check(ip, Timestamp{t.ms + ttl}));
  bl.add(ip, Timestamp{t.ms + kMsPerDay});
  EXPECT_TRUE(bl.check(ip, Timestamp{t.ms + ttl + 12 * kMsPerHour}));
  // Re-adding earlier never shortens the entry.
  bl.add(ip, t);
  EXPECT_TRUE(bl.check(ip, Timestamp{t.ms + ttl + 12 * kMsPerHour}));
  EXPECT_FALSE(bl.check(make_ip(1, 6), t));
}

TEST(ProfileTest, JensenShannonBounds) {
  const std::vector<double> p = {0.5, 0.5, 0.0}, q = {0.0, 0.0, 1.0};
  EXPECT_DOUBLE_EQ(jensen_shannon(p, p), 0.0);
  EXPECT_DOUBLE_EQ(jensen_shannon(p, q), 1.0);
  EXPECT_DOUBLE_EQ(jensen_shannon(p, q), jensen_shannon(q, p));
}

TEST(ProfileTest, Examples) {
  DetectorConfig cfg;
  const std::vector<double> flat_h(24, 1.0), flat_r(4, 1.0);
  const auto ref = ReferenceProfile::from_weights(flat_h, flat_r);

  std::array<uint64_t, 24> hours{};
  for (int i = 0; i < 96; ++i) ++hours[i % 24];
  const std::vector<uint64_t> regions = {25, 25, 25, 25};
  auto s = profile_divergence(hours, regions, ref, cfg);
  EXPECT_LT(s.divergence, 1e-3);

  // Identical to the (smoothed) reference shape: zero.
  EXPECT_NEAR(profile_divergence(hours, std::vector<uint64_t>{24, 24, 24, 24}, ref, cfg).divergence,
              0.0, 1e-15);

  std::vector<double> office(24, 0.0);
  for (int h = 9; h < 17; ++h) office[h] = 1.0;
  const auto office_ref = ReferenceProfile::from_weights(office, flat_r);
  std::array<uint64_t, 24> night{};
  night[3] = 1000;
  std::vector<double> raw(24, 0.0);
  raw[3] = 1.0;
  EXPECT_DOUBLE_EQ(jensen_shannon(raw, office_ref.hours), 1.0);
  std::vector<double> sm(24);
  for (int h = 0; h < 24; ++h) sm[h] = (night[h] + 1.0) / 1024.0;
  const double js = jensen_shannon(sm, office_ref.hours);
  EXPECT_LT(js, 1.0);
  EXPECT_GT(js, 0.9);
  s = profile_divergence(night, std::vector<uint64_t>{250, 250, 250, 250}, office_ref, cfg);
  EXPECT_EQ(s.score, 1.0);
}

TEST(FuseTest, Examples) {
  DetectorConfig cfg;
  auto f = fuse(0, 0, 0, cfg);
  EXPECT_EQ(f.fused, 0.0);
  EXPECT_FALSE(f.flagged);
  f = fuse(1, 0, 0, cfg);
  EXPECT_DOUBLE_EQ(f.fused, 0.6);
  EXPECT_TRUE(f.flagged);
  f = fuse(0.5, 0.4, 0.0, cfg);
  EXPECT_NEAR(f.fused, 0.40, 1e-15);
  EXPECT_FALSE(f.flagged);
  EXPECT_TRUE(fuse(0, 0, 0, cfg, true).flagged);
}

// Minimal catalog for hand-built streams.
struct Catalog {
  std::map<AdId, AdUnit> ads;
  AdLookup lookup() const {
    return [this](AdId id) -> const AdUnit* {
      auto it = ads.find(id);
      return it == ads.end() ? nullptr : &it->second;
    };
  }
};

ReferenceProfile flat_reference() {
  const std::vector<double> h(24, 1.0), r = {1.0, 0.0, 0.0, 0.0};
  return ReferenceProfile::from_weights(h, r);
}

void add_pair(std::vector<Event>& ev, int64_t t, AgentId agent, AdId ad,
              AdKind kind, Ipv4 ip, PageId page) {
  ev.push_back({{t}, EventType::kImpression, agent, ip, page, ad, kind, 0});
  ev.push_back({{t + 1}, EventType::kClick, agent, ip, page, ad, kind, 0});
}

TEST(RunDetectionTest, EmptyStream) {
  Catalog cat;
  EXPECT_TRUE(run_detection({}, cat.lookup(), {}, flat_reference()).empty());
}

TEST(RunDetectionTest, OnProfileBenignIsNotFlagged) {
  Catalog cat;
  cat.ads[1] = {1, 1, AdKind::kReal, TopicVector::basis(16, 0),
                TopicVector::basis(16, 0), Money{10}, {}};
  std::vector<Event> ev;
  for (int i = 0; i < 100; ++i) {
    add_pair(ev, (i % 24) * kMsPerHour + (i / 24) * kMsPerDay, 0, 1,
             AdKind::kReal, make_ip(0, 1), i + 1);
  }
  std::sort(ev.begin(), ev.end(), event_order_less);
  const auto reports = run_detection(ev, cat.lookup(), {}, flat_reference());
  ASSERT_EQ(reports.size(), 1u);
  const auto& r = reports.at(0);
  EXPECT_EQ(r.total_clicks, 100u);
  EXPECT_EQ(r.decoy_clicks, 0u);
  EXPECT_EQ(r.s_bluff, 0.0);
  EXPECT_EQ(r.s_thresh, 0.0);
  EXPECT_LT(r.s_profile, 0.1);
  EXPECT_FALSE(r.flagged);
}

TEST(RunDetectionTest, DecoyClickerAndBurstIp) {
  Catalog cat;
  cat.ads[1] = {1, 1, AdKind::kReal, TopicVector::basis(16, 0),
                TopicVector::basis(16, 0), Money{10}, {}};
  cat.ads[2] = {2, std::nullopt, AdKind::kBluffA, TopicVector::basis(16, 0),
                TopicVector::basis(16, 5), Money{0}, {}};
  std::vector<Event> ev;
  PageId page = 1;
  // Agent 0: half its 40 clicks on decoys, spread over hours.
  for (int i = 0; i < 40; ++i) {
    add_pair(ev, i * kMsPerHour, 0, i % 2 ? 2 : 1,
             i % 2 ? AdKind::kBluffA : AdKind::kReal, make_ip(0, 1), page++);
  }
  // Agent 1: 20 real clicks within 20 s from one address.
  for (int i = 0; i < 20; ++i) {
    add_pair(ev, 1000 * i, 1, 1, AdKind::kReal, make_ip(0, 2), page++);
  }
  std::sort(ev.begin(), ev.end(), event_order_less);
  const auto reports = run_detection(ev, cat.lookup(), {}, flat_reference());
  EXPECT_EQ(reports.at(0).decoy_clicks, 20u);
  EXPECT_EQ(reports.at(0).s_bluff, 1.0);
  EXPECT_TRUE(reports.at(0).flagged);
  EXPECT_FALSE(reports.at(0).blacklisted);
  EXPECT_EQ(reports.at(1).max_window_clicks, 20);
  EXPECT_EQ(reports.at(1).s_thresh, 1.0);
  EXPECT_TRUE(reports.at(1).blacklisted);
  EXPECT_TRUE(reports.at(1).flagged);
}

TEST(RunDetectionTest, PermutationStableWithinTimestamp) {
  Catalog cat;
  for (AdId id = 1; id <= 4; ++id) {
    cat.ads[id] = {id, std::nullopt, AdKind::kBluffB, TopicVector::uniform(16),
                   TopicVector::basis(16, id), Money{0}, {}};
  }
  std::vector<Event> ev;
  SplitMix64 rng(8);
  PageId page = 1;
  for (int t = 0; t < 200; ++t) {
    for (AgentId a = 0; a < 3; ++a) {
      const AdId ad = 1 + rng.below(4);
      ev.push_back({{t * 10}, EventType::kImpression, a, make_ip(0, a), page,
                    ad, AdKind::kBluffB, 0});
      ev.push_back({{t * 10}, EventType::kClick, a, make_ip(0, a), page, ad,
                    AdKind::kBluffB, 0});
      ++page;
    }
  }
  const auto want = run_detection(ev, cat.lookup(), {}, flat_reference());
  std::mt19937 shuffle(3);
  for (int round = 0; round < 5; ++round) {
    // Shuffle within each timestamp only.
    for (std::size_t lo = 0; lo < ev.size();) {
      std::size_t hi = lo;
      while (hi < ev.size() && ev[hi].t == ev[lo].t) ++hi;
      std::shuffle(ev.begin() + lo, ev.begin() + hi, shuffle);
      lo = hi;
    }
    const auto got = run_detection(ev, cat.lookup(), {}, flat_reference());
    ASSERT_EQ(got.size(), want.size());
    for (const auto& [id, r] : want) {
      EXPECT_EQ(got.at(id).decoy_clicks, r.decoy_clicks);
      EXPECT_EQ(got.at(id).fused, r.fused);
      EXPECT_EQ(got.at(id).flagged, r.flagged);
    }
  }
}

TEST(RunDetectionTest, RejectsBadStreams) {
  Catalog cat;
  std::vector<Event> ev = {
      {{5}, EventType::kClick, 0, make_ip(0, 1), 1, 1, AdKind::kReal, 0}};
  EXPECT_THROW(run_detection(ev, cat.lookup(), {}, flat_reference()), InputError);
  ev.insert(ev.begin(),
            {{1}, EventType::kImpression, 0, make_ip(0, 1), 1, 1, AdKind::kReal, 0});
  EXPECT_THROW(run_detection(ev, cat.lookup(), {}, flat_reference()), InputError);
}

TEST(DetectorConfigTest, Validation) {
  DetectorConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.w_bluff = 0.7;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.min_clicks = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

}  // namespace
}  // namespace bluffsim
