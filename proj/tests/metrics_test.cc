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

#include "bluffsim/metrics.h"

#include <gtest/gtest.h>

#include "bluffsim/rng.h"

namespace bluffsim {
namespace {

SuspicionReport report(AgentId id, bool flagged, double fused = 0.0) {
  SuspicionReport r;
  r.agent_id = id;
  r.flagged = flagged;
  r.fused = fused;
  return r;
}

TEST(ConfusionTest, Examples) {
  EXPECT_EQ(confusion({}, {}), Confusion{});

  ReportMap reports = {{0, report(0, true)}, {1, report(1, false)}};
  TruthMap truth = {{0, AgentKind::kRandomBot}, {1, AgentKind::kBenign}};
  EXPECT_EQ(confusion(reports, truth), (Confusion{1, 0, 1, 0}));

  reports.clear();
  truth.clear();
  for (AgentId i = 0; i < 10; ++i) {
    const bool bot = i < 3;
    truth[i] = bot ? AgentKind::kTrainedBot : AgentKind::kBenign;
    reports[i] = report(i, bot ? i < 2 : i == 3);
  }
  EXPECT_EQ(confusion(reports, truth), (Confusion{2, 1, 6, 1}));
  const Confusion trained =
      cohort_confusion(reports, truth, AgentKind::kTrainedBot);
  EXPECT_EQ(trained, (Confusion{2, 0, 0, 1}));

  reports[42] = report(42, true);
  EXPECT_THROW(confusion(reports, truth), InputError);
}

TEST(RatesTest, Examples) {
  const Confusion c{2, 1, 0, 1};
  EXPECT_DOUBLE_EQ(precision(c), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(recall(c), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(f1(c), 2.0 / 3.0);
  EXPECT_EQ(precision(Confusion{}), 1.0);
  EXPECT_EQ(recall(Confusion{}), 1.0);
  const Confusion perfect{5, 0, 7, 0};
  EXPECT_EQ(precision(perfect), 1.0);
  EXPECT_EQ(recall(perfect), 1.0);
  EXPECT_EQ(f1(perfect), 1.0);
  EXPECT_EQ(f1(Confusion{0, 3, 0, 3}), 0.0);
}

double concordance(const std::vector<std::pair<double, bool>>& s) {
  uint64_t twice = 0, pos = 0, neg = 0;
  for (const auto& [a, pa] : s) {
    pos += pa;
    neg += !pa;
    if (!pa) continue;
    for (const auto& [b, pb] : s) {
      if (pb) continue;
      twice += a > b ? 2 : (a == b ? 1 : 0);
    }
  }
  return static_cast<double>(twice) / (2.0 * pos * neg);
}

TEST(RocTest, Examples) {
  std::vector<std::pair<double, bool>> s = {{0.9, true}, {0.8, true}, {0.2, false}};
  EXPECT_EQ(roc_from_scores(s).auc, 1.0);
  s = {{0.5, true}, {0.5, false}, {0.5, true}};
  const auto flat = roc_from_scores(s);
  EXPECT_EQ(flat.auc, 0.5);
  EXPECT_EQ(flat.points.size(), 2u);
  s = {{0.9, true}, {0.7, true}, {0.8, false}, {0.1, false}};
  EXPECT_EQ(roc_from_scores(s).auc, 0.75);
  s = {{0.9, true}};
  EXPECT_THROW(roc_from_scores(s), DomainError);
}

TEST(RocTest, CurveEndsAtCorners) {
  ReportMap reports = {{0, report(0, true, 0.9)}, {1, report(1, false, 0.3)},
                       {2, report(2, false, 0.5)}};
  TruthMap truth = {{0, AgentKind::kRandomBot},
                    {1, AgentKind::kBenign},
                    {2, AgentKind::kBenign}};
  const auto roc = roc_points(reports, truth);
  EXPECT_EQ(roc.points.front().fpr, 0.0);
  EXPECT_EQ(roc.points.back().fpr, 1.0);
  EXPECT_EQ(roc.points.back().tpr, 1.0);
  EXPECT_EQ(roc.auc, 1.0);
}

TEST(RocTest, AucEqualsConcordance) {
  SplitMix64 rng(77);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(99));
    std::vector<std::pair<double, bool>> s(n);
    for (auto& [score, pos] : s) {
      score = static_cast<double>(rng.below(12)) / 11.0;
      pos = rng.bernoulli(0.3);
    }
    s[0].second = true;
    s[1].second = false;
    ASSERT_EQ(roc_from_scores(s).auc, concordance(s));
  }
}

TEST(EconomicsTest, SpendSplit) {
  BillingLedger ledger;
  ledger.append({{1}, 1, 1, Money{100}, 0});
  ledger.append({{2}, 1, 1, Money{30}, 1});
  ledger.append({{3}, 2, 2, Money{20}, 2});
  const TruthMap truth = {{0, AgentKind::kBenign},
                          {1, AgentKind::kRandomBot},
                          {2, AgentKind::kTrainedBot}};
  const ReportMap reports = {{0, report(0, false)}, {1, report(1, true)},
                             {2, report(2, false)}};
  std::vector<Event> events = {
      {{0}, EventType::kImpression, 0, 0, 1, 1, AdKind::kReal, 0},
      {{0}, EventType::kImpression, 0, 0, 1, 9, AdKind::kBluffA, 1},
      {{0}, EventType::kImpression, 0, 0, 1, 10, AdKind::kBluffB, 2},
      {{0}, EventType::kImpression, 0, 0, 1, 2, AdKind::kReal, 3},
      {{1}, EventType::kClick, 0, 0, 1, 1, AdKind::kReal, 0}};
  const std::vector<Displacement> displaced = {{{0}, 0, 5, Money{7}},
                                               {{0}, 0, 6, Money{8}}};
  const auto s = economics(events, ledger, reports, truth, displaced);
  EXPECT_EQ(s.total_spend.micros, 150);
  EXPECT_EQ(s.total_spend, ledger.total());
  EXPECT_EQ(s.fraud_spend.micros, 50);
  EXPECT_EQ(s.fraud_spend_flagged.micros, 30);
  EXPECT_EQ(s.impressions, 4u);
  EXPECT_EQ(s.bluff_impressions, 2u);
  EXPECT_EQ(s.clicks, 1u);
  EXPECT_EQ(s.bluff_impression_share, 0.5);
  EXPECT_EQ(s.bluff_slot_overhead.micros, 15);
}

TEST(EconomicsTest, NoFraudAgents) {
  BillingLedger ledger;
  ledger.append({{1}, 1, 1, Money{100}, 0});
  const TruthMap truth = {{0, AgentKind::kBenign}};
  const auto s = economics({}, ledger, {}, truth, {});
  EXPECT_EQ(s.fraud_spend.micros, 0);
  EXPECT_EQ(s.bluff_impression_share, 0.0);
  EXPECT_EQ(s.bluff_slot_overhead.micros, 0);
}

}  // namespace
}  // namespace bluffsim
