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

#include <algorithm>
#include <string>

namespace bluffsim {

namespace {

AgentKind truth_of(const TruthMap& truth, AgentId id) {
  const auto it = truth.find(id);
  if (it == truth.end()) {
    throw InputError("no truth label for agent " + std::to_string(id));
  }
  return it->second;
}

void tally(Confusion& c, bool flagged, bool positive) {
  if (positive) {
    ++(flagged ? c.tp : c.fn);
  } else {
    ++(flagged ? c.fp : c.tn);
  }
}

}  // namespace

Confusion confusion(const ReportMap& reports, const TruthMap& truth) {
  Confusion c;
  for (const auto& [id, r] : reports) {
    tally(c, r.flagged, is_fraudulent(truth_of(truth, id)));
  }
  return c;
}

Confusion cohort_confusion(const ReportMap& reports, const TruthMap& truth,
                           AgentKind kind) {
  Confusion c;
  for (const auto& [id, r] : reports) {
    if (truth_of(truth, id) == kind) tally(c, r.flagged, is_fraudulent(kind));
  }
  return c;
}

double precision(const Confusion& c) {
  const auto d = c.tp + c.fp;
  return d == 0 ? 1.0 : static_cast<double>(c.tp) / static_cast<double>(d);
}

double recall(const Confusion& c) {
  const auto d = c.tp + c.fn;
  return d == 0 ? 1.0 : static_cast<double>(c.tp) / static_cast<double>(d);
}

double f1(const Confusion& c) {
  const double p = precision(c);
  const double r = recall(c);
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

RocCurve roc_from_scores(std::span<const std::pair<double, bool>> scored) {
  std::vector<std::pair<double, bool>> sorted(scored.begin(), scored.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  uint64_t pos = 0, neg = 0;
  for (const auto& [s, p] : sorted) ++(p ? pos : neg);
  if (pos == 0 || neg == 0) {
    throw DomainError("roc: need at least one positive and one negative");
  }

  RocCurve roc;
  roc.points.push_back({0.0, 0.0});
  // Twice the area in units of 1/(pos*neg), kept exact in integers.
  uint64_t twice_area = 0;
  uint64_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < sorted.size();) {
    const double score = sorted[i].first;
    uint64_t dtp = 0, dfp = 0;
    for (; i < sorted.size() && sorted[i].first == score; ++i) {
      ++(sorted[i].second ? dtp : dfp);
    }
    twice_area += dfp * (2 * tp + dtp);
    tp += dtp;
    fp += dfp;
    roc.points.push_back({static_cast<double>(fp) / static_cast<double>(neg),
                          static_cast<double>(tp) / static_cast<double>(pos)});
  }
  roc.auc = static_cast<double>(twice_area) /
            (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
  return roc;
}

RocCurve roc_points(const ReportMap& reports, const TruthMap& truth) {
  std::vector<std::pair<double, bool>> scored;
  scored.reserve(reports.size());
  for (const auto& [id, r] : reports) {
    scored.emplace_back(r.fused, is_fraudulent(truth_of(truth, id)));
  }
  return roc_from_scores(scored);
}

EconomicSummary economics(std::span<const Event> events,
                          const BillingLedger& ledger,
                          const ReportMap& reports, const TruthMap& truth,
                          std::span<const Displacement> displaced) {
  EconomicSummary s;
  for (const auto& e : ledger.entries()) {
    s.total_spend += e.amount;
    if (!is_fraudulent(truth_of(truth, e.agent_id))) continue;
    s.fraud_spend += e.amount;
    const auto r = reports.find(e.agent_id);
    if (r != reports.end() && r->second.flagged) {
      s.fraud_spend_flagged += e.amount;
    }
  }
  for (const Event& e : events) {
    if (e.etype == EventType::kClick) {
      ++s.clicks;
      continue;
    }
    ++s.impressions;
    if (is_bluff(e.ad_kind)) ++s.bluff_impressions;
  }
  s.bluff_impression_share =
      s.impressions == 0 ? 0.0
                         : static_cast<double>(s.bluff_impressions) /
                               static_cast<double>(s.impressions);
  for (const auto& d : displaced) s.bluff_slot_overhead += d.value;
  return s;
}

}  // namespace bluffsim
