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

#ifndef BLUFFSIM_METRICS_H_
#define BLUFFSIM_METRICS_H_

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "bluffsim/broker.h"
#include "bluffsim/detection.h"
#include "bluffsim/domain.h"

namespace bluffsim {

using TruthMap = std::map<AgentId, AgentKind>;
using ReportMap = std::map<AgentId, SuspicionReport>;

// Agent-level; positive means any kind other than Benign.
struct Confusion {
  uint64_t tp = 0, fp = 0, tn = 0, fn = 0;

  Confusion& operator+=(const Confusion& o) {
    tp += o.tp;
    fp += o.fp;
    tn += o.tn;
    fn += o.fn;
    return *this;
  }
  friend bool operator==(const Confusion&, const Confusion&) = default;
};

// Throws InputError if a reported agent has no truth label.
Confusion confusion(const ReportMap& reports, const TruthMap& truth);

// Restricted to agents whose true kind is `kind` (only tp/fn or tn/fp fill).
Confusion cohort_confusion(const ReportMap& reports, const TruthMap& truth,
                           AgentKind kind);

// Empty denominators count as 1 (vacuous).
double precision(const Confusion& c);
double recall(const Confusion& c);
double f1(const Confusion& c);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;  // from (0,0) to (1,1)
  double auc = 0.0;
};

// Sweeps the threshold down through the distinct fused scores; tied scores
// form a single step. Throws DomainError unless both classes are present.
RocCurve roc_points(const ReportMap& reports, const TruthMap& truth);

// Same sweep over raw (score, is_positive) pairs.
RocCurve roc_from_scores(std::span<const std::pair<double, bool>> scored);

struct EconomicSummary {
  Money total_spend;
  Money fraud_spend;          // charges for clicks by non-benign agents
  Money fraud_spend_flagged;  // the part attributable to flagged agents
  double bluff_impression_share = 0.0;
  Money bluff_slot_overhead;  // ranking value of real ads displaced by bluffs
  uint64_t impressions = 0;
  uint64_t bluff_impressions = 0;
  uint64_t clicks = 0;
};

EconomicSummary economics(std::span<const Event> events,
                          const BillingLedger& ledger,
                          const ReportMap& reports, const TruthMap& truth,
                          std::span<const Displacement> displaced);

}  // namespace bluffsim

#endif  // BLUFFSIM_METRICS_H_
