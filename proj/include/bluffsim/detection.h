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

#ifndef BLUFFSIM_DETECTION_H_
#define BLUFFSIM_DETECTION_H_

#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <span>
#include <unordered_map>
#include <vector>

#include "bluffsim/domain.h"

namespace bluffsim {

struct DetectorConfig {
  double p0 = 0.02;                  // benign decoy-click probability
  double pvalue_threshold = 1e-4;    // tau_b; s_bluff reaches 1 here
  int min_clicks = 5;
  int64_t window_ms = 60'000;
  int click_cap = 10;                // K; flagged when a window holds > K
  int64_t blacklist_ttl_ms = 7 * kMsPerDay;
  double divergence_threshold = 0.05;
  double mismatch_eps = 0.2;         // BluffB mismatch cut-off
  double w_bluff = 0.6;
  double w_thresh = 0.25;
  double w_profile = 0.15;
  double fusion_threshold = 0.5;

  void validate() const;
};

// Hour-of-day and region click distributions of known-benign traffic.
struct ReferenceProfile {
  std::array<double, 24> hours{};
  std::vector<double> regions;

  // Normalizes non-negative weights. Throws ConfigError on all-zero input.
  static ReferenceProfile from_weights(std::span<const double> hour_weights,
                                       std::span<const double> region_weights);
};

// P(X >= k) for X ~ Binomial(n, p0). Direct pmf summation, smallest terms
// first; log-space accumulation above n = 50.
double binom_tail_pvalue(int64_t k, int64_t n, double p0);

// Log-linear ramp: 0 at p = 1, 1 at p <= tau.
double bluff_score_from_pvalue(double p, double tau);

// Per-agent click evidence.
struct AgentLedgerEntry {
  uint64_t total_clicks = 0;
  uint64_t decoy_clicks = 0;
  TopicVector observed_profile;  // running mean of clicked ad contents
  uint64_t profile_clicks = 0;   // clicks folded into observed_profile
  std::array<uint64_t, 24> hour_counts{};
  std::vector<uint64_t> region_counts;
};

struct BluffScore {
  double score = 0.0;
  double p_value = 1.0;
};

BluffScore score_bluff(const AgentLedgerEntry& entry, const DetectorConfig& cfg);

// BluffA clicks always count. BluffB clicks count when the ad's content is
// unrelated to a click history of at least min_clicks clicks.
bool classify_decoy_click(const AdUnit& ad, const TopicVector& observed_profile,
                          uint64_t supporting_clicks, const DetectorConfig& cfg);

struct ThresholdResult {
  double score = 0.0;
  int max_window_clicks = 0;
};

// Max click count over windows (end - W, end] with end <= t. Input sorted.
ThresholdResult threshold_scan(std::span<const Timestamp> clicks, Timestamp t,
                               const DetectorConfig& cfg);
double threshold_score(int max_window_clicks, int click_cap);

// Streaming per-IP window: keeps clicks inside the last W and the running
// maximum, so it agrees with threshold_scan over the full history.
class IpWindow {
 public:
  // Returns the number of clicks in (t - W, t] after adding this one.
  int record(Timestamp t, int64_t window_ms);
  int max_count() const { return max_count_; }
  std::size_t size() const { return recent_.size(); }

 private:
  std::deque<Timestamp> recent_;
  int max_count_ = 0;
};

class Blacklist {
 public:
  explicit Blacklist(int64_t ttl_ms) : ttl_ms_(ttl_ms) {}

  // Expiry becomes t + ttl; re-adding never shortens an entry.
  void add(Ipv4 ip, Timestamp t);
  // True iff expiry > t.
  bool check(Ipv4 ip, Timestamp t) const;
  std::size_t size() const { return expiry_.size(); }

 private:
  int64_t ttl_ms_;
  std::unordered_map<Ipv4, Timestamp> expiry_;
};

// Jensen-Shannon divergence with base-2 logs, in [0, 1].
double jensen_shannon(std::span<const double> p, std::span<const double> q);

struct ProfileScore {
  double score = 0.0;
  double divergence = 0.0;
};

// Add-one smoothed hour and region histograms against the reference;
// divergence is the mean of the two JSDs.
ProfileScore profile_divergence(std::span<const uint64_t> hour_counts,
                                std::span<const uint64_t> region_counts,
                                const ReferenceProfile& ref,
                                const DetectorConfig& cfg);

struct FusedScore {
  double fused = 0.0;
  bool flagged = false;
};

FusedScore fuse(double s_bluff, double s_thresh, double s_profile,
                const DetectorConfig& cfg, bool blacklisted = false);

struct SuspicionReport {
  AgentId agent_id = 0;
  double s_bluff = 0.0;
  double s_thresh = 0.0;
  double s_profile = 0.0;
  double fused = 0.0;
  bool flagged = false;
  bool blacklisted = false;  // forced flag from the IP blacklist
  // Evidence.
  double p_value = 1.0;
  int max_window_clicks = 0;
  double divergence = 0.0;
  uint64_t total_clicks = 0;
  uint64_t decoy_clicks = 0;
};

// The broker's own catalog: it knows every ad it served, decoys included.
using AdLookup = std::function<const AdUnit*(AdId)>;

// One pass over the stream in tie order, then a scoring pass. Every agent
// with at least one event gets a report. Throws InputError if the stream is
// invalid or references an unknown ad.
std::map<AgentId, SuspicionReport> run_detection(std::span<const Event> events,
                                                 const AdLookup& ads,
                                                 const DetectorConfig& cfg,
                                                 const ReferenceProfile& ref);

}  // namespace bluffsim

#endif  // BLUFFSIM_DETECTION_H_
