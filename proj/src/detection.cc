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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace bluffsim {

void DetectorConfig::validate() const {
  if (!(p0 > 0.0 && p0 < 1.0)) throw ConfigError("detector.p0");
  if (!(pvalue_threshold > 0.0 && pvalue_threshold < 1.0)) {
    throw ConfigError("detector.pvalue_threshold");
  }
  if (min_clicks < 1) throw ConfigError("detector.min_clicks");
  if (window_ms <= 0) throw ConfigError("detector.window_ms");
  if (click_cap < 1) throw ConfigError("detector.click_cap");
  if (blacklist_ttl_ms <= 0) throw ConfigError("detector.blacklist_ttl_ms");
  if (!(divergence_threshold > 0.0)) {
    throw ConfigError("detector.divergence_threshold");
  }
  if (!(mismatch_eps >= 0.0 && mismatch_eps <= 1.0)) {
    throw ConfigError("detector.mismatch_eps");
  }
  if (!(w_bluff >= 0.0 && w_thresh >= 0.0 && w_profile >= 0.0) ||
      std::abs(w_bluff + w_thresh + w_profile - 1.0) > 1e-9) {
    throw ConfigError("detector.fusion_weights must be >= 0 and sum to 1");
  }
  if (!(fusion_threshold >= 0.0 && fusion_threshold <= 1.0)) {
    throw ConfigError("detector.fusion_threshold");
  }
}

namespace {

std::vector<double> normalized(std::span<const double> w, const char* name) {
  double sum = 0.0;
  for (double x : w) {
    if (!(x >= 0.0)) throw ConfigError(std::string(name) + ": negative weight");
    sum += x;
  }
  if (!(sum > 0.0)) throw ConfigError(std::string(name) + ": all zero");
  std::vector<double> out(w.begin(), w.end());
  for (auto& x : out) x /= sum;
  return out;
}

// Exact for n <= 50 in 64-bit integers.
double choose_small(int64_t n, int64_t k) {
  k = std::min(k, n - k);
  uint64_t c = 1;
  for (int64_t i = 0; i < k; ++i) {
    c = c * static_cast<uint64_t>(n - i) / static_cast<uint64_t>(i + 1);
  }
  return static_cast<double>(c);
}

}  // namespace

ReferenceProfile ReferenceProfile::from_weights(
    std::span<const double> hour_weights,
    std::span<const double> region_weights) {
  if (hour_weights.size() != 24) {
    throw ConfigError("reference hour profile needs 24 weights");
  }
  ReferenceProfile ref;
  const auto h = normalized(hour_weights, "reference hours");
  std::copy(h.begin(), h.end(), ref.hours.begin());
  ref.regions = normalized(region_weights, "reference regions");
  return ref;
}

double binom_tail_pvalue(int64_t k, int64_t n, double p0) {
  if (n < 0 || k < 0 || k > n) {
    throw DomainError("binom_tail_pvalue: need 0 <= k <= n");
  }
  if (!(p0 > 0.0 && p0 < 1.0)) {
    throw DomainError("binom_tail_pvalue: p0 must be in (0, 1)");
  }
  if (k == 0) return 1.0;

  if (n <= 50) {
    const double odds = p0 / (1.0 - p0);
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(n - k + 1));
    double term = choose_small(n, k) * std::pow(p0, static_cast<double>(k)) *
                  std::pow(1.0 - p0, static_cast<double>(n - k));
    terms.push_back(term);
    for (int64_t j = k; j < n; ++j) {
      term *= static_cast<double>(n - j) / static_cast<double>(j + 1) * odds;
      terms.push_back(term);
    }
    double sum = 0.0;
    for (auto it = terms.rbegin(); it != terms.rend(); ++it) sum += *it;
    return std::min(sum, 1.0);
  }

  const double log_p = std::log(p0);
  const double log_q = std::log1p(-p0);
  const double log_n_fact = std::lgamma(static_cast<double>(n) + 1.0);
  std::vector<double> logs;
  logs.reserve(static_cast<std::size_t>(n - k + 1));
  double peak = -INFINITY;
  for (int64_t j = k; j <= n; ++j) {
    const double lj = log_n_fact - std::lgamma(static_cast<double>(j) + 1.0) -
                      std::lgamma(static_cast<double>(n - j) + 1.0) +
                      static_cast<double>(j) * log_p +
                      static_cast<double>(n - j) * log_q;
    logs.push_back(lj);
    peak = std::max(peak, lj);
  }
  std::sort(logs.begin(), logs.end());
  double acc = 0.0;
  for (double lj : logs) acc += std::exp(lj - peak);
  return std::min(1.0, std::exp(peak + std::log(acc)));
}

double bluff_score_from_pvalue(double p, double tau) {
  if (p >= 1.0) return 0.0;
  if (p <= 0.0) return 1.0;
  return std::clamp(std::log(p) / std::log(tau), 0.0, 1.0);
}

BluffScore score_bluff(const AgentLedgerEntry& entry,
                       const DetectorConfig& cfg) {
  BluffScore out;
  if (entry.total_clicks == 0) return out;
  out.p_value = binom_tail_pvalue(static_cast<int64_t>(entry.decoy_clicks),
                                  static_cast<int64_t>(entry.total_clicks),
                                  cfg.p0);
  if (entry.total_clicks < static_cast<uint64_t>(cfg.min_clicks)) return out;
  out.score = bluff_score_from_pvalue(out.p_value, cfg.pvalue_threshold);
  return out;
}

bool classify_decoy_click(const AdUnit& ad, const TopicVector& observed_profile,
                          uint64_t supporting_clicks,
                          const DetectorConfig& cfg) {
  switch (ad.kind) {
    case AdKind::kReal:
      return false;
    case AdKind::kBluffA:
      return true;
    case AdKind::kBluffB:
      return supporting_clicks >= static_cast<uint64_t>(cfg.min_clicks) &&
             observed_profile.has_positive_weight() &&
             relevance(observed_profile, ad.content) < cfg.mismatch_eps;
  }
  return false;
}

double threshold_score(int max_window_clicks, int click_cap) {
  const double over = static_cast<double>(max_window_clicks - click_cap) /
                      static_cast<double>(click_cap);
  return std::clamp(over, 0.0, 1.0);
}

ThresholdResult threshold_scan(std::span<const Timestamp> clicks, Timestamp t,
                               const DetectorConfig& cfg) {
  ThresholdResult out;
  std::size_t lo = 0;
  for (std::size_t hi = 0; hi < clicks.size() && clicks[hi] <= t; ++hi) {
    while (clicks[lo].ms <= clicks[hi].ms - cfg.window_ms) ++lo;
    out.max_window_clicks =
        std::max(out.max_window_clicks, static_cast<int>(hi - lo + 1));
  }
  out.score = threshold_score(out.max_window_clicks, cfg.click_cap);
  return out;
}

int IpWindow::record(Timestamp t, int64_t window_ms) {
  if (!recent_.empty() && t < recent_.back()) {
    throw InputError("ip window: clicks out of order");
  }
  recent_.push_back(t);
  while (recent_.front().ms <= t.ms - window_ms) recent_.pop_front();
  const int count = static_cast<int>(recent_.size());
  max_count_ = std::max(max_count_, count);
  return count;
}

void Blacklist::add(Ipv4 ip, Timestamp t) {
  const Timestamp expiry{t.ms + ttl_ms_};
  auto [it, inserted] = expiry_.emplace(ip, expiry);
  if (!inserted && it->second < expiry) it->second = expiry;
}

bool Blacklist::check(Ipv4 ip, Timestamp t) const {
  const auto it = expiry_.find(ip);
  return it != expiry_.end() && it->second > t;
}

double jensen_shannon(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw DomainError("jensen_shannon: size mismatch");
  double js = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    if (p[i] > 0.0) js += 0.5 * p[i] * std::log2(p[i] / m);
    if (q[i] > 0.0) js += 0.5 * q[i] * std::log2(q[i] / m);
  }
  return std::clamp(js, 0.0, 1.0);
}

namespace {

std::vector<double> smoothed(std::span<const uint64_t> counts) {
  const double total =
      static_cast<double>(std::accumulate(counts.begin(), counts.end(),
                                          uint64_t{0})) +
      static_cast<double>(counts.size());
  std::vector<double> out(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    out[i] = (static_cast<double>(counts[i]) + 1.0) / total;
  }
  return out;
}

}  // namespace

ProfileScore profile_divergence(std::span<const uint64_t> hour_counts,
                                std::span<const uint64_t> region_counts,
                                const ReferenceProfile& ref,
                                const DetectorConfig& cfg) {
  if (hour_counts.size() != 24 || region_counts.size() != ref.regions.size()) {
    throw DomainError("profile_divergence: histogram size mismatch");
  }
  const uint64_t clicks =
      std::accumulate(hour_counts.begin(), hour_counts.end(), uint64_t{0});
  ProfileScore out;
  if (clicks == 0) return out;
  const double js_hours = jensen_shannon(smoothed(hour_counts), ref.hours);
  const double js_regions = jensen_shannon(smoothed(region_counts), ref.regions);
  out.divergence = 0.5 * (js_hours + js_regions);
  if (clicks >= static_cast<uint64_t>(cfg.min_clicks)) {
    out.score = std::min(1.0, out.divergence / (2.0 * cfg.divergence_threshold));
  }
  return out;
}

FusedScore fuse(double s_bluff, double s_thresh, double s_profile,
                const DetectorConfig& cfg, bool blacklisted) {
  FusedScore out;
  out.fused = cfg.w_bluff * s_bluff + cfg.w_thresh * s_thresh +
              cfg.w_profile * s_profile;
  out.flagged = blacklisted || out.fused >= cfg.fusion_threshold;
  return out;
}

namespace {

struct AgentState {
  AgentLedgerEntry ledger;
  std::vector<Ipv4> ips;
  bool blacklisted = false;
};

}  // namespace

std::map<AgentId, SuspicionReport> run_detection(std::span<const Event> events,
                                                 const AdLookup& ads,
                                                 const DetectorConfig& cfg,
                                                 const ReferenceProfile& ref) {
  cfg.validate();
  for (std::size_t i = 1; i < events.size(); ++i) {
    if (events[i].t < events[i - 1].t) {
      throw InputError("event stream not sorted by time at index " +
                       std::to_string(i));
    }
  }
  std::vector<Event> ordered(events.begin(), events.end());
  std::stable_sort(ordered.begin(), ordered.end(), event_order_less);
  if (auto bad = validate_event_stream(ordered); !bad.empty()) {
    throw InputError("invalid event stream: " + bad.front().message +
                     " at index " + std::to_string(bad.front().index));
  }

  const std::size_t regions = ref.regions.size();
  std::map<AgentId, AgentState> agents;
  std::unordered_map<Ipv4, IpWindow> windows;
  Blacklist blacklist(cfg.blacklist_ttl_ms);

  for (const Event& e : ordered) {
    auto [it, fresh] = agents.try_emplace(e.agent_id);
    AgentState& st = it->second;
    if (fresh) st.ledger.region_counts.assign(regions, 0);
    if (std::find(st.ips.begin(), st.ips.end(), e.ip) == st.ips.end()) {
      st.ips.push_back(e.ip);
    }
    if (e.etype != EventType::kClick) continue;

    const AdUnit* ad = ads(e.ad_id);
    if (ad == nullptr) {
      throw InputError("click on unknown ad " + std::to_string(e.ad_id));
    }
    AgentLedgerEntry& led = st.ledger;
    if (classify_decoy_click(*ad, led.observed_profile, led.profile_clicks,
                             cfg)) {
      ++led.decoy_clicks;
    }
    ++led.total_clicks;
    led.observed_profile.blend_toward(ad->content, ++led.profile_clicks);
    ++led.hour_counts[e.t.hour_of_day()];
    const auto region = std::min<std::size_t>(
        static_cast<std::size_t>(region_of(e.ip)), regions - 1);
    ++led.region_counts[region];

    if (windows[e.ip].record(e.t, cfg.window_ms) > cfg.click_cap) {
      blacklist.add(e.ip, e.t);
    }
    if (blacklist.check(e.ip, e.t)) st.blacklisted = true;
  }

  std::map<AgentId, SuspicionReport> reports;
  for (const auto& [id, st] : agents) {
    SuspicionReport r;
    r.agent_id = id;
    r.total_clicks = st.ledger.total_clicks;
    r.decoy_clicks = st.ledger.decoy_clicks;
    const auto bluff = score_bluff(st.ledger, cfg);
    r.s_bluff = bluff.score;
    r.p_value = bluff.p_value;
    for (Ipv4 ip : st.ips) {
      if (auto w = windows.find(ip); w != windows.end()) {
        r.max_window_clicks = std::max(r.max_window_clicks, w->second.max_count());
      }
    }
    r.s_thresh = threshold_score(r.max_window_clicks, cfg.click_cap);
    const auto profile = profile_divergence(
        st.ledger.hour_counts, st.ledger.region_counts, ref, cfg);
    r.s_profile = profile.score;
    r.divergence = profile.divergence;
    r.blacklisted = st.blacklisted;
    const auto f = fuse(r.s_bluff, r.s_thresh, r.s_profile, cfg, r.blacklisted);
    r.fused = f.fused;
    r.flagged = f.flagged;
    reports.emplace(id, r);
  }
  return reports;
}

}  // namespace bluffsim
