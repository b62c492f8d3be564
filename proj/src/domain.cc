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

#include "bluffsim/domain.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <set>
#include <tuple>

namespace bluffsim {

TopicVector::TopicVector(std::vector<double> weights)
    : weights_(std::move(weights)) {
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw DomainError("topic weights must be finite and non-negative");
    }
  }
}

TopicVector TopicVector::zeros(std::size_t dim) {
  return TopicVector(std::vector<double>(dim, 0.0));
}

TopicVector TopicVector::basis(std::size_t dim, std::size_t index) {
  if (index >= dim) throw DomainError("basis index out of range");
  std::vector<double> w(dim, 0.0);
  w[index] = 1.0;
  return TopicVector(std::move(w));
}

TopicVector TopicVector::uniform(std::size_t dim) {
  if (dim == 0) throw DomainError("topic dimension must be positive");
  return TopicVector(std::vector<double>(dim, 1.0 / static_cast<double>(dim)));
}

double TopicVector::norm() const {
  double s = 0.0;
  for (double w : weights_) s += w * w;
  return std::sqrt(s);
}

double TopicVector::sum() const {
  return std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

bool TopicVector::has_positive_weight() const {
  return std::any_of(weights_.begin(), weights_.end(),
                     [](double w) { return w > 0.0; });
}

std::size_t TopicVector::argmax() const {
  return static_cast<std::size_t>(
      std::max_element(weights_.begin(), weights_.end()) - weights_.begin());
}

std::size_t TopicVector::argmin() const {
  return static_cast<std::size_t>(
      std::min_element(weights_.begin(), weights_.end()) - weights_.begin());
}

void TopicVector::blend_toward(const TopicVector& other, uint64_t count) {
  if (weights_.empty()) weights_.assign(other.dim(), 0.0);
  if (other.dim() != dim()) throw DomainError("topic dimension mismatch");
  const double inv = 1.0 / static_cast<double>(count);
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    weights_[i] += (other.weights_[i] - weights_[i]) * inv;
  }
}

double relevance(const TopicVector& a, const TopicVector& b) {
  if (a.dim() != b.dim() || a.dim() == 0) {
    throw DomainError("relevance: topic dimension mismatch");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na <= 0.0 || nb <= 0.0) {
    throw DomainError("relevance: zero topic vector");
  }
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

std::string_view to_string(AdKind kind) {
  switch (kind) {
    case AdKind::kReal:
      return "real";
    case AdKind::kBluffA:
      return "bluff_a";
    case AdKind::kBluffB:
      return "bluff_b";
  }
  return "unknown";
}

std::optional<AdKind> parse_ad_kind(std::string_view s) {
  if (s == "real") return AdKind::kReal;
  if (s == "bluff_a") return AdKind::kBluffA;
  if (s == "bluff_b") return AdKind::kBluffB;
  return std::nullopt;
}

std::string check_ad_invariants(const AdUnit& ad, double bluff_epsilon) {
  switch (ad.kind) {
    case AdKind::kReal:
      if (!ad.advertiser_id) return "real ad without advertiser";
      if (ad.bid.micros <= 0) return "real ad with non-positive bid";
      break;
    case AdKind::kBluffA:
    case AdKind::kBluffB:
      if (ad.advertiser_id) return "bluff ad with advertiser";
      if (ad.bid.micros != 0) return "bluff ad with non-zero bid";
      break;
  }
  if (ad.kind == AdKind::kBluffA &&
      relevance(ad.targeting, ad.content) >= bluff_epsilon) {
    return "bluff_a content relevant to its targeting";
  }
  return {};
}

std::string_view to_string(AgentKind kind) {
  switch (kind) {
    case AgentKind::kBenign:
      return "benign";
    case AgentKind::kRandomBot:
      return "random_bot";
    case AgentKind::kTrainedBot:
      return "trained_bot";
    case AgentKind::kDictionaryBot:
      return "dictionary_bot";
    case AgentKind::kProfileHarvester:
      return "profile_harvester";
    case AgentKind::kViewBot:
      return "view_bot";
  }
  return "unknown";
}

std::optional<AgentKind> parse_agent_kind(std::string_view s) {
  for (AgentKind k : kAllAgentKinds) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

int region_of(Ipv4 ip) {
  const int first = static_cast<int>(ip >> 24);
  return first >= 10 ? first - 10 : 0;
}

Ipv4 make_ip(int region, uint32_t host) {
  return (static_cast<Ipv4>(10 + region) << 24) | (host & 0x00FFFFFFu);
}

std::string format_ip(Ipv4 ip) {
  return std::to_string(ip >> 24) + '.' + std::to_string((ip >> 16) & 0xFF) +
         '.' + std::to_string((ip >> 8) & 0xFF) + '.' +
         std::to_string(ip & 0xFF);
}

std::optional<Ipv4> parse_ip(std::string_view s) {
  Ipv4 ip = 0;
  const char* p = s.data();
  const char* end = s.data() + s.size();
  for (int octet = 0; octet < 4; ++octet) {
    unsigned v = 0;
    auto [next, ec] = std::from_chars(p, end, v);
    if (ec != std::errc() || v > 255) return std::nullopt;
    ip = (ip << 8) | v;
    p = next;
    if (octet < 3) {
      if (p == end || *p != '.') return std::nullopt;
      ++p;
    }
  }
  if (p != end) return std::nullopt;
  return ip;
}

std::string_view to_string(EventType type) {
  return type == EventType::kImpression ? "impression" : "click";
}

bool event_order_less(const Event& a, const Event& b) {
  return std::tie(a.t, a.agent_id, a.ad_id, a.etype, a.page_id, a.slot_index) <
         std::tie(b.t, b.agent_id, b.ad_id, b.etype, b.page_id, b.slot_index);
}

std::vector<StreamViolation> validate_event_stream(std::span<const Event> events,
                                                   int slots_per_page) {
  std::vector<StreamViolation> out;
  std::set<std::tuple<AgentId, PageId, AdId>> shown;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const Event& e = events[i];
    if (i > 0 && e.t < events[i - 1].t) {
      out.push_back({i, "timestamp decreases"});
    }
    if (slots_per_page > 0 &&
        (e.slot_index < 0 || e.slot_index >= slots_per_page)) {
      out.push_back({i, "slot index out of range"});
    }
    const auto key = std::make_tuple(e.agent_id, e.page_id, e.ad_id);
    if (e.etype == EventType::kImpression) {
      shown.insert(key);
    } else if (!shown.contains(key)) {
      out.push_back({i, "click without prior impression"});
    }
  }
  return out;
}

}  // namespace bluffsim
