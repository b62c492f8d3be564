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

#ifndef BLUFFSIM_DOMAIN_H_
#define BLUFFSIM_DOMAIN_H_

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bluffsim {

// Raised when an operation is called outside its mathematical domain.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised for invalid scenario or detector configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised for malformed input data such as an invalid event stream.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when broker or event state is internally inconsistent.
class IntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kDefaultTopicDim = 16;
inline constexpr double kDefaultBluffEpsilon = 0.05;
inline constexpr int64_t kMsPerHour = 3'600'000;
inline constexpr int64_t kMsPerDay = 86'400'000;

using AgentId = uint32_t;
using AdId = uint64_t;
using AdvertiserId = uint32_t;
using PageId = uint64_t;
using Ipv4 = uint32_t;

// Simulated milliseconds since scenario start.
struct Timestamp {
  int64_t ms = 0;

  constexpr int64_t day() const { return ms / kMsPerDay; }
  constexpr int hour_of_day() const {
    return static_cast<int>((ms / kMsPerHour) % 24);
  }
  friend constexpr auto operator<=>(Timestamp, Timestamp) = default;
};

// Integer micro-currency. Never goes through floating point.
struct Money {
  int64_t micros = 0;

  friend constexpr Money operator+(Money a, Money b) {
    return {a.micros + b.micros};
  }
  friend constexpr Money operator-(Money a, Money b) {
    return {a.micros - b.micros};
  }
  constexpr Money& operator+=(Money o) {
    micros += o.micros;
    return *this;
  }
  friend constexpr auto operator<=>(Money, Money) = default;
};

constexpr Money min(Money a, Money b) { return a < b ? a : b; }

// Non-negative weights over a fixed topic taxonomy.
class TopicVector {
 public:
  TopicVector() = default;
  explicit TopicVector(std::vector<double> weights);

  static TopicVector zeros(std::size_t dim);
  static TopicVector basis(std::size_t dim, std::size_t index);
  static TopicVector uniform(std::size_t dim);

  std::size_t dim() const { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }
  std::span<const double> weights() const { return weights_; }

  double norm() const;
  double sum() const;
  bool has_positive_weight() const;
  std::size_t argmax() const;
  std::size_t argmin() const;

  // this += (other - this) / count, the running-mean update.
  void blend_toward(const TopicVector& other, uint64_t count);

  friend bool operator==(const TopicVector&, const TopicVector&) = default;

 private:
  std::vector<double> weights_;
};

// Cosine similarity in [0, 1]. Throws DomainError on dimension mismatch or an
// all-zero vector.
double relevance(const TopicVector& a, const TopicVector& b);

enum class AdKind : uint8_t { kReal, kBluffA, kBluffB };

std::string_view to_string(AdKind kind);
std::optional<AdKind> parse_ad_kind(std::string_view s);
constexpr bool is_bluff(AdKind kind) { return kind != AdKind::kReal; }

struct AdUnit {
  AdId ad_id = 0;
  std::optional<AdvertiserId> advertiser_id;
  AdKind kind = AdKind::kReal;
  TopicVector targeting;
  TopicVector content;
  Money bid;
  Timestamp created_at;
};

// Checks the per-kind AdUnit invariants. Returns an empty string when valid.
std::string check_ad_invariants(const AdUnit& ad, double bluff_epsilon);

enum class AgentKind : uint8_t {
  kBenign,
  kRandomBot,
  kTrainedBot,
  kDictionaryBot,
  kProfileHarvester,
  kViewBot,
};

inline constexpr AgentKind kAllAgentKinds[] = {
    AgentKind::kBenign,        AgentKind::kRandomBot,
    AgentKind::kTrainedBot,    AgentKind::kDictionaryBot,
    AgentKind::kProfileHarvester, AgentKind::kViewBot,
};

std::string_view to_string(AgentKind kind);
std::optional<AgentKind> parse_agent_kind(std::string_view s);
constexpr bool is_fraudulent(AgentKind kind) {
  return kind != AgentKind::kBenign;
}

struct BehaviorParams;

struct Agent {
  AgentId agent_id = 0;
  AgentKind kind = AgentKind::kBenign;
  TopicVector profile;
  Ipv4 ip = 0;
  int region = 0;
  const BehaviorParams* behavior = nullptr;
};

// Geo bucket of an address. Region r owns the 10+r first octet.
int region_of(Ipv4 ip);
Ipv4 make_ip(int region, uint32_t host);
std::string format_ip(Ipv4 ip);
std::optional<Ipv4> parse_ip(std::string_view s);

enum class EventType : uint8_t { kImpression, kClick };

std::string_view to_string(EventType type);

struct Event {
  Timestamp t;
  EventType etype = EventType::kImpression;
  AgentId agent_id = 0;
  Ipv4 ip = 0;
  PageId page_id = 0;
  AdId ad_id = 0;
  AdKind ad_kind = AdKind::kReal;
  int slot_index = 0;

  friend bool operator==(const Event&, const Event&) = default;
};

// Documented tie order: (t, agent_id, ad_id, Impression before Click), then
// page and slot so the order is total.
bool event_order_less(const Event& a, const Event& b);

struct StreamViolation {
  std::size_t index = 0;
  std::string message;
};

// Empty result iff timestamps are non-decreasing and every click has a
// matching earlier-or-simultaneous impression. slots_per_page <= 0 skips the
// slot range check.
std::vector<StreamViolation> validate_event_stream(std::span<const Event> events,
                                                   int slots_per_page = 0);

}  // namespace bluffsim

#endif  // BLUFFSIM_DOMAIN_H_
