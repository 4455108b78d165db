#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "polisim/opinion.hpp"

namespace polisim {

using AgentId = std::string;
using ContentId = std::string;
using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Coalitions

enum class Coalition { Right, CentreLeft, ThirdPole, M5S };

/// Canonical order used for every matrix, vector and report.
inline constexpr std::array<Coalition, 4> kCoalitions{Coalition::Right, Coalition::CentreLeft,
                                                      Coalition::ThirdPole, Coalition::M5S};

inline constexpr std::size_t coalition_index(Coalition c) noexcept {
  return static_cast<std::size_t>(c);
}

/// Wire key: "right", "centre_left", "third_pole", "m5s".
std::string_view coalition_key(Coalition c) noexcept;
/// Human-readable: "Right", "Centre-Left", "Third Pole", "M5S".
std::string_view coalition_display_name(Coalition c) noexcept;
/// Accepts the wire key or the display name (case-insensitive).
Coalition parse_coalition(std::string_view text);

// ---------------------------------------------------------------------------
// Topics and opinions

struct Topic {
  std::string id;
  std::string name;  // display name used in prompts and parsed replies
  std::string description;
  std::string supportive_meaning;
  std::string opposed_meaning;

  bool operator==(const Topic&) const = default;
};

/// Unique ids, all texts non-empty.
void validate_topics(std::span<const Topic> topics);

/// The four election topics: civil_rights, immigration, nuclear, reddito_di_cittadinanza.
std::vector<Topic> default_topics();

const Topic& find_topic(std::span<const Topic> topics, std::string_view id);

struct OpinionRecord {
  std::string topic_id;
  StanceLabel label = StanceLabel::Neutral;
  double stance_score = 0.0;
  std::string justification;

  bool operator==(const OpinionRecord&) const = default;
};

struct BigFive {
  std::string openness;
  std::string conscientiousness;
  std::string extraversion;
  std::string agreeableness;
  std::string neuroticism;

  bool operator==(const BigFive&) const = default;
};

struct AgentProfile {
  AgentId agent_id;
  std::string name;
  std::optional<int> age;
  std::string gender;
  std::string nationality = "Italian";
  std::string language = "Italian";
  BigFive big_five;
  Coalition coalition = Coalition::Right;
  double activity = 0.0;
  double target_toxicity = 0.0;
  std::vector<OpinionRecord> opinions;

  const OpinionRecord& opinion(std::string_view topic_id) const;
  OpinionRecord& opinion(std::string_view topic_id);

  /// Day-0 copy of `opinions`; empty until frozen.
  const std::vector<OpinionRecord>& initial_opinions() const noexcept { return initial_opinions_; }
  bool initial_frozen() const noexcept { return frozen_; }
  /// Copies the current opinions into the immutable initial set. Throws if
  /// called twice.
  void freeze_initial_opinions();
  /// Restores a previously serialized initial set (deserialization only).
  void restore_initial_opinions(std::vector<OpinionRecord> initial);

  bool operator==(const AgentProfile&) const = default;

 private:
  std::vector<OpinionRecord> initial_opinions_;
  bool frozen_ = false;
};

/// Checks age/activity/toxicity ranges and one opinion per configured topic.
void validate_profile(const AgentProfile& profile, std::span<const Topic> topics);

// ---------------------------------------------------------------------------
// Time and content

struct Tick {
  int day = 0;
  int hour = 0;

  constexpr int absolute_hour() const noexcept { return day * 24 + hour; }
  auto operator<=>(const Tick&) const = default;
};

enum class ContentKind { Post, Comment };

std::string_view content_kind_key(ContentKind kind) noexcept;

struct ContentItem {
  ContentId content_id;
  AgentId author;
  ContentKind kind = ContentKind::Post;
  std::optional<ContentId> parent;  // present iff kind == Comment
  std::string topic_id;
  std::string text;
  Tick tick;
  std::int64_t like_count = 0;

  bool operator==(const ContentItem&) const = default;
};

/// Append-only content store in creation order.
class ContentStore {
 public:
  /// Rejects duplicate ids, comments without an existing parent and posts with one.
  const ContentItem& add(ContentItem item);
  const ContentItem* find(const ContentId& id) const;
  const ContentItem& at(const ContentId& id) const;
  void add_like(const ContentId& id);

  /// Chain from the root post down to `id`, inclusive.
  std::vector<const ContentItem*> thread(const ContentId& id) const;

  std::span<const ContentItem> items() const noexcept { return items_; }
  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }

  bool operator==(const ContentStore& other) const { return items_ == other.items_; }

 private:
  std::vector<ContentItem> items_;
  std::unordered_map<ContentId, std::size_t> index_;
};

// ---------------------------------------------------------------------------
// Follow graph

/// Directed follow relation: an edge (a, b) means a follows b.
class SocialGraph {
 public:
  SocialGraph() = default;
  explicit SocialGraph(std::span<const AgentId> nodes);

  void add_node(const AgentId& id);
  bool contains(const AgentId& id) const { return out_.count(id) != 0; }

  /// Inserts (follower, followee). Returns false when the edge already existed.
  /// Throws ValidationError on self-follow or unknown agents.
  bool follow(const AgentId& follower, const AgentId& followee);
  /// Removes the edge. Returns false when it was absent.
  bool unfollow(const AgentId& follower, const AgentId& followee);

  bool follows(const AgentId& follower, const AgentId& followee) const;
  const std::set<AgentId>& followees(const AgentId& id) const;

  std::size_t node_count() const noexcept { return out_.size(); }
  std::size_t edge_count() const noexcept { return edge_count_; }
  std::vector<AgentId> nodes() const;
  std::vector<std::pair<AgentId, AgentId>> edges() const;

  bool operator==(const SocialGraph& other) const { return out_ == other.out_; }

 private:
  void require_node(const AgentId& id) const;

  std::map<AgentId, std::set<AgentId>> out_;
  std::size_t edge_count_ = 0;
};

struct GraphSnapshot {
  int day = 0;
  SocialGraph graph;
};

/// Per-agent, per-topic stance scores at the end of a day (day 0 = initial).
struct OpinionSnapshot {
  int day = 0;
  std::map<AgentId, std::map<std::string, double>> scores;

  bool operator==(const OpinionSnapshot&) const = default;
};

OpinionSnapshot take_opinion_snapshot(int day, std::span<const AgentProfile> population);

// ---------------------------------------------------------------------------
// Events

enum class EventKind { Post, Comment, Like, Follow, Unfollow, OpinionUpdate, DriverError, ParseFailure };

std::string_view event_kind_key(EventKind kind) noexcept;
EventKind parse_event_kind(std::string_view text);

struct Event {
  Tick tick;
  int seq = 0;
  EventKind kind = EventKind::Post;
  AgentId actor;
  std::optional<AgentId> target;
  std::optional<ContentId> content_id;
  json payload = json::object();

  bool operator==(const Event&) const = default;
};

}  // namespace polisim
