#include "polisim/domain.hpp"

#include <algorithm>
#include <cctype>

#include "polisim/errors.hpp"

namespace polisim {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::string_view coalition_key(Coalition c) noexcept {
  switch (c) {
    case Coalition::Right: return "right";
    case Coalition::CentreLeft: return "centre_left";
    case Coalition::ThirdPole: return "third_pole";
    case Coalition::M5S: return "m5s";
  }
  return "right";
}

std::string_view coalition_display_name(Coalition c) noexcept {
  switch (c) {
    case Coalition::Right: return "Right";
    case Coalition::CentreLeft: return "Centre-Left";
    case Coalition::ThirdPole: return "Third Pole";
    case Coalition::M5S: return "M5S";
  }
  return "Right";
}

Coalition parse_coalition(std::string_view text) {
  const std::string l = lower(text);
  for (Coalition c : kCoalitions) {
    if (l == coalition_key(c) || l == lower(coalition_display_name(c))) return c;
  }
  throw ValidationError("unknown coalition: '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------

void validate_topics(std::span<const Topic> topics) {
  std::set<std::string> seen;
  for (const Topic& t : topics) {
    if (t.id.empty()) throw ValidationError("topic with empty id");
    if (!seen.insert(t.id).second) throw ValidationError("duplicate topic id: " + t.id);
    if (t.name.empty() || t.description.empty() || t.supportive_meaning.empty() ||
        t.opposed_meaning.empty()) {
      throw ValidationError("topic '" + t.id + "' has an empty text field");
    }
  }
}

std::vector<Topic> default_topics() {
  return {
      {"civil_rights", "Civil rights",
       "covering gender equality, LGBTQIA+ rights, and family structure",
       "favouring new rights such as equal marriage, adoption by same-sex couples and "
       "anti-discrimination laws",
       "resisting reforms on family and gender identity in defence of the traditional family"},
      {"immigration", "Immigration",
       "centered on border control, bilateral agreements, and the management of irregular "
       "migration",
       "favouring reception, integration pathways and humanitarian corridors",
       "favouring stricter border control and stopping irregular migration"},
      {"nuclear", "Nuclear energy",
       "debating whether nuclear power should be included in the national energy mix",
       "favouring nuclear power as part of the national energy mix",
       "rejecting nuclear power in favour of renewables and efficiency"},
      {"reddito_di_cittadinanza", "Reddito di cittadinanza",
       "a state subsidy for individuals living in poverty, functioning as a conditional and "
       "non-individual guaranteed minimum income, designed to ensure a minimum standard of "
       "living and to promote employment integration; debate revolves around approval, "
       "reform, and abolishment",
       "keeping or strengthening the citizens' income",
       "abolishing the citizens' income or restricting it to those unfit for work"},
  };
}

const Topic& find_topic(std::span<const Topic> topics, std::string_view id) {
  for (const Topic& t : topics) {
    if (t.id == id) return t;
  }
  throw ValidationError("unknown topic: '" + std::string(id) + "'");
}

// ---------------------------------------------------------------------------

const OpinionRecord& AgentProfile::opinion(std::string_view topic_id) const {
  for (const OpinionRecord& r : opinions) {
    if (r.topic_id == topic_id) return r;
  }
  throw ValidationError("agent " + agent_id + " has no opinion on '" + std::string(topic_id) + "'");
}

OpinionRecord& AgentProfile::opinion(std::string_view topic_id) {
  return const_cast<OpinionRecord&>(static_cast<const AgentProfile&>(*this).opinion(topic_id));
}

void AgentProfile::freeze_initial_opinions() {
  if (frozen_) throw ValidationError("initial opinions of " + agent_id + " already frozen");
  initial_opinions_ = opinions;
  frozen_ = true;
}

void AgentProfile::restore_initial_opinions(std::vector<OpinionRecord> initial) {
  if (frozen_) throw ValidationError("initial opinions of " + agent_id + " already frozen");
  initial_opinions_ = std::move(initial);
  frozen_ = true;
}

void validate_profile(const AgentProfile& p, std::span<const Topic> topics) {
  if (p.agent_id.empty()) throw ValidationError("profile with empty agent_id");
  if (p.age && (*p.age < 18 || *p.age > 60)) {
    throw ValidationError("age of " + p.agent_id + " outside [18, 60]");
  }
  if (!(p.activity >= 0.0 && p.activity <= 1.0)) {
    throw ValidationError("activity of " + p.agent_id + " outside [0, 1]");
  }
  if (!(p.target_toxicity >= 0.0 && p.target_toxicity <= 1.0)) {
    throw ValidationError("target_toxicity of " + p.agent_id + " outside [0, 1]");
  }
  if (p.opinions.size() != topics.size()) {
    throw ValidationError("agent " + p.agent_id + " must hold exactly one opinion per topic");
  }
  for (const Topic& t : topics) {
    const OpinionRecord& r = p.opinion(t.id);
    if (!(r.stance_score >= -1.0 && r.stance_score <= 1.0)) {
      throw ValidationError("stance of " + p.agent_id + " on " + t.id + " outside [-1, 1]");
    }
  }
}

// ---------------------------------------------------------------------------

std::string_view content_kind_key(ContentKind kind) noexcept {
  return kind == ContentKind::Post ? "post" : "comment";
}

const ContentItem& ContentStore::add(ContentItem item) {
  if (item.content_id.empty()) throw ValidationError("content with empty id");
  if (index_.count(item.content_id)) {
    throw ValidationError("duplicate content id: " + item.content_id);
  }
  if (item.kind == ContentKind::Comment) {
    if (!item.parent || !find(*item.parent)) {
      throw ValidationError("comment " + item.content_id + " has no existing parent");
    }
  } else if (item.parent) {
    throw ValidationError("post " + item.content_id + " must not have a parent");
  }
  if (item.like_count < 0) throw ValidationError("negative like_count");
  index_.emplace(item.content_id, items_.size());
  items_.push_back(std::move(item));
  return items_.back();
}

const ContentItem* ContentStore::find(const ContentId& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &items_[it->second];
}

const ContentItem& ContentStore::at(const ContentId& id) const {
  const ContentItem* item = find(id);
  if (!item) throw ValidationError("unknown content id: " + id);
  return *item;
}

void ContentStore::add_like(const ContentId& id) {
  auto it = index_.find(id);
  if (it == index_.end()) throw ValidationError("like on unknown content id: " + id);
  ++items_[it->second].like_count;
}

std::vector<const ContentItem*> ContentStore::thread(const ContentId& id) const {
  std::vector<const ContentItem*> chain;
  const ContentItem* cur = &at(id);
  // Parents are always inserted before children, so the walk terminates.
  while (cur) {
    chain.push_back(cur);
    cur = cur->parent ? &at(*cur->parent) : nullptr;
  }
  std::reverse(chain.begin(), chain.end());
  return chain;
}

// ---------------------------------------------------------------------------

SocialGraph::SocialGraph(std::span<const AgentId> nodes) {
  for (const AgentId& id : nodes) add_node(id);
}

void SocialGraph::add_node(const AgentId& id) {
  if (id.empty()) throw ValidationError("empty agent id");
  out_.try_emplace(id);
}

void SocialGraph::require_node(const AgentId& id) const {
  if (!contains(id)) throw ValidationError("unknown agent: " + id);
}

bool SocialGraph::follow(const AgentId& follower, const AgentId& followee) {
  require_node(follower);
  require_node(followee);
  if (follower == followee) throw ValidationError("self-follow rejected: " + follower);
  const bool added = out_[follower].insert(followee).second;
  if (added) ++edge_count_;
  return added;
}

bool SocialGraph::unfollow(const AgentId& follower, const AgentId& followee) {
  require_node(follower);
  require_node(followee);
  if (follower == followee) throw ValidationError("self-unfollow rejected: " + follower);
  const bool removed = out_[follower].erase(followee) != 0;
  if (removed) --edge_count_;
  return removed;
}

bool SocialGraph::follows(const AgentId& follower, const AgentId& followee) const {
  auto it = out_.find(follower);
  return it != out_.end() && it->second.count(followee) != 0;
}

const std::set<AgentId>& SocialGraph::followees(const AgentId& id) const {
  auto it = out_.find(id);
  if (it == out_.end()) throw ValidationError("unknown agent: " + id);
  return it->second;
}

std::vector<AgentId> SocialGraph::nodes() const {
  std::vector<AgentId> ids;
  ids.reserve(out_.size());
  for (const auto& [id, _] : out_) ids.push_back(id);
  return ids;
}

std::vector<std::pair<AgentId, AgentId>> SocialGraph::edges() const {
  std::vector<std::pair<AgentId, AgentId>> result;
  result.reserve(edge_count_);
  for (const auto& [from, tos] : out_) {
    for (const AgentId& to : tos) result.emplace_back(from, to);
  }
  return result;
}

OpinionSnapshot take_opinion_snapshot(int day, std::span<const AgentProfile> population) {
  OpinionSnapshot snap;
  snap.day = day;
  for (const AgentProfile& p : population) {
    auto& row = snap.scores[p.agent_id];
    for (const OpinionRecord& r : p.opinions) row[r.topic_id] = r.stance_score;
  }
  return snap;
}

// ---------------------------------------------------------------------------

std::string_view event_kind_key(EventKind kind) noexcept {
  switch (kind) {
    case EventKind::Post: return "post";
    case EventKind::Comment: return "comment";
    case EventKind::Like: return "like";
    case EventKind::Follow: return "follow";
    case EventKind::Unfollow: return "unfollow";
    case EventKind::OpinionUpdate: return "opinion_update";
    case EventKind::DriverError: return "driver_error";
    case EventKind::ParseFailure: return "parse_failure";
  }
  return "post";
}

EventKind parse_event_kind(std::string_view text) {
  for (EventKind k : {EventKind::Post, EventKind::Comment, EventKind::Like, EventKind::Follow,
                      EventKind::Unfollow, EventKind::OpinionUpdate, EventKind::DriverError,
                      EventKind::ParseFailure}) {
    if (text == event_kind_key(k)) return k;
  }
  throw ValidationError("unknown event kind: '" + std::string(text) + "'");
}

}  // namespace polisim
