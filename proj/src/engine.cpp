#include "polisim/engine.hpp"

#include <algorithm>
#include <cstdio>

#include "polisim/errors.hpp"

namespace polisim {

std::string_view network_init_key(NetworkInit init) noexcept {
  return init == NetworkInit::Empty ? "empty" : "fully_connected";
}

NetworkInit parse_network_init(std::string_view text) {
  if (text == "empty") return NetworkInit::Empty;
  if (text == "fully_connected") return NetworkInit::FullyConnected;
  throw ValidationError("unknown network_init: '" + std::string(text) + "'");
}

std::string_view action_key(Action a) noexcept {
  switch (a) {
    case Action::None: return "none";
    case Action::Post: return "post";
    case Action::Comment: return "comment";
    case Action::Like: return "like";
    case Action::Follow: return "follow";
    case Action::Unfollow: return "unfollow";
  }
  return "none";
}

double ActionWeights::weight(Action a) const noexcept {
  switch (a) {
    case Action::None: return none;
    case Action::Post: return post;
    case Action::Comment: return comment;
    case Action::Like: return like;
    case Action::Follow: return follow;
    case Action::Unfollow: return unfollow;
  }
  return 0.0;
}

void SimulationConfig::validate() const {
  if (population_size < 2) throw ValidationError("population_size must be at least 2");
  if (days < 0) throw ValidationError("days must be non-negative");
  for (double w : hourly_weights) {
    if (!(w >= 0.0 && w <= 1.0)) throw ValidationError("hourly weight outside [0, 1]");
  }
  for (Action a : {Action::None, Action::Post, Action::Comment, Action::Like, Action::Follow,
                   Action::Unfollow}) {
    if (!(action_weights.weight(a) >= 0.0)) {
      throw ValidationError("negative weight for action " + std::string(action_key(a)));
    }
  }
  recommender.validate();
  driver.validate();
}

// ---------------------------------------------------------------------------

SocialGraph init_network(std::span<const AgentProfile> population, NetworkInit strategy) {
  SocialGraph g;
  for (const AgentProfile& p : population) g.add_node(p.agent_id);
  if (strategy == NetworkInit::FullyConnected) {
    for (const AgentProfile& a : population) {
      for (const AgentProfile& b : population) {
        if (a.agent_id != b.agent_id) g.follow(a.agent_id, b.agent_id);
      }
    }
  }
  return g;
}

std::vector<AgentId> sample_active_users(std::span<const AgentProfile> population, int hour,
                                         std::span<const double, kHoursPerDay> hourly_weights,
                                         Rng& rng) {
  if (hour < 0 || hour >= kHoursPerDay) throw ValidationError("hour outside [0, 24)");
  std::vector<AgentId> active;
  const double w = hourly_weights[static_cast<std::size_t>(hour)];
  for (const AgentProfile& p : population) {
    // One draw per agent keeps the stream aligned regardless of outcomes.
    if (rng.bernoulli(w * p.activity)) active.push_back(p.agent_id);
  }
  return active;
}

ActionChoice choose_action(const AgentProfile& profile, std::span<const FeedItem> feed,
                           const ActionWeights& weights, const std::set<AgentId>& followees,
                           const std::map<AgentId, int>& interactions, Rng& rng) {
  auto interaction_count = [&](const AgentId& id) {
    auto it = interactions.find(id);
    return it == interactions.end() ? 0 : it->second;
  };

  std::optional<AgentId> follow_target;
  for (const FeedItem& f : feed) {
    const AgentId& author = f.item.author;
    if (author == profile.agent_id || followees.count(author)) continue;
    if (!follow_target || interaction_count(author) > interaction_count(*follow_target) ||
        (interaction_count(author) == interaction_count(*follow_target) && author < *follow_target)) {
      follow_target = author;
    }
  }
  std::optional<AgentId> unfollow_target;
  for (const AgentId& f : followees) {  // ascending, so strict < keeps the smallest id on ties
    if (!unfollow_target || interaction_count(f) < interaction_count(*unfollow_target)) {
      unfollow_target = f;
    }
  }

  constexpr std::array<Action, 6> actions{Action::Post,   Action::Comment,  Action::Like,
                                          Action::Follow, Action::Unfollow, Action::None};
  std::array<double, 6> w{};
  for (std::size_t i = 0; i < actions.size(); ++i) {
    const Action a = actions[i];
    bool feasible = true;
    if (a == Action::Comment || a == Action::Like) feasible = !feed.empty();
    if (a == Action::Follow) feasible = follow_target.has_value();
    if (a == Action::Unfollow) feasible = unfollow_target.has_value();
    w[i] = feasible ? weights.weight(a) : 0.0;
  }
  double total = 0.0;
  for (double v : w) total += v;
  if (!(total > 0.0)) return {};

  ActionChoice choice;
  choice.action = actions[rng.weighted(w)];
  switch (choice.action) {
    case Action::Comment:
    case Action::Like: {
      const FeedItem& f = feed[rng.index(feed.size())];
      choice.content = f.item.content_id;
      choice.target = f.item.author;
      break;
    }
    case Action::Follow:
      choice.target = follow_target;
      break;
    case Action::Unfollow:
      choice.target = unfollow_target;
      break;
    default:
      break;
  }
  return choice;
}

// ---------------------------------------------------------------------------

Simulation::Simulation(SimulationConfig config, std::vector<AgentProfile> population, World world,
                       AgentDriver& driver)
    : config_(std::move(config)),
      world_(std::move(world)),
      driver_(driver),
      rng_(derive_seed(config_.rng_seed, 1)) {
  config_.validate();
  validate_topics(world_.topics);
  if (world_.topics.empty()) throw ValidationError("at least one topic is required");
  world_.priors.validate(world_.topics);
  if (population.size() != config_.population_size) {
    throw ValidationError("population has " + std::to_string(population.size()) +
                          " agents but population_size is " +
                          std::to_string(config_.population_size));
  }
  std::sort(population.begin(), population.end(),
            [](const AgentProfile& a, const AgentProfile& b) { return a.agent_id < b.agent_id; });
  for (std::size_t i = 0; i < population.size(); ++i) {
    AgentProfile& p = population[i];
    validate_profile(p, world_.topics);
    if (!index_.emplace(p.agent_id, i).second) {
      throw ValidationError("duplicate agent_id: " + p.agent_id);
    }
    if (!p.initial_frozen()) p.freeze_initial_opinions();
  }
  state_.population = std::move(population);
  state_.graph = init_network(state_.population, config_.network_init);
  state_.memory.resize(state_.population.size());
  initial_graph_ = state_.graph;
}

std::size_t Simulation::index_of(const AgentId& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw ValidationError("unknown agent: " + id);
  return it->second;
}

ContentId Simulation::next_content_id() {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "r%d-c%06llu", config_.run_index,
                static_cast<unsigned long long>(content_counter_++));
  return buf;
}

void Simulation::emit(EventKind kind, const AgentId& actor, std::optional<AgentId> target,
                      std::optional<ContentId> content, json payload) {
  state_.events.push_back(
      Event{state_.now, seq_++, kind, actor, std::move(target), std::move(content), std::move(payload)});
}

void Simulation::remember_feed(std::size_t agent_index, std::span<const FeedItem> feed) {
  DailyMemory& mem = state_.memory[agent_index];
  for (const FeedItem& f : feed) {
    if (!mem.seen_ids.insert(f.item.content_id).second) continue;
    const AgentProfile& author = state_.population[index_of(f.item.author)];
    mem.seen.push_back(MemoryEntry{state_.now, f.item.tick, f.item.content_id, f.item.author,
                                   author.name, f.item.kind, f.item.topic_id, f.item.text, false});
    ++mem.interactions[f.item.author];
  }
}

void Simulation::run_hour(int hour) {
  if (hour < 0 || hour >= kHoursPerDay) throw ValidationError("hour outside [0, 24)");
  state_.now = Tick{day_, hour};
  seq_ = 0;
  const std::vector<AgentId> active =
      sample_active_users(state_.population, hour, config_.hourly_weights, rng_);
  for (const AgentId& id : active) act(index_of(id));
}

void Simulation::act(std::size_t agent_index) {
  AgentProfile& profile = state_.population[agent_index];
  DailyMemory& mem = state_.memory[agent_index];
  mem.active = true;

  const PlatformView view{state_.graph, state_.content};
  const FeedRequest request{profile.agent_id, config_.recommender.feed_limit, state_.now};
  const std::vector<FeedItem> feed = build_feed(view, request, config_.recommender, rng_);
  remember_feed(agent_index, feed);

  const ActionChoice choice =
      choose_action(profile, feed, config_.action_weights, state_.graph.followees(profile.agent_id),
                    mem.interactions, rng_);
  const DriverContext ctx{profile, world_.topics, world_.priors, state_.now};

  auto record_own = [&](const ContentItem& item) {
    mem.own.push_back(MemoryEntry{state_.now, item.tick, item.content_id, profile.agent_id,
                                  profile.name, item.kind, item.topic_id, item.text, true});
  };
  auto driver_failure = [&](const std::string& cause) {
    emit(EventKind::DriverError, profile.agent_id, std::nullopt, std::nullopt,
         json{{"action", action_key(choice.action)}, {"cause", cause}});
  };

  switch (choice.action) {
    case Action::None:
      break;
    case Action::Post: {
      const Topic& topic = world_.topics[rng_.index(world_.topics.size())];
      std::string text;
      try {
        text = driver_.write_post(ctx, topic);
        if (text.empty()) throw DriverError("empty completion");
      } catch (const DriverError& e) {
        driver_failure(e.what());
        break;
      }
      ContentItem item{next_content_id(), profile.agent_id, ContentKind::Post, std::nullopt,
                       topic.id, std::move(text), state_.now, 0};
      const ContentItem& stored = state_.content.add(std::move(item));
      record_own(stored);
      emit(EventKind::Post, profile.agent_id, std::nullopt, stored.content_id,
           json{{"topic", stored.topic_id}, {"text", stored.text}});
      break;
    }
    case Action::Comment: {
      const ContentItem& parent = state_.content.at(*choice.content);
      const Topic& topic = find_topic(world_.topics, parent.topic_id);
      std::vector<ThreadMessage> thread;
      for (const ContentItem* c : state_.content.thread(parent.content_id)) {
        thread.push_back({state_.population[index_of(c->author)].name, c->text});
      }
      std::string text;
      try {
        text = driver_.write_comment(ctx, topic, thread);
        if (text.empty()) throw DriverError("empty completion");
      } catch (const DriverError& e) {
        driver_failure(e.what());
        break;
      }
      const ContentId parent_id = parent.content_id;
      const AgentId parent_author = parent.author;
      ContentItem item{next_content_id(), profile.agent_id, ContentKind::Comment, parent_id,
                       topic.id, std::move(text), state_.now, 0};
      const ContentItem& stored = state_.content.add(std::move(item));
      record_own(stored);
      ++mem.interactions[parent_author];
      emit(EventKind::Comment, profile.agent_id, parent_author, stored.content_id,
           json{{"parent", parent_id}, {"topic", stored.topic_id}, {"text", stored.text}});
      break;
    }
    case Action::Like:
      state_.content.add_like(*choice.content);
      ++mem.interactions[*choice.target];
      emit(EventKind::Like, profile.agent_id, choice.target, choice.content, json::object());
      break;
    case Action::Follow:
      state_.graph.follow(profile.agent_id, *choice.target);
      emit(EventKind::Follow, profile.agent_id, choice.target, std::nullopt, json::object());
      break;
    case Action::Unfollow:
      state_.graph.unfollow(profile.agent_id, *choice.target);
      emit(EventKind::Unfollow, profile.agent_id, choice.target, std::nullopt, json::object());
      break;
  }
}

std::vector<MemoryEntry> Simulation::recap(std::size_t agent_index) const {
  const DailyMemory& mem = state_.memory.at(agent_index);
  std::vector<MemoryEntry> out = mem.own;
  const std::size_t keep = std::min(config_.recap_feed_items, mem.seen.size());
  out.insert(out.end(), mem.seen.end() - static_cast<std::ptrdiff_t>(keep), mem.seen.end());
  std::stable_sort(out.begin(), out.end(), [](const MemoryEntry& a, const MemoryEntry& b) {
    if (a.created != b.created) return a.created < b.created;
    return a.content_id < b.content_id;
  });
  return out;
}

std::vector<Topic> Simulation::touched_topics(std::span<const MemoryEntry> recap) const {
  std::vector<Topic> touched;
  for (const Topic& t : world_.topics) {
    const bool hit = std::any_of(recap.begin(), recap.end(),
                                 [&](const MemoryEntry& m) { return m.topic_id == t.id; });
    if (hit) touched.push_back(t);
  }
  return touched;
}

void Simulation::end_of_day_update() {
  state_.now = Tick{day_, kHoursPerDay - 1};
  for (std::size_t i = 0; i < state_.population.size(); ++i) {
    if (!state_.memory[i].active) continue;
    AgentProfile& profile = state_.population[i];
    const std::vector<MemoryEntry> info = recap(i);
    const std::vector<Topic> touched = touched_topics(info);
    if (touched.empty()) continue;

    const DriverContext ctx{profile, world_.topics, world_.priors, state_.now};
    std::optional<ParsedOpinionUpdate> parsed;
    std::string last_raw;
    bool transport_failed = false;
    for (int attempt = 0; attempt < 2 && !parsed; ++attempt) {
      try {
        last_raw = driver_.update_opinions(ctx, touched, info, attempt);
        parsed = parse_opinion_update(last_raw, touched);
      } catch (const ParseFailure&) {
        continue;
      } catch (const DriverError& e) {
        emit(EventKind::DriverError, profile.agent_id, std::nullopt, std::nullopt,
             json{{"action", "opinion_update"}, {"cause", e.what()}});
        transport_failed = true;
        break;
      }
    }
    if (transport_failed) continue;
    if (!parsed) {
      emit(EventKind::ParseFailure, profile.agent_id, std::nullopt, std::nullopt,
           json{{"attempts", 2}, {"raw", last_raw}});
      continue;
    }
    for (const OpinionUpdateEntry& e : parsed->entries) {
      OpinionRecord& rec = profile.opinion(e.topic_id);
      const double previous = rec.stance_score;
      rec.label = e.label;
      rec.stance_score = std::clamp(label_to_score(e.label), -1.0, 1.0);
      rec.justification = e.thought;
      emit(EventKind::OpinionUpdate, profile.agent_id, std::nullopt, std::nullopt,
           json{{"topic", e.topic_id},
                {"label", label_key(e.label)},
                {"score", rec.stance_score},
                {"previous_score", previous},
                {"justification", e.thought}});
    }
  }
  for (DailyMemory& m : state_.memory) m.clear();
}

void Simulation::run_day() {
  for (int h = 0; h < kHoursPerDay; ++h) run_hour(h);
  end_of_day_update();
  ++day_;
}

SimulationResult Simulation::run() {
  SimulationResult result;
  result.initial_graph = initial_graph_;
  result.graph_snapshots.push_back({0, state_.graph});
  result.opinion_snapshots.push_back(take_opinion_snapshot(0, state_.population));
  while (day_ < config_.days) {
    run_day();
    result.graph_snapshots.push_back({day_, state_.graph});
    result.opinion_snapshots.push_back(take_opinion_snapshot(day_, state_.population));
  }
  result.events = state_.events;
  result.final_population = state_.population;
  result.content = state_.content;
  result.final_graph = state_.graph;
  return result;
}

SimulationResult run_simulation(const SimulationConfig& config,
                                std::vector<AgentProfile> population, const World& world,
                                AgentDriver& driver) {
  Simulation sim(config, std::move(population), world, driver);
  return sim.run();
}

}  // namespace polisim
