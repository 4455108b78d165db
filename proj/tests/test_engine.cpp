#include <gtest/gtest.h>

#include <sstream>

#include "polisim/engine.hpp"
#include "polisim/errors.hpp"
#include "polisim/event_log.hpp"
#include "polisim/opinion.hpp"

using namespace polisim;

namespace {

std::vector<AgentProfile> make_population(std::size_t n, std::uint64_t seed = 4) {
  const auto seeds = synthetic_seed_records(500, 99);
  PopulationConfig pc;
  pc.population_size = n;
  Rng rng(seed);
  return build_population(seeds, pc, default_topics(), CoalitionPriors::defaults(), rng);
}

SimulationConfig small_config(std::size_t n, int days) {
  SimulationConfig c;
  c.population_size = n;
  c.days = days;
  c.driver = DriverConfig{};
  return c;
}

std::string log_text(const std::vector<Event>& events) {
  std::ostringstream out;
  write_event_log(out, events);
  return out.str();
}

// Stub behaviour with injectable failures.
class FaultyDriver : public AgentDriver {
 public:
  bool fail_posts = false;
  bool fail_updates = false;
  bool garbage_updates = false;

  std::string write_post(const DriverContext& ctx, const Topic& topic) override {
    if (fail_posts) throw DriverError("connection refused");
    return stub_.write_post(ctx, topic);
  }
  std::string write_comment(const DriverContext& ctx, const Topic& topic,
                            std::span<const ThreadMessage> thread) override {
    return stub_.write_comment(ctx, topic, thread);
  }
  std::string update_opinions(const DriverContext& ctx, std::span<const Topic> touched,
                              std::span<const MemoryEntry> memory, int attempt) override {
    ++update_calls;
    if (fail_updates) throw DriverError("timeout");
    if (garbage_updates) return "I would rather not say.";
    return stub_.update_opinions(ctx, touched, memory, attempt);
  }

  int update_calls = 0;

 private:
  StubDriver stub_{1};
};

std::size_t count(const std::vector<Event>& events, EventKind kind) {
  return static_cast<std::size_t>(
      std::count_if(events.begin(), events.end(), [&](const Event& e) { return e.kind == kind; }));
}

}  // namespace

TEST(NetworkInit, Strategies) {
  const auto pop = make_population(5);
  EXPECT_EQ(init_network(pop, NetworkInit::Empty).edge_count(), 0u);
  const SocialGraph full = init_network(pop, NetworkInit::FullyConnected);
  EXPECT_EQ(full.edge_count(), 20u);
  EXPECT_EQ(full.node_count(), 5u);
  EXPECT_EQ(parse_network_init("fully_connected"), NetworkInit::FullyConnected);
  EXPECT_THROW(parse_network_init("ring"), ValidationError);
}

TEST(SampleActiveUsers, ExtremesAndOrder) {
  auto pop = make_population(6);
  for (std::size_t i = 0; i < pop.size(); ++i) pop[i].activity = i % 2 ? 1.0 : 0.0;
  const auto ones = SimulationConfig::uniform_hourly_weights(1.0);
  Rng rng(3);
  const auto active = sample_active_users(pop, 5, ones, rng);
  ASSERT_EQ(active.size(), 3u);
  EXPECT_TRUE(std::is_sorted(active.begin(), active.end()));
  for (const auto& id : active) EXPECT_EQ(pop[std::stoi(id.substr(1))].activity, 1.0);
  const auto zeros = SimulationConfig::uniform_hourly_weights(0.0);
  EXPECT_TRUE(sample_active_users(pop, 5, zeros, rng).empty());
}

TEST(SampleActiveUsers, RateTracksActivity) {
  auto pop = make_population(3);
  pop[0].activity = 0.1;
  pop[1].activity = 0.4;
  pop[2].activity = 0.9;
  const auto w = SimulationConfig::uniform_hourly_weights(0.5);
  Rng rng(12);
  std::map<AgentId, int> hits;
  const int trials = 20000;
  for (int t = 0; t < trials; ++t) {
    for (const auto& id : sample_active_users(pop, t % 24, w, rng)) ++hits[id];
  }
  for (const auto& p : pop) {
    const double expected = 0.5 * p.activity;
    const double sd = std::sqrt(expected * (1 - expected) / trials);
    EXPECT_NEAR(hits[p.agent_id] / double(trials), expected, 4 * sd) << p.agent_id;
  }
  EXPECT_LT(hits[pop[0].agent_id], hits[pop[1].agent_id]);
  EXPECT_LT(hits[pop[1].agent_id], hits[pop[2].agent_id]);
}

TEST(ChooseAction, FeasibilityAndTargets) {
  const auto pop = make_population(2);
  Rng rng(1);
  const std::vector<FeedItem> empty_feed;
  const std::set<AgentId> none;
  const std::map<AgentId, int> no_interactions;
  for (int i = 0; i < 200; ++i) {
    const Action a = choose_action(pop[0], empty_feed, {}, none, no_interactions, rng).action;
    EXPECT_TRUE(a == Action::Post || a == Action::None);
  }

  std::vector<FeedItem> feed;
  for (int k = 0; k < 3; ++k) {
    ContentItem c;
    c.content_id = "c" + std::to_string(k);
    c.author = "b" + std::to_string(k);
    feed.push_back({c, false});
  }
  const std::map<AgentId, int> interactions{{"b0", 1}, {"b1", 5}, {"b2", 5}, {"z9", 0}};
  ActionWeights follow_only{0, 0, 0, 1, 0, 0};
  auto pick = choose_action(pop[0], feed, follow_only, none, interactions, rng);
  EXPECT_EQ(pick.action, Action::Follow);
  EXPECT_EQ(*pick.target, "b1");

  ActionWeights unfollow_only{0, 0, 0, 0, 1, 0};
  const std::set<AgentId> followees{"b1", "z9"};
  pick = choose_action(pop[0], feed, unfollow_only, followees, interactions, rng);
  EXPECT_EQ(pick.action, Action::Unfollow);
  EXPECT_EQ(*pick.target, "z9");

  ActionWeights like_only{0, 0, 1, 0, 0, 0};
  std::map<ContentId, int> liked;
  for (int i = 0; i < 3000; ++i) {
    pick = choose_action(pop[0], feed, like_only, none, interactions, rng);
    ASSERT_EQ(pick.action, Action::Like);
    ++liked[*pick.content];
  }
  for (const auto& [id, n] : liked) EXPECT_NEAR(n, 1000, 120) << id;
}

TEST(Simulation, DeterministicEventLog) {
  StubDriver d1(7), d2(7);
  const auto a = run_simulation(small_config(30, 3), make_population(30), World{}, d1);
  const auto b = run_simulation(small_config(30, 3), make_population(30), World{}, d2);
  EXPECT_FALSE(a.events.empty());
  EXPECT_EQ(log_text(a.events), log_text(b.events));
  auto other = small_config(30, 3);
  other.rng_seed = 43;
  const auto c = run_simulation(other, make_population(30), World{}, d1);
  EXPECT_NE(log_text(a.events), log_text(c.events));
}

TEST(Simulation, ZeroDays) {
  StubDriver d(1);
  const auto r = run_simulation(small_config(10, 0), make_population(10), World{}, d);
  EXPECT_TRUE(r.events.empty());
  ASSERT_EQ(r.graph_snapshots.size(), 1u);
  ASSERT_EQ(r.opinion_snapshots.size(), 1u);
  EXPECT_EQ(r.opinion_snapshots[0].day, 0);
}

TEST(Simulation, SnapshotsPerDay) {
  StubDriver d(1);
  const auto r = run_simulation(small_config(10, 4), make_population(10), World{}, d);
  ASSERT_EQ(r.graph_snapshots.size(), 5u);
  for (int day = 0; day <= 4; ++day) {
    EXPECT_EQ(r.graph_snapshots[day].day, day);
    EXPECT_EQ(r.opinion_snapshots[day].day, day);
  }
  EXPECT_EQ(r.graph_snapshots.back().graph, r.final_graph);
}

TEST(Simulation, ReplayReconstructsFinalState) {
  for (NetworkInit init : {NetworkInit::Empty, NetworkInit::FullyConnected}) {
    StubDriver d(5);
    auto cfg = small_config(25, 3);
    cfg.network_init = init;
    const auto r = run_simulation(cfg, make_population(25), World{}, d);
    std::stringstream io;
    write_event_log(io, r.events);
    const auto back = read_event_log(io);
    const ReplayResult replayed = replay(r.initial_graph, back);
    EXPECT_EQ(replayed.graph, r.final_graph);
    EXPECT_EQ(replayed.content, r.content);

    const auto follows = static_cast<long>(count(r.events, EventKind::Follow));
    const auto unfollows = static_cast<long>(count(r.events, EventKind::Unfollow));
    EXPECT_EQ(static_cast<long>(r.final_graph.edge_count()),
              static_cast<long>(r.initial_graph.edge_count()) + follows - unfollows);
  }
}

TEST(Simulation, EventOrderAndTicks) {
  StubDriver d(2);
  const auto r = run_simulation(small_config(20, 2), make_population(20), World{}, d);
  for (std::size_t i = 1; i < r.events.size(); ++i) {
    const Event& a = r.events[i - 1];
    const Event& b = r.events[i];
    EXPECT_TRUE(a.tick < b.tick || (a.tick == b.tick && a.seq < b.seq));
  }
  for (const Event& e : r.events) {
    if (e.kind == EventKind::OpinionUpdate) EXPECT_EQ(e.tick.hour, 23);
  }
}

TEST(Simulation, OpinionsStayOnGrid) {
  StubDriver d(3, 1.0);
  const auto r = run_simulation(small_config(30, 4), make_population(30), World{}, d);
  EXPECT_GT(count(r.events, EventKind::OpinionUpdate), 0u);
  for (const auto& snap : r.opinion_snapshots) {
    for (const auto& [agent, scores] : snap.scores) {
      for (const auto& [topic, s] : scores) {
        EXPECT_GE(s, -1.0);
        EXPECT_LE(s, 1.0);
        EXPECT_EQ(label_to_score(score_to_label(s)), s);
      }
    }
  }
  for (const auto& p : r.final_population) {
    EXPECT_TRUE(p.initial_frozen());
    for (const auto& rec : p.initial_opinions()) {
      EXPECT_EQ(r.opinion_snapshots[0].scores.at(p.agent_id).at(rec.topic_id), rec.stance_score);
    }
  }
}

TEST(Simulation, MemoryHygiene) {
  StubDriver d(4);
  Simulation sim(small_config(20, 3), make_population(20), World{}, d);
  sim.run_day();
  for (const auto& m : sim.state().memory) {
    EXPECT_FALSE(m.active);
    EXPECT_TRUE(m.own.empty());
    EXPECT_TRUE(m.seen.empty());
  }
  for (int h = 0; h < 12; ++h) sim.run_hour(h);
  for (std::size_t i = 0; i < sim.state().population.size(); ++i) {
    const auto recap = sim.recap(i);
    for (const auto& e : recap) EXPECT_EQ(e.observed.day, 1);
    EXPECT_TRUE(std::is_sorted(recap.begin(), recap.end(), [](const auto& a, const auto& b) {
      return std::tie(a.created, a.content_id) < std::tie(b.created, b.content_id);
    }));
  }
}

TEST(Simulation, DriverErrorsAreLogged) {
  FaultyDriver d;
  d.fail_posts = true;
  d.fail_updates = true;
  const auto r = run_simulation(small_config(15, 2), make_population(15), World{}, d);
  EXPECT_EQ(count(r.events, EventKind::Post), 0u);
  EXPECT_GT(count(r.events, EventKind::DriverError), 0u);
  EXPECT_EQ(count(r.events, EventKind::OpinionUpdate), 0u);
  for (const Event& e : r.events) {
    if (e.kind == EventKind::DriverError) EXPECT_TRUE(e.payload.contains("cause"));
  }
  EXPECT_EQ(r.opinion_snapshots.back(), (OpinionSnapshot{2, r.opinion_snapshots[0].scores}));
}

TEST(Simulation, ParseFailureAfterRetry) {
  FaultyDriver d;
  d.garbage_updates = true;
  const auto r = run_simulation(small_config(15, 2), make_population(15), World{}, d);
  const std::size_t failures = count(r.events, EventKind::ParseFailure);
  EXPECT_GT(failures, 0u);
  EXPECT_EQ(static_cast<std::size_t>(d.update_calls), 2 * failures);
  for (const Event& e : r.events) {
    if (e.kind == EventKind::ParseFailure) EXPECT_EQ(e.payload.at("attempts"), 2);
  }
}

TEST(Simulation, RejectsBadSetup) {
  StubDriver d(1);
  EXPECT_THROW(Simulation(small_config(10, 1), make_population(9), World{}, d), ValidationError);
  auto pop = make_population(3);
  pop[2].agent_id = pop[1].agent_id;
  EXPECT_THROW(Simulation(small_config(3, 1), pop, World{}, d), ValidationError);
  auto bad = small_config(3, -1);
  EXPECT_THROW(Simulation(bad, make_population(3), World{}, d), ValidationError);
}
