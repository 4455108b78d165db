#pragma once

// Day loop of the simulated platform. Each virtual day runs 24 hourly rounds;
// in every round a random subset of agents wakes up, reads a feed and takes
// one action. After the last round, every agent that was active that day
// revises its opinions from the day's memory.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "polisim/agent_driver.hpp"
#include "polisim/domain.hpp"
#include "polisim/prompts.hpp"
#include "polisim/recommender.hpp"
#include "polisim/rng.hpp"
#include "polisim/seeding.hpp"

namespace polisim {

inline constexpr int kHoursPerDay = 24;

enum class NetworkInit { Empty, FullyConnected };

std::string_view network_init_key(NetworkInit init) noexcept;
NetworkInit parse_network_init(std::string_view text);

enum class Action { None, Post, Comment, Like, Follow, Unfollow };

std::string_view action_key(Action a) noexcept;

struct ActionWeights {
  double post = 0.30;
  double comment = 0.30;
  double like = 0.20;
  double follow = 0.12;
  double unfollow = 0.03;
  double none = 0.05;

  double weight(Action a) const noexcept;
  bool operator==(const ActionWeights&) const = default;
};

struct SimulationConfig {
  std::size_t population_size = 100;
  int days = 21;
  NetworkInit network_init = NetworkInit::Empty;
  RecommenderConfig recommender;
  std::array<double, kHoursPerDay> hourly_weights = uniform_hourly_weights(0.5);
  ActionWeights action_weights;
  std::uint64_t rng_seed = 42;
  int run_index = 0;
  DriverConfig driver = DriverConfig::from_env();
  /// Feed items kept in the end-of-day recap (most recent first).
  std::size_t recap_feed_items = 20;

  void validate() const;
  bool operator==(const SimulationConfig&) const = default;

  static std::array<double, kHoursPerDay> uniform_hourly_weights(double w) {
    std::array<double, kHoursPerDay> a{};
    a.fill(w);
    return a;
  }
};

/// Topics and coalition priors shared by every agent of a run.
struct World {
  std::vector<Topic> topics = default_topics();
  CoalitionPriors priors = CoalitionPriors::defaults();
};

/// What an agent accumulated during the current day.
struct DailyMemory {
  std::vector<MemoryEntry> own;
  std::vector<MemoryEntry> seen;
  std::set<ContentId> seen_ids;
  std::map<AgentId, int> interactions;  // exposures plus replies/likes, per author
  bool active = false;

  void clear() { *this = DailyMemory{}; }
};

struct SimulationState {
  std::vector<AgentProfile> population;  // ascending agent_id
  SocialGraph graph;
  ContentStore content;
  std::vector<Event> events;
  Tick now;
  std::vector<DailyMemory> memory;  // parallel to population
};

SocialGraph init_network(std::span<const AgentProfile> population, NetworkInit strategy);

/// Each agent is included independently with probability
/// hourly_weights[hour] * activity; result in population order.
std::vector<AgentId> sample_active_users(std::span<const AgentProfile> population, int hour,
                                         std::span<const double, kHoursPerDay> hourly_weights,
                                         Rng& rng);

struct ActionChoice {
  Action action = Action::None;
  std::optional<ContentId> content;  // comment / like target
  std::optional<AgentId> target;     // author of target content, or the (un)followed agent
};

/// Samples from the weights renormalised over feasible actions: comment and
/// like need a non-empty feed, follow needs a feed author not yet followed,
/// unfollow needs a followee. Comment and like targets are uniform over the
/// feed; follow picks the most interacted-with unfollowed feed author;
/// unfollow picks the least interacted-with followee (ties by agent_id).
ActionChoice choose_action(const AgentProfile& profile, std::span<const FeedItem> feed,
                           const ActionWeights& weights, const std::set<AgentId>& followees,
                           const std::map<AgentId, int>& interactions, Rng& rng);

struct SimulationResult {
  std::vector<Event> events;
  SocialGraph initial_graph;
  /// Day 0 is the initial state; day d >= 1 is the state after day d's update.
  std::vector<GraphSnapshot> graph_snapshots;
  std::vector<OpinionSnapshot> opinion_snapshots;
  std::vector<AgentProfile> final_population;
  ContentStore content;
  SocialGraph final_graph;
};

class Simulation {
 public:
  /// Validates everything up front; throws before any mutation.
  Simulation(SimulationConfig config, std::vector<AgentProfile> population, World world,
             AgentDriver& driver);

  /// One hourly round of the current day.
  void run_hour(int hour);
  /// Opinion revision for every agent active today; clears daily memory.
  void end_of_day_update();
  /// 24 rounds followed by the end-of-day update; advances the day.
  void run_day();
  /// All configured days, with day snapshots.
  SimulationResult run();

  const SimulationState& state() const noexcept { return state_; }
  const SimulationConfig& config() const noexcept { return config_; }
  const World& world() const noexcept { return world_; }
  int current_day() const noexcept { return day_; }

  /// Own content of the day plus the most recent recap_feed_items feed
  /// items, chronologically.
  std::vector<MemoryEntry> recap(std::size_t agent_index) const;

 private:
  void act(std::size_t agent_index);
  void emit(EventKind kind, const AgentId& actor, std::optional<AgentId> target,
            std::optional<ContentId> content, json payload);
  void remember_feed(std::size_t agent_index, std::span<const FeedItem> feed);
  ContentId next_content_id();
  std::size_t index_of(const AgentId& id) const;
  std::vector<Topic> touched_topics(std::span<const MemoryEntry> recap) const;

  SimulationConfig config_;
  World world_;
  AgentDriver& driver_;
  SimulationState state_;
  SocialGraph initial_graph_;
  Rng rng_;
  int day_ = 0;
  int seq_ = 0;
  std::uint64_t content_counter_ = 0;
  std::map<AgentId, std::size_t> index_;
};

SimulationResult run_simulation(const SimulationConfig& config,
                                std::vector<AgentProfile> population, const World& world,
                                AgentDriver& driver);

}  // namespace polisim
