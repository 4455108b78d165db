#pragma once

// JSON (de)serialization of configuration and run artifacts.
//
// *_from_json functions start from a base value and override only the keys
// present, so a partial document layers over defaults. Unknown keys raise
// ConfigError.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "polisim/agent_driver.hpp"
#include "polisim/domain.hpp"
#include "polisim/engine.hpp"
#include "polisim/fj.hpp"
#include "polisim/recommender.hpp"
#include "polisim/seeding.hpp"

namespace polisim {

json to_json(const RecommenderConfig& cfg);
RecommenderConfig recommender_config_from_json(const json& j, RecommenderConfig base = {});

json to_json(const DriverConfig& cfg);
DriverConfig driver_config_from_json(const json& j, DriverConfig base);

json to_json(const ActionWeights& w);
ActionWeights action_weights_from_json(const json& j, ActionWeights base = {});

json to_json(const SimulationConfig& cfg);
SimulationConfig simulation_config_from_json(const json& j, SimulationConfig base);

json to_json(const PopulationConfig& cfg);
PopulationConfig population_config_from_json(const json& j, PopulationConfig base = {});

json to_json(std::span<const Topic> topics);
std::vector<Topic> topics_from_json(const json& j);

json to_json(const CoalitionPriors& priors);
CoalitionPriors priors_from_json(const json& j);

json to_json(const AgentProfile& profile);
AgentProfile profile_from_json(const json& j);
json population_to_json(std::span<const AgentProfile> population);
std::vector<AgentProfile> population_from_json(const json& j);

json to_json(const SocialGraph& graph);
SocialGraph graph_from_json(const json& j);

/// One day of a run: {"day", "graph": {"nodes", "edges"}, "opinions": {agent: {topic: score}}}.
json snapshot_to_json(const GraphSnapshot& graph, const OpinionSnapshot& opinions);
std::pair<GraphSnapshot, OpinionSnapshot> snapshot_from_json(const json& j);

/// Friedkin-Johnsen baseline settings; lambda is applied uniformly.
struct FJSettings {
  double lambda = 0.5;
  double tolerance = 1e-8;
  std::size_t max_iters = 10000;
  std::size_t steps_per_day = 0;
  bool parallel = true;

  void validate() const;
  FJParams params(std::size_t agents) const;
  bool operator==(const FJSettings&) const = default;
};

json to_json(const FJSettings& s);
FJSettings fj_settings_from_json(const json& j, FJSettings base = {});

struct ExperimentConfig {
  SimulationConfig simulation;
  PopulationConfig population;
  std::vector<Topic> topics = default_topics();
  CoalitionPriors priors = CoalitionPriors::defaults();
  /// Seed-record JSON-lines file; a synthetic corpus is generated when unset.
  std::optional<std::string> seeds_path;
  std::size_t synthetic_seed_count = 1000;
  std::optional<std::string> reference_path;
  std::string out_dir = "out";
  int runs = 10;
  /// Expand {empty, fully_connected} x {both recommenders} into conditions.
  bool matrix = false;
  int jobs = 1;
  FJSettings fj;

  void validate() const;
  bool operator==(const ExperimentConfig&) const = default;
};

json to_json(const ExperimentConfig& cfg);
ExperimentConfig experiment_config_from_json(const json& j, ExperimentConfig base = {});
/// Relative seeds_path / reference_path values resolve against the file's directory.
ExperimentConfig load_experiment_config(const std::filesystem::path& path,
                                        ExperimentConfig base = {});

json read_json_file(const std::filesystem::path& path);
/// Pretty-printed with a trailing newline.
void write_json_file(const std::filesystem::path& path, const json& j);

}  // namespace polisim
