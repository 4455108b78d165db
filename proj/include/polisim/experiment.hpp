#pragma once

// Batch workflow behind the command-line tool: simulation runs, the
// Friedkin-Johnsen baseline over their snapshots, analysis CSVs and the
// LLM-vs-FJ comparison table.
//
// Layout of an output directory:
//   config.resolved.json
//   [<network_init>__<recommender>/]run_<NN>/
//       config.json  population.json  events.jsonl  snapshots/day_<d>.json
//       fj_trajectories.csv  (after `fj`)
//   fj_coalition_trajectories.csv  fj_config.json  (after `fj`)

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "polisim/analysis.hpp"
#include "polisim/config.hpp"
#include "polisim/engine.hpp"

namespace polisim {

struct Condition {
  NetworkInit network_init = NetworkInit::Empty;
  RecommenderKind recommender = RecommenderKind::ReverseChronoFollowersPopularity;

  /// "<network_init>__<recommender>".
  std::string name() const;
  bool operator==(const Condition&) const = default;
};

/// The 2x2 matrix when cfg.matrix, else the single configured condition.
std::vector<Condition> experiment_conditions(const ExperimentConfig& cfg);

std::filesystem::path run_directory(const ExperimentConfig& cfg, const Condition& condition,
                                    int run_index);

/// Seed corpus for the experiment: the seeds file or the synthetic corpus.
std::vector<SeedRecord> experiment_seeds(const ExperimentConfig& cfg);

/// Per-run simulation config: condition applied, seed = base + run_index.
SimulationConfig run_simulation_config(const ExperimentConfig& cfg, const Condition& condition,
                                       int run_index);

std::vector<AgentProfile> run_population(const ExperimentConfig& cfg,
                                         std::span<const SeedRecord> seeds, int run_index);

/// Writes config.json, population.json, events.jsonl and the day snapshots.
void write_run_artifacts(const std::filesystem::path& dir, const SimulationConfig& sim,
                         std::span<const AgentProfile> initial_population,
                         const SimulationResult& result);

/// Every configured (condition, run); fails before any run when the output
/// directory cannot be written.
void cmd_run(const ExperimentConfig& cfg);

/// A run directory read back from disk.
struct RunArtifacts {
  std::filesystem::path dir;
  SimulationConfig config;
  std::vector<AgentProfile> population;
  std::vector<GraphSnapshot> graphs;       // ascending day
  std::vector<OpinionSnapshot> opinions;  // ascending day

  std::string condition() const;
};

/// Run directories (those containing config.json) below root, sorted.
std::vector<std::filesystem::path> discover_runs(const std::filesystem::path& root);

/// Throws IoError when the snapshots directory is missing or empty.
RunArtifacts load_run(const std::filesystem::path& dir);

/// FJ trajectories of one run; day-0 snapshot stances are x0 and days 1..D
/// use that day's graph. One result per topic, in topic order.
std::vector<std::vector<FJDayResult>> fj_for_run(const RunArtifacts& run,
                                                 std::span<const Topic> topics,
                                                 const FJSettings& settings);

/// Per run fj_trajectories.csv plus the per-condition coalition medians.
void cmd_fj(const ExperimentConfig& cfg, const std::filesystem::path& root);

struct AnalyzeOptions {
  std::vector<std::filesystem::path> events;
  std::optional<std::filesystem::path> reference;
  std::optional<std::filesystem::path> toxicity_sidecar;
  std::filesystem::path out = "analysis";
  std::vector<Topic> topics = default_topics();
  BootstrapConfig bootstrap;
  int jobs = 1;
};

void cmd_analyze(const AnalyzeOptions& options);

struct CompareOptions {
  std::filesystem::path llm;
  std::filesystem::path fj;
  std::filesystem::path out = "compare.csv";
  bool display_scale = false;
};

void cmd_compare(const CompareOptions& options);

}  // namespace polisim
