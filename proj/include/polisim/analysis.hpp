#pragma once

// Validation quantities over event logs and opinion snapshots: coalition
// reply matrices, reply toxicity percentiles, correlations against reference
// vectors, and per-coalition opinion trajectories. Coalitions are always
// ordered as kCoalitions.

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "polisim/domain.hpp"
#include "polisim/stats.hpp"
#include "polisim/toxicity.hpp"

namespace polisim {

inline constexpr std::size_t kNumCoalitions = 4;

using CoalitionMap = std::map<AgentId, Coalition>;
CoalitionMap coalition_map(std::span<const AgentProfile> population);

/// A value that may be undefined (no data for that coalition pair).
using MaybeValue = std::optional<double>;

struct InteractionMatrix {
  std::array<std::array<double, kNumCoalitions>, kNumCoalitions> counts{};
  /// Row proportions; zero in undefined rows.
  std::array<std::array<double, kNumCoalitions>, kNumCoalitions> proportions{};
  std::array<bool, kNumCoalitions> row_defined{};

  double total() const noexcept;
  static InteractionMatrix from_counts(
      const std::array<std::array<double, kNumCoalitions>, kNumCoalitions>& counts);
};

/// Replies only, from the commenter's coalition to the parent author's
/// coalition (the event target).
InteractionMatrix interaction_matrix(std::span<const Event> events, const CoalitionMap& coalitions);

/// Sums the counts of several runs and renormalises.
InteractionMatrix aggregate(std::span<const InteractionMatrix> matrices);

/// Diagonal, in coalition order; undefined rows give missing entries.
std::vector<MaybeValue> in_group_vector(const InteractionMatrix& m);
/// Off-diagonal entries row-major (from, to), 12 values.
std::vector<MaybeValue> out_group_vector(const InteractionMatrix& m);

/// (from, to) pairs in out_group_vector order.
std::vector<std::pair<Coalition, Coalition>> out_group_pairs();

/// Sample Pearson correlation; nullopt when either input is constant.
/// Throws ValidationError on length mismatch or fewer than two values.
std::optional<double> pearson(std::span<const double> a, std::span<const double> b);

struct Correlation {
  std::optional<double> r;
  std::size_t n = 0;  // positions where both inputs are defined
};

/// Drops positions where either side is missing, then correlates.
Correlation pearson_pairwise(std::span<const MaybeValue> a, std::span<const MaybeValue> b);

/// Reply toxicity scores grouped by (from, to) coalition.
struct ReplyToxicity {
  std::array<std::array<std::vector<double>, kNumCoalitions>, kNumCoalitions> scores;

  void append(const ReplyToxicity& other);
};

ReplyToxicity collect_reply_toxicity(std::span<const Event> events, const ToxicityScorer& scorer,
                                     const CoalitionMap& coalitions);

struct ToxicityVectors {
  std::vector<MaybeValue> in_group;   // 4
  std::vector<MaybeValue> out_group;  // 12, row-major off-diagonal
};

/// 95th percentile of reply toxicity per coalition pair.
ToxicityVectors toxicity_vectors(const ReplyToxicity& replies);
ToxicityVectors toxicity_vectors(std::span<const Event> events, const ToxicityScorer& scorer,
                                 const CoalitionMap& coalitions);

/// Empirical vectors with the same orientation as the simulated ones.
/// JSON keys: in_group (4), out_group (12), toxicity_in_group (4),
/// toxicity_out_group (12); entries may be null.
struct ReferenceData {
  std::vector<MaybeValue> in_group;
  std::vector<MaybeValue> out_group;
  std::vector<MaybeValue> toxicity_in_group;
  std::vector<MaybeValue> toxicity_out_group;
};

ReferenceData reference_from_json(const json& j);
ReferenceData load_reference(const std::filesystem::path& path);

/// One run's opinion snapshots together with its coalition assignment.
struct RunOpinions {
  std::vector<OpinionSnapshot> snapshots;
  CoalitionMap coalitions;
};

struct TrajectoryPoint {
  int day = 0;
  std::string topic_id;
  Coalition coalition = Coalition::Right;
  double median = 0.0;
  ConfidenceInterval ci;
  std::size_t n = 0;
};

/// Median and bootstrap CI of member scores per (day, topic, coalition),
/// pooling the members of every run that has that day. Coalitions without
/// members produce no rows.
std::vector<TrajectoryPoint> opinion_trajectories(std::span<const RunOpinions> runs,
                                                  std::span<const Topic> topics,
                                                  const BootstrapConfig& bootstrap = {});

struct OpinionShift {
  std::string topic_id;
  Coalition coalition = Coalition::Right;
  double initial_display = 0.0;
  double final_display = 0.0;
};

/// Day-0 and last-day coalition medians on the display scale.
/// Throws ValidationError when a run has fewer than two snapshots.
std::vector<OpinionShift> opinion_shifts(std::span<const RunOpinions> runs,
                                         std::span<const Topic> topics);

}  // namespace polisim
