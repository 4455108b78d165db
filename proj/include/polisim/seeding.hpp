#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "polisim/domain.hpp"
#include "polisim/rng.hpp"

namespace polisim {

/// One empirical user from the source corpus.
struct SeedRecord {
  std::string user_id;
  std::int64_t n_posts = 0;
  Coalition coalition = Coalition::Right;
  double avg_toxicity = 0.0;

  bool operator==(const SeedRecord&) const = default;
};

/// JSON-lines {"user_id","n_posts","coalition","avg_toxicity"}.
std::vector<SeedRecord> read_seed_records(std::istream& in);
std::vector<SeedRecord> load_seed_records(const std::filesystem::path& path);
void write_seed_records(std::ostream& out, std::span<const SeedRecord> seeds);

/// Deterministic synthetic corpus (heavy-tailed post counts, per-coalition
/// toxicity levels) for fixtures and runs without an empirical file.
std::vector<SeedRecord> synthetic_seed_records(std::size_t count, std::uint64_t seed);

/// 99.5th percentile of post counts (linear interpolation between closest ranks).
double activity_threshold(std::span<const std::int64_t> post_counts);

/// min(log(1 + n_posts) / log(1 + n995), 1).
double normalize_activity(std::int64_t n_posts, double n995);

/// Probabilities indexed in kCoalitions order.
using CoalitionDistribution = std::array<double, 4>;

/// Uniform over the four coalitions.
CoalitionDistribution uniform_coalition_distribution();

/// Throws ValidationError unless entries are non-negative and sum to 1 within 1e-9.
void validate_distribution(const CoalitionDistribution& dist);

Coalition sample_coalition(const CoalitionDistribution& dist, Rng& rng);

struct TopicPrior {
  StanceLabel label = StanceLabel::Neutral;
  std::string justification;

  bool operator==(const TopicPrior&) const = default;
};

/// Per-coalition, per-topic initial stances; also the coalition principles
/// quoted in the role-play prompt.
class CoalitionPriors {
 public:
  void set(Coalition c, const std::string& topic_id, TopicPrior prior);
  const TopicPrior* find(Coalition c, const std::string& topic_id) const;
  /// Throws ValidationError naming both the coalition and the topic.
  const TopicPrior& at(Coalition c, const std::string& topic_id) const;

  /// Every coalition covers every topic.
  void validate(std::span<const Topic> topics) const;

  const std::map<Coalition, std::map<std::string, TopicPrior>>& entries() const { return priors_; }

  bool operator==(const CoalitionPriors&) const = default;

  /// Election-campaign positions of the four coalitions on the default topics.
  static CoalitionPriors defaults();

 private:
  std::map<Coalition, std::map<std::string, TopicPrior>> priors_;
};

std::vector<OpinionRecord> initial_opinions(Coalition coalition, std::span<const Topic> topics,
                                            const CoalitionPriors& priors);

/// Qualitative prompt token for an agent's target toxicity, in thirds:
/// [0, 1/3) low, [1/3, 2/3) moderate, [2/3, 1] high.
std::string_view toxicity_token(double target_toxicity);

struct AgeBand {
  int min_age = 18;
  int max_age = 60;
  double weight = 1.0;

  bool operator==(const AgeBand&) const = default;
};

struct GenderWeight {
  std::string gender;
  double weight = 1.0;

  bool operator==(const GenderWeight&) const = default;
};

struct PopulationConfig {
  std::size_t population_size = 100;
  bool sample_with_replacement = false;
  /// When set, coalitions are drawn from this distribution and a seed of the
  /// drawn coalition supplies toxicity and activity. When unset, seeds are
  /// drawn directly and the corpus proportions carry over.
  std::optional<CoalitionDistribution> coalition_distribution;
  std::vector<AgeBand> age_bands{AgeBand{18, 60, 1.0}};
  std::vector<GenderWeight> gender_weights{{"male", 1.0}, {"female", 1.0}};
  std::string nationality = "Italian";
  std::string language = "Italian";

  void validate() const;
  bool operator==(const PopulationConfig&) const = default;
};

/// Builds exactly population_size agents with ids a000, a001, ... (ascending
/// id order equals construction order). Initial opinions are frozen.
std::vector<AgentProfile> build_population(std::span<const SeedRecord> seeds,
                                           const PopulationConfig& config,
                                           std::span<const Topic> topics,
                                           const CoalitionPriors& priors, Rng& rng);

}  // namespace polisim
