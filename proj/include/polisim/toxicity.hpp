#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "polisim/domain.hpp"

namespace polisim {

struct ToxicityScore {
  double value = 0.0;  // in [0, 1]
};

class ToxicityScorer {
 public:
  virtual ~ToxicityScorer() = default;
  virtual ToxicityScore score(const ContentId& content_id, std::string_view text) const = 0;
};

/// Lexicon-hit share of whitespace tokens. Not a semantic classifier: it only
/// recognises marker words, which makes the pipeline testable offline.
class HeuristicScorer : public ToxicityScorer {
 public:
  HeuristicScorer();
  explicit HeuristicScorer(std::vector<std::string> lexicon);

  ToxicityScore score(const ContentId& content_id, std::string_view text) const override;

  static std::vector<std::string> default_lexicon();

 private:
  std::set<std::string> lexicon_;
};

/// Precomputed scores (e.g. from an offline classifier) keyed by content_id.
/// Sidecar format: JSON-lines {"content_id", "toxicity"}.
class SidecarScorer : public ToxicityScorer {
 public:
  explicit SidecarScorer(std::map<ContentId, double> scores);

  static SidecarScorer read(std::istream& in);
  static SidecarScorer load(const std::filesystem::path& path);

  /// Throws ValidationError listing the content_id when absent.
  ToxicityScore score(const ContentId& content_id, std::string_view text) const override;

  std::size_t size() const noexcept { return scores_.size(); }

 private:
  std::map<ContentId, double> scores_;
};

/// Validates non-empty text and the [0, 1] range of the result.
ToxicityScore score_text(const ToxicityScorer& scorer, const ContentId& content_id,
                         std::string_view text);

double percentile_95(std::span<const double> scores);

}  // namespace polisim
