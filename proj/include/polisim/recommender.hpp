#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "polisim/domain.hpp"
#include "polisim/rng.hpp"

namespace polisim {

enum class RecommenderKind { ReverseChronoFollowersPopularity, ContentRecSys };

std::string_view recommender_key(RecommenderKind kind) noexcept;
RecommenderKind parse_recommender(std::string_view text);

struct RecommenderConfig {
  RecommenderKind kind = RecommenderKind::ReverseChronoFollowersPopularity;
  std::size_t feed_limit = 10;
  /// Fraction of feed slots reserved for recent content by non-followed authors.
  double external_fraction = 0.2;
  int recency_window_hours = 48;
  /// Rank followee content by likes first and recency second.
  bool popularity_primary = false;

  void validate() const;
  bool operator==(const RecommenderConfig&) const = default;
};

struct FeedRequest {
  AgentId agent_id;
  std::size_t limit = 10;
  Tick now;
};

struct FeedItem {
  ContentItem item;
  bool external = false;  // filled an exposure slot rather than a followee slot
};

/// Read-only view of the platform used for feed construction.
struct PlatformView {
  const SocialGraph& graph;
  const ContentStore& content;
};

/// Followee content from the recency window, newest first with like_count
/// breaking ties (or likes first when popularity_primary), followed by
/// floor(external_fraction * limit) uniformly sampled recent items from
/// non-followed authors.
std::vector<FeedItem> reverse_chrono_followers_popularity(const PlatformView& view,
                                                          const FeedRequest& request,
                                                          const RecommenderConfig& cfg, Rng& rng);

/// Uniform sample without replacement over all content not authored by the
/// requester; min(limit, available) items.
std::vector<FeedItem> random_content(const PlatformView& view, const FeedRequest& request, Rng& rng);

std::vector<FeedItem> build_feed(const PlatformView& view, const FeedRequest& request,
                                 const RecommenderConfig& cfg, Rng& rng);

}  // namespace polisim
