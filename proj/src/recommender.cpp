#include "polisim/recommender.hpp"

#include <algorithm>
#include <cmath>

#include "polisim/errors.hpp"

namespace polisim {

std::string_view recommender_key(RecommenderKind kind) noexcept {
  return kind == RecommenderKind::ReverseChronoFollowersPopularity
             ? "reverse_chrono_followers_popularity"
             : "content_recsys";
}

RecommenderKind parse_recommender(std::string_view text) {
  for (auto k : {RecommenderKind::ReverseChronoFollowersPopularity, RecommenderKind::ContentRecSys}) {
    if (text == recommender_key(k)) return k;
  }
  throw ValidationError("unknown recommender: '" + std::string(text) + "'");
}

void RecommenderConfig::validate() const {
  if (feed_limit < 1) throw ValidationError("feed_limit must be at least 1");
  if (!(external_fraction >= 0.0 && external_fraction <= 1.0)) {
    throw ValidationError("external_fraction outside [0, 1]");
  }
  if (recency_window_hours < 0) throw ValidationError("recency_window_hours must be >= 0");
}

namespace {

void require_agent(const PlatformView& view, const FeedRequest& request) {
  if (!view.graph.contains(request.agent_id)) {
    throw ValidationError("feed requested for unknown agent: " + request.agent_id);
  }
  if (request.limit < 1) throw ValidationError("feed limit must be at least 1");
}

// Items are stored in creation order, so walking backwards visits newest first
// and can stop at the window edge.
template <typename Fn>
void for_each_recent(const ContentStore& content, Tick now, int window_hours, Fn&& fn) {
  const auto items = content.items();
  const int horizon = now.absolute_hour() - window_hours;
  for (std::size_t i = items.size(); i-- > 0;) {
    const ContentItem& it = items[i];
    if (it.tick.absolute_hour() < horizon) break;
    if (it.tick > now) continue;
    fn(i, it);
  }
}

}  // namespace

std::vector<FeedItem> reverse_chrono_followers_popularity(const PlatformView& view,
                                                          const FeedRequest& request,
                                                          const RecommenderConfig& cfg, Rng& rng) {
  require_agent(view, request);
  const auto& followees = view.graph.followees(request.agent_id);
  const auto external_slots = static_cast<std::size_t>(
      std::floor(cfg.external_fraction * static_cast<double>(request.limit) + 1e-9));
  const std::size_t followee_slots = request.limit - std::min(external_slots, request.limit);

  std::vector<std::size_t> own_feed;
  std::vector<std::size_t> others;
  for_each_recent(view.content, request.now, cfg.recency_window_hours,
                  [&](std::size_t idx, const ContentItem& it) {
                    if (it.author == request.agent_id) return;
                    if (followees.count(it.author)) {
                      own_feed.push_back(idx);
                    } else {
                      others.push_back(idx);
                    }
                  });

  const auto items = view.content.items();
  // Creation index is the final tie-break: later content ranks first.
  auto recency_first = [&](std::size_t a, std::size_t b) {
    const ContentItem& x = items[a];
    const ContentItem& y = items[b];
    if (x.tick != y.tick) return x.tick > y.tick;
    if (x.like_count != y.like_count) return x.like_count > y.like_count;
    return a > b;
  };
  auto popularity_first = [&](std::size_t a, std::size_t b) {
    const ContentItem& x = items[a];
    const ContentItem& y = items[b];
    if (x.like_count != y.like_count) return x.like_count > y.like_count;
    if (x.tick != y.tick) return x.tick > y.tick;
    return a > b;
  };
  const std::size_t keep = std::min(followee_slots, own_feed.size());
  if (cfg.popularity_primary) {
    std::partial_sort(own_feed.begin(), own_feed.begin() + static_cast<std::ptrdiff_t>(keep),
                      own_feed.end(), popularity_first);
  } else {
    std::partial_sort(own_feed.begin(), own_feed.begin() + static_cast<std::ptrdiff_t>(keep),
                      own_feed.end(), recency_first);
  }

  std::vector<FeedItem> feed;
  feed.reserve(request.limit);
  for (std::size_t i = 0; i < keep; ++i) feed.push_back({items[own_feed[i]], false});

  // Partial Fisher-Yates over the non-followed candidates; the chosen items
  // are then shown newest first.
  const std::size_t take = std::min(external_slots, others.size());
  for (std::size_t i = 0; i < take; ++i) {
    std::swap(others[i], others[i + rng.index(others.size() - i)]);
  }
  std::sort(others.begin(), others.begin() + static_cast<std::ptrdiff_t>(take), recency_first);
  for (std::size_t i = 0; i < take; ++i) feed.push_back({items[others[i]], true});
  return feed;
}

std::vector<FeedItem> random_content(const PlatformView& view, const FeedRequest& request, Rng& rng) {
  require_agent(view, request);
  const auto items = view.content.items();
  const auto& followees = view.graph.followees(request.agent_id);
  std::vector<std::size_t> pool;
  pool.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].author != request.agent_id && items[i].tick <= request.now) pool.push_back(i);
  }
  const std::size_t take = std::min(request.limit, pool.size());
  std::vector<FeedItem> feed;
  feed.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    std::swap(pool[i], pool[i + rng.index(pool.size() - i)]);
    const ContentItem& it = items[pool[i]];
    feed.push_back({it, followees.count(it.author) == 0});
  }
  return feed;
}

std::vector<FeedItem> build_feed(const PlatformView& view, const FeedRequest& request,
                                 const RecommenderConfig& cfg, Rng& rng) {
  if (cfg.kind == RecommenderKind::ReverseChronoFollowersPopularity) {
    return reverse_chrono_followers_popularity(view, request, cfg, rng);
  }
  return random_content(view, request, rng);
}

}  // namespace polisim
