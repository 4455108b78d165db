#pragma once

// Random platform states and small helpers shared by the test binaries.

#include <algorithm>
#include <string>
#include <vector>

#include "polisim/domain.hpp"
#include "polisim/rng.hpp"

namespace polisim::testing {

inline std::vector<AgentId> agent_ids(std::size_t n) {
  std::vector<AgentId> ids;
  for (std::size_t i = 0; i < n; ++i) {
    ids.push_back("u" + std::string(i < 10 ? "0" : "") + std::to_string(i));
  }
  return ids;
}

struct PlatformState {
  std::vector<AgentId> agents;
  SocialGraph graph;
  ContentStore content;
  Tick now;
};

/// Random follows, posts and comments (with likes) spread over `hours`,
/// content appended in tick order like the engine does.
inline PlatformState random_state(Rng& rng, std::size_t agents = 12, std::size_t items = 60,
                                  int hours = 72) {
  PlatformState s;
  s.agents = agent_ids(agents);
  s.graph = SocialGraph(s.agents);
  for (const auto& a : s.agents) {
    for (const auto& b : s.agents) {
      if (a != b && rng.bernoulli(0.3)) s.graph.follow(a, b);
    }
  }
  std::vector<int> hour_of(items);
  for (auto& h : hour_of) h = static_cast<int>(rng.index(static_cast<std::size_t>(hours)));
  std::sort(hour_of.begin(), hour_of.end());
  for (std::size_t i = 0; i < items; ++i) {
    const Tick t{hour_of[i] / 24, hour_of[i] % 24};
    ContentItem item;
    item.content_id = "c" + std::to_string(i);
    item.author = s.agents[rng.index(agents)];
    item.topic_id = "nuclear";
    item.text = "t" + std::to_string(i);
    item.tick = t;
    item.like_count = static_cast<std::int64_t>(rng.index(4));
    if (i > 0 && rng.bernoulli(0.3)) {
      item.kind = ContentKind::Comment;
      item.parent = "c" + std::to_string(rng.index(i));
    }
    s.content.add(item);
  }
  s.now = Tick{(hours - 1) / 24, (hours - 1) % 24};
  return s;
}

}  // namespace polisim::testing
