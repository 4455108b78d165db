#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "polisim/domain.hpp"

namespace polisim {

/// One JSON-lines record with fields tick_day, tick_hour, seq, kind, actor,
/// target, content_id, payload (in that order; absent optionals are null).
std::string event_to_json_line(const Event& event);
Event event_from_json_line(std::string_view line);

void write_event_log(std::ostream& out, std::span<const Event> events);
std::vector<Event> read_event_log(std::istream& in);
void save_event_log(const std::filesystem::path& path, std::span<const Event> events);
std::vector<Event> load_event_log(const std::filesystem::path& path);

struct ReplayResult {
  SocialGraph graph;
  ContentStore content;
};

/// Applies post/comment/like/follow/unfollow events to `initial_graph` and an
/// empty content store. Other event kinds do not affect graph or content.
ReplayResult replay(const SocialGraph& initial_graph, std::span<const Event> events);

}  // namespace polisim
