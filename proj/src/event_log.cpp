#include "polisim/event_log.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "polisim/errors.hpp"

namespace polisim {

std::string event_to_json_line(const Event& e) {
  nlohmann::ordered_json j;
  j["tick_day"] = e.tick.day;
  j["tick_hour"] = e.tick.hour;
  j["seq"] = e.seq;
  j["kind"] = event_kind_key(e.kind);
  j["actor"] = e.actor;
  j["target"] = e.target ? nlohmann::ordered_json(*e.target) : nlohmann::ordered_json(nullptr);
  j["content_id"] =
      e.content_id ? nlohmann::ordered_json(*e.content_id) : nlohmann::ordered_json(nullptr);
  j["payload"] = e.payload;
  return j.dump();
}

Event event_from_json_line(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& err) {
    throw ValidationError(std::string("malformed event line: ") + err.what());
  }
  try {
    Event e;
    e.tick.day = j.at("tick_day").get<int>();
    e.tick.hour = j.at("tick_hour").get<int>();
    e.seq = j.at("seq").get<int>();
    e.kind = parse_event_kind(j.at("kind").get<std::string>());
    e.actor = j.at("actor").get<std::string>();
    if (!j.at("target").is_null()) e.target = j.at("target").get<std::string>();
    if (!j.at("content_id").is_null()) e.content_id = j.at("content_id").get<std::string>();
    e.payload = j.at("payload");
    return e;
  } catch (const json::exception& err) {
    throw ValidationError(std::string("invalid event record: ") + err.what());
  }
}

void write_event_log(std::ostream& out, std::span<const Event> events) {
  for (const Event& e : events) out << event_to_json_line(e) << '\n';
}

std::vector<Event> read_event_log(std::istream& in) {
  std::vector<Event> events;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    events.push_back(event_from_json_line(line));
  }
  return events;
}

void save_event_log(const std::filesystem::path& path, std::span<const Event> events) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_event_log(out, events);
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<Event> load_event_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  return read_event_log(in);
}

ReplayResult replay(const SocialGraph& initial_graph, std::span<const Event> events) {
  ReplayResult r{initial_graph, {}};
  for (const Event& e : events) {
    switch (e.kind) {
      case EventKind::Post:
      case EventKind::Comment: {
        ContentItem item;
        item.content_id = e.content_id.value();
        item.author = e.actor;
        item.kind = e.kind == EventKind::Post ? ContentKind::Post : ContentKind::Comment;
        if (e.kind == EventKind::Comment) item.parent = e.payload.at("parent").get<std::string>();
        item.topic_id = e.payload.at("topic").get<std::string>();
        item.text = e.payload.at("text").get<std::string>();
        item.tick = e.tick;
        r.content.add(std::move(item));
        break;
      }
      case EventKind::Like:
        r.content.add_like(e.content_id.value());
        break;
      case EventKind::Follow:
        r.graph.follow(e.actor, e.target.value());
        break;
      case EventKind::Unfollow:
        r.graph.unfollow(e.actor, e.target.value());
        break;
      default:
        break;
    }
  }
  return r;
}

}  // namespace polisim
