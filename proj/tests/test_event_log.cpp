#include <gtest/gtest.h>

#include <sstream>

#include "polisim/errors.hpp"
#include "polisim/event_log.hpp"

using namespace polisim;

namespace {

std::vector<Event> sample_log() {
  return {
      Event{{0, 0}, 0, EventKind::Post, "A", std::nullopt, "p1", json{{"topic", "nuclear"}, {"text", "hello"}}},
      Event{{0, 0}, 1, EventKind::Follow, "B", "A", std::nullopt, json::object()},
      Event{{0, 1}, 0, EventKind::Comment, "B", "A", "c1",
            json{{"topic", "nuclear"}, {"text", "reply"}, {"parent", "p1"}}},
      Event{{0, 1}, 1, EventKind::Like, "C", "A", "p1", json::object()},
      Event{{0, 2}, 0, EventKind::Follow, "C", "B", std::nullopt, json::object()},
      Event{{0, 3}, 0, EventKind::Unfollow, "B", "A", std::nullopt, json::object()},
      Event{{0, 23}, 0, EventKind::OpinionUpdate, "A", std::nullopt, std::nullopt,
            json{{"topic", "nuclear"}, {"label", "NEUTRAL"}, {"score", 0.0}}},
  };
}

}  // namespace

TEST(EventLog, FieldNamesAndOrder) {
  const std::string line = event_to_json_line(sample_log()[1]);
  EXPECT_EQ(line,
            R"({"tick_day":0,"tick_hour":0,"seq":1,"kind":"follow","actor":"B","target":"A",)"
            R"("content_id":null,"payload":{}})");
}

TEST(EventLog, RoundTrip) {
  auto log = sample_log();
  std::stringstream ss;
  write_event_log(ss, log);
  auto back = read_event_log(ss);
  EXPECT_EQ(back, log);
}

TEST(EventLog, RejectsMalformedLines) {
  EXPECT_ANY_THROW(event_from_json_line("{not json"));
  EXPECT_ANY_THROW(event_from_json_line(R"({"tick_day":0})"));
}

TEST(EventLog, ReplayReconstructsState) {
  SocialGraph g(std::vector<AgentId>{"A", "B", "C"});
  auto r = replay(g, sample_log());
  EXPECT_FALSE(r.graph.follows("B", "A"));
  EXPECT_TRUE(r.graph.follows("C", "B"));
  EXPECT_EQ(r.graph.edge_count(), 1u);
  ASSERT_EQ(r.content.size(), 2u);
  EXPECT_EQ(r.content.at("p1").like_count, 1);
  EXPECT_EQ(*r.content.at("c1").parent, "p1");
  EXPECT_EQ(r.content.at("c1").tick, (Tick{0, 1}));
}
