#include <gtest/gtest.h>

#include "polisim/domain.hpp"
#include "polisim/errors.hpp"

using namespace polisim;

namespace {

SocialGraph graph_of(std::initializer_list<AgentId> ids) {
  std::vector<AgentId> v(ids);
  return SocialGraph(v);
}

ContentItem post(const std::string& id, const std::string& author) {
  return ContentItem{id, author, ContentKind::Post, std::nullopt, "nuclear", "text", Tick{0, 0}, 0};
}

ContentItem comment(const std::string& id, const std::string& author, const std::string& parent) {
  return ContentItem{id, author, ContentKind::Comment, parent, "nuclear", "reply", Tick{0, 1}, 0};
}

}  // namespace

TEST(Coalition, KeysRoundTrip) {
  EXPECT_EQ(kCoalitions.size(), 4u);
  for (Coalition c : kCoalitions) {
    EXPECT_EQ(parse_coalition(coalition_key(c)), c);
    EXPECT_EQ(parse_coalition(coalition_display_name(c)), c);
  }
  EXPECT_EQ(parse_coalition("Centre-Left"), Coalition::CentreLeft);
  EXPECT_THROW(parse_coalition("greens"), ValidationError);
}

TEST(Topics, DefaultsAreValid) {
  auto topics = default_topics();
  ASSERT_EQ(topics.size(), 4u);
  EXPECT_NO_THROW(validate_topics(topics));
  EXPECT_EQ(topics[0].id, "civil_rights");
  EXPECT_EQ(topics[3].id, "reddito_di_cittadinanza");
  EXPECT_EQ(find_topic(topics, "nuclear").id, "nuclear");
  EXPECT_THROW(find_topic(topics, "taxes"), ValidationError);
}

TEST(Topics, RejectsDuplicatesAndEmptyTexts) {
  auto topics = default_topics();
  topics.push_back(topics[0]);
  EXPECT_THROW(validate_topics(topics), ValidationError);
  topics = default_topics();
  topics[1].opposed_meaning.clear();
  EXPECT_THROW(validate_topics(topics), ValidationError);
}

TEST(SocialGraph, FollowInsertsEdge) {
  auto g = graph_of({"A", "B"});
  EXPECT_TRUE(g.follow("A", "B"));
  EXPECT_TRUE(g.follows("A", "B"));
  EXPECT_FALSE(g.follows("B", "A"));
  EXPECT_EQ(g.followees("A"), (std::set<AgentId>{"B"}));
}

TEST(SocialGraph, FollowIsIdempotent) {
  auto g = graph_of({"A", "B"});
  g.follow("A", "B");
  auto once = g;
  EXPECT_FALSE(g.follow("A", "B"));
  EXPECT_EQ(g, once);
  EXPECT_EQ(g.edge_count(), 1u);
}

TEST(SocialGraph, RejectsSelfAndUnknown) {
  auto g = graph_of({"A", "B"});
  EXPECT_THROW(g.follow("A", "A"), ValidationError);
  EXPECT_THROW(g.follow("A", "Z"), ValidationError);
  EXPECT_THROW(g.unfollow("A", "A"), ValidationError);
  EXPECT_THROW(g.unfollow("Z", "A"), ValidationError);
  EXPECT_THROW(g.followees("Z"), ValidationError);
}

TEST(SocialGraph, UnfollowRemovesOrNoOps) {
  auto g = graph_of({"A", "B"});
  g.follow("A", "B");
  EXPECT_TRUE(g.unfollow("A", "B"));
  EXPECT_FALSE(g.follows("A", "B"));
  auto before = g;
  EXPECT_FALSE(g.unfollow("A", "B"));
  EXPECT_EQ(g, before);
  EXPECT_EQ(g.edge_count(), 0u);
}

TEST(SocialGraph, EmptyAndFullyConnected) {
  auto g = graph_of({"a", "b", "c", "d", "e"});
  for (const auto& n : g.nodes()) EXPECT_TRUE(g.followees(n).empty());
  for (const auto& x : g.nodes()) {
    for (const auto& y : g.nodes()) {
      if (x != y) g.follow(x, y);
    }
  }
  for (const auto& n : g.nodes()) EXPECT_EQ(g.followees(n).size(), 4u);
  EXPECT_EQ(g.edge_count(), 20u);
  EXPECT_EQ(g.edges().size(), 20u);
}

TEST(ContentStore, CommentsNeedExistingParent) {
  ContentStore store;
  store.add(post("p1", "A"));
  EXPECT_NO_THROW(store.add(comment("c1", "B", "p1")));
  EXPECT_THROW(store.add(comment("c2", "B", "missing")), ValidationError);
  EXPECT_THROW(store.add(post("p1", "A")), ValidationError);
  auto orphan = post("p2", "A");
  orphan.parent = "p1";
  EXPECT_THROW(store.add(orphan), ValidationError);
}

TEST(ContentStore, ThreadWalksToRootPost) {
  ContentStore store;
  store.add(post("p", "A"));
  store.add(comment("c1", "B", "p"));
  store.add(comment("c2", "C", "c1"));
  store.add(comment("c3", "A", "c2"));
  auto thread = store.thread("c3");
  ASSERT_EQ(thread.size(), 4u);
  EXPECT_EQ(thread.front()->content_id, "p");
  EXPECT_EQ(thread.front()->kind, ContentKind::Post);
  EXPECT_EQ(thread.back()->content_id, "c3");
}

TEST(ContentStore, LikesAccumulate) {
  ContentStore store;
  store.add(post("p", "A"));
  store.add_like("p");
  store.add_like("p");
  EXPECT_EQ(store.at("p").like_count, 2);
  EXPECT_THROW(store.add_like("nope"), ValidationError);
}

TEST(AgentProfile, InitialOpinionsFreezeOnce) {
  AgentProfile p;
  p.agent_id = "a000";
  p.opinions = {OpinionRecord{"nuclear", StanceLabel::Supportive, 0.5, "why"}};
  p.freeze_initial_opinions();
  p.opinion("nuclear").stance_score = -1.0;
  EXPECT_DOUBLE_EQ(p.initial_opinions().at(0).stance_score, 0.5);
  EXPECT_THROW(p.freeze_initial_opinions(), ValidationError);
}

TEST(AgentProfile, ValidationRanges) {
  auto topics = default_topics();
  AgentProfile p;
  p.agent_id = "a000";
  for (const auto& t : topics) p.opinions.push_back({t.id, StanceLabel::Neutral, 0.0, ""});
  EXPECT_NO_THROW(validate_profile(p, topics));
  p.age = 17;
  EXPECT_THROW(validate_profile(p, topics), ValidationError);
  p.age = 30;
  p.activity = 1.5;
  EXPECT_THROW(validate_profile(p, topics), ValidationError);
  p.activity = 0.5;
  p.opinions.pop_back();
  EXPECT_THROW(validate_profile(p, topics), ValidationError);
}

TEST(Tick, OrdersByDayThenHour) {
  EXPECT_LT((Tick{0, 23}), (Tick{1, 0}));
  EXPECT_EQ((Tick{2, 5}).absolute_hour(), 53);
}
