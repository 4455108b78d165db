#include <gtest/gtest.h>

#include <sstream>

#include "polisim/agent_driver.hpp"
#include "polisim/errors.hpp"
#include "polisim/toxicity.hpp"

using namespace polisim;

TEST(HeuristicScorer, LexiconShare) {
  const HeuristicScorer s;
  EXPECT_EQ(s.score("c", "a calm and civil remark").value, 0.0);
  EXPECT_DOUBLE_EQ(s.score("c", "you IDIOT, liar!").value, 2.0 / 3.0);
  EXPECT_EQ(s.score("c", "grr grr").value, 1.0);
  EXPECT_EQ(s.score("c", "same text").value, s.score("other", "same text").value);
}

TEST(HeuristicScorer, NeutralPaddingNeverRaisesScore) {
  const HeuristicScorer s;
  std::string text = "grr clown";
  double prev = s.score("c", text).value;
  for (int i = 0; i < 20; ++i) {
    text += " word";
    const double next = s.score("c", text).value;
    EXPECT_LE(next, prev);
    prev = next;
  }
}

TEST(HeuristicScorer, CustomLexicon) {
  const HeuristicScorer s({"Bad"});
  EXPECT_DOUBLE_EQ(s.score("c", "bad good").value, 0.5);
  EXPECT_EQ(s.score("c", "grr").value, 0.0);
}

TEST(HeuristicScorer, HighToxicityStubText) {
  AgentProfile p;
  p.agent_id = "a000";
  p.coalition = Coalition::Right;
  p.opinions = initial_opinions(p.coalition, default_topics(), CoalitionPriors::defaults());
  const HeuristicScorer s;
  for (double t : {2.0 / 3.0, 0.8, 0.95, 1.0}) {
    p.target_toxicity = t;
    for (const auto& topic : default_topics()) {
      const auto text = stub_decide_text(p, ContentKind::Comment, topic, "Someone Else", 9);
      EXPECT_GE(score_text(s, "c", text).value, 0.66) << text;
    }
  }
}

TEST(SidecarScorer, ReadsJsonLines) {
  std::stringstream in("{\"content_id\":\"c1\",\"toxicity\":0.25}\n\n{\"content_id\":\"c2\",\"toxicity\":1}\n");
  const auto s = SidecarScorer::read(in);
  EXPECT_EQ(s.size(), 2u);
  EXPECT_EQ(s.score("c1", "ignored").value, 0.25);
  try {
    s.score("c9", "x");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("c9"), std::string::npos);
  }
  std::stringstream bad("{\"content_id\":\"c1\",\"toxicity\":1.5}\n");
  EXPECT_THROW(SidecarScorer::read(bad), ValidationError);
}

TEST(ScoreText, RejectsEmptyText) {
  const HeuristicScorer s;
  EXPECT_THROW(score_text(s, "c", ""), ValidationError);
}

TEST(Percentile95, Examples) {
  std::vector<double> v;
  for (int i = 0; i < 100; ++i) v.push_back(i / 100.0);
  EXPECT_NEAR(percentile_95(v), 0.9405, 1e-12);
  const std::vector<double> equal(17, 0.3);
  EXPECT_DOUBLE_EQ(percentile_95(equal), 0.3);
  const std::vector<double> one{0.7};
  EXPECT_DOUBLE_EQ(percentile_95(one), 0.7);
  const std::vector<double> none;
  EXPECT_THROW(percentile_95(none), ValidationError);
}

TEST(Percentile95, BoundedAndMonotone) {
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(1 + rng.index(50));
    for (double& x : v) x = rng.uniform();
    const double p = percentile_95(v);
    EXPECT_GE(p, *std::min_element(v.begin(), v.end()));
    EXPECT_LE(p, *std::max_element(v.begin(), v.end()));
    auto w = v;
    for (double& x : w) x += rng.uniform() * 0.1;
    EXPECT_GE(percentile_95(w), p);
  }
}
