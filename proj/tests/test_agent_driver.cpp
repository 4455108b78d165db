#include <gtest/gtest.h>

#include <httplib.h>

#include <atomic>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "polisim/agent_driver.hpp"
#include "polisim/errors.hpp"
#include "polisim/toxicity.hpp"

using namespace polisim;

namespace {

AgentProfile profile(Coalition c, double toxicity) {
  AgentProfile p;
  p.agent_id = "a007";
  p.name = "Luca Romano";
  p.age = 41;
  p.gender = "male";
  p.big_five = {"curious", "careful", "outgoing", "friendly", "steady"};
  p.coalition = c;
  p.target_toxicity = toxicity;
  p.opinions = initial_opinions(c, default_topics(), CoalitionPriors::defaults());
  return p;
}

std::size_t word_count(const std::string& s) {
  std::istringstream in(s);
  std::string w;
  std::size_t n = 0;
  while (in >> w) ++n;
  return n;
}

// Local chat server answering POST /api/chat; the handler decides the reply.
class MockServer {
 public:
  explicit MockServer(httplib::Server::Handler handler) {
    server_.Post("/api/chat", std::move(handler));
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~MockServer() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

DriverConfig remote(const std::string& url) {
  DriverConfig cfg;
  cfg.mode = DriverMode::Remote;
  cfg.endpoint_url = url;
  cfg.model_name = "test-model";
  cfg.max_retries = 2;
  cfg.timeout = std::chrono::milliseconds(2000);
  return cfg;
}

}  // namespace

TEST(StubText, EmbedsLabelAndStaysShort) {
  const auto topics = default_topics();
  const auto p = profile(Coalition::Right, 0.2);
  const auto text = stub_decide_text(p, ContentKind::Post, find_topic(topics, "nuclear"), "", 1);
  EXPECT_NE(text.find("STRONGLY_SUPPORTIVE"), std::string::npos);
  EXPECT_NE(text.find("[right]"), std::string::npos);
  EXPECT_NE(text.find("nuclear"), std::string::npos);
  EXPECT_EQ(text, stub_decide_text(p, ContentKind::Post, find_topic(topics, "nuclear"), "", 1));
}

TEST(StubText, LengthCapAndToxicityShare) {
  const auto topics = default_topics();
  const HeuristicScorer scorer;
  for (double t : {0.0, 0.1, 0.3, 0.5, 0.7, 0.9, 1.0}) {
    for (Coalition c : kCoalitions) {
      const auto p = profile(c, t);
      for (const auto& topic : topics) {
        for (ContentKind kind : {ContentKind::Post, ContentKind::Comment}) {
          const auto text = stub_decide_text(p, kind, topic, "Anna Bianchi", 5);
          EXPECT_LE(text.size(), kMaxTweetLength);
          const double share = scorer.score("x", text).value;
          if (t == 0.0) EXPECT_EQ(share, 0.0);
          if (t <= 0.7) EXPECT_GE(share, t - 1e-12) << text;
        }
      }
    }
  }
}

TEST(StubText, CommentsAddressTheAuthor) {
  const auto p = profile(Coalition::M5S, 0.0);
  const auto text = stub_decide_text(p, ContentKind::Comment, default_topics()[0], "Anna Bianchi", 3);
  EXPECT_EQ(text.rfind("@AnnaBianchi ", 0), 0u);
}

TEST(StubOpinionUpdate, RoundTripsAllLabelsAndTopics) {
  const auto topics = default_topics();
  for (StanceLabel l : kStanceLabels) {
    std::vector<OpinionUpdateEntry> entries;
    for (const auto& t : topics) entries.push_back({t.id, l, "thinking about " + t.name});
    const auto parsed = parse_opinion_update(render_stub_opinion_update(entries, topics), topics);
    EXPECT_EQ(parsed.entries, entries);
    EXPECT_TRUE(parsed.missing_topics.empty());
  }
}

TEST(StubDriver, DriftsTowardObservedStances) {
  const auto topics = default_topics();
  const auto priors = CoalitionPriors::defaults();
  const auto p = profile(Coalition::Right, 0.0);  // civil_rights: STRONGLY_OPPOSED
  std::vector<MemoryEntry> memory{{Tick{0, 1}, Tick{0, 1}, "c1", "a009", "Sara", ContentKind::Post,
                                   "civil_rights", "[m5s] civil_rights STRONGLY_SUPPORTIVE facts", false}};
  const std::vector<Topic> touched{topics[0]};
  StubDriver always(1, 1.0), never(1, 0.0);
  DriverContext ctx{p, topics, priors, Tick{0, 23}};
  auto moved = parse_opinion_update(always.update_opinions(ctx, touched, memory, 0), touched);
  EXPECT_EQ(moved.entries.at(0).label, StanceLabel::Opposed);
  auto kept = parse_opinion_update(never.update_opinions(ctx, touched, memory, 0), touched);
  EXPECT_EQ(kept.entries.at(0).label, StanceLabel::StronglyOpposed);
}

TEST(StubDriver, OwnContentDoesNotCount) {
  std::vector<MemoryEntry> memory{
      {Tick{0, 1}, Tick{0, 1}, "c1", "a007", "me", ContentKind::Post, "nuclear", "x NEUTRAL y", true},
      {Tick{0, 2}, Tick{0, 2}, "c2", "a001", "o", ContentKind::Post, "nuclear", "x OPPOSED y", false},
      {Tick{0, 2}, Tick{0, 2}, "c3", "a001", "o", ContentKind::Post, "immigration", "SUPPORTIVE", false}};
  EXPECT_EQ(observed_stances(memory, "nuclear"), std::vector<StanceLabel>{StanceLabel::Opposed});
}

TEST(Generate, StubDeterministic) {
  DriverConfig cfg;
  EXPECT_EQ(generate(cfg, "sys", "user", 4), generate(cfg, "sys", "user", 4));
  EXPECT_NE(generate(cfg, "sys", "user", 4), generate(cfg, "sys", "user", 5));
  EXPECT_NE(generate(cfg, "sys", "user", 4), generate(cfg, "sys", "other", 4));
}

TEST(DriverConfig, Validation) {
  DriverConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.temperature = 0.0;
  EXPECT_THROW(cfg.validate(), ValidationError);
  cfg.temperature = 2.0;
  cfg.timeout = std::chrono::milliseconds(0);
  EXPECT_THROW(cfg.validate(), ValidationError);
  EXPECT_EQ(parse_driver_mode("llm"), DriverMode::Remote);
  EXPECT_THROW(parse_driver_mode("gpt"), ValidationError);
  EXPECT_EQ(DriverConfig{}.timeout, std::chrono::milliseconds(120000));
  EXPECT_EQ(DriverConfig{}.temperature, 0.9);
}

TEST(DriverConfig, EnvironmentDefaults) {
  setenv("SIM_LLM_ENDPOINT", "http://example.invalid:9999", 1);
  setenv("SIM_LLM_MODEL", "llama-test", 1);
  const auto cfg = DriverConfig::from_env();
  EXPECT_EQ(cfg.endpoint_url, "http://example.invalid:9999");
  EXPECT_EQ(cfg.model_name, "llama-test");
  unsetenv("SIM_LLM_ENDPOINT");
  unsetenv("SIM_LLM_MODEL");
}

TEST(CleanTweet, TrimsQuotesAndCaps) {
  EXPECT_EQ(clean_tweet("  \"hello\"\n"), "hello");
  const std::string long_text(400, 'x');
  EXPECT_EQ(clean_tweet(long_text).size(), 280u);
  std::string accented;
  for (int i = 0; i < 300; ++i) accented += "\xC3\xA8";  // U+00E8
  EXPECT_EQ(clean_tweet(accented).size(), 560u);
}

TEST(ChatClient, SendsOllamaStyleRequest) {
  json seen;
  MockServer server([&](const httplib::Request& req, httplib::Response& res) {
    seen = json::parse(req.body);
    res.set_content(R"({"message":{"role":"assistant","content":"ciao"}})", "application/json");
  });
  ChatClient client(remote(server.url()));
  EXPECT_EQ(client.generate("system text", "user text"), "ciao");
  EXPECT_EQ(seen["model"], "test-model");
  EXPECT_EQ(seen["stream"], false);
  EXPECT_DOUBLE_EQ(seen["options"]["temperature"].get<double>(), 0.9);
  ASSERT_EQ(seen["messages"].size(), 2u);
  EXPECT_EQ(seen["messages"][0]["role"], "system");
  EXPECT_EQ(seen["messages"][0]["content"], "system text");
  EXPECT_EQ(seen["messages"][1]["role"], "user");
}

TEST(ChatClient, RetriesTransientFailures) {
  std::atomic<int> calls{0};
  MockServer server([&](const httplib::Request&, httplib::Response& res) {
    if (++calls < 3) {
      res.status = 503;
      return;
    }
    res.set_content(R"({"message":{"content":"ok"}})", "application/json");
  });
  ChatClient client(remote(server.url()));
  EXPECT_EQ(client.generate("s", "u"), "ok");
  EXPECT_EQ(calls.load(), 3);
}

TEST(ChatClient, GivesUpAfterMaxRetries) {
  std::atomic<int> calls{0};
  MockServer server([&](const httplib::Request&, httplib::Response& res) {
    ++calls;
    res.status = 500;
  });
  ChatClient client(remote(server.url()));
  EXPECT_THROW(client.generate("s", "u"), DriverError);
  EXPECT_EQ(calls.load(), 3);
}

TEST(ChatClient, MalformedReplyIsDriverError) {
  MockServer server([&](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"unexpected":true})", "application/json");
  });
  auto cfg = remote(server.url());
  cfg.max_retries = 0;
  ChatClient client(cfg);
  EXPECT_THROW(client.generate("s", "u"), DriverError);
}

TEST(ChatClient, UnreachableEndpoint) {
  auto cfg = remote("http://127.0.0.1:1");
  cfg.timeout = std::chrono::milliseconds(300);
  EXPECT_THROW(generate(cfg, "s", "u"), DriverError);
}

TEST(ChatClient, BoundsConcurrentRequests) {
  std::atomic<int> active{0}, peak{0};
  MockServer server([&](const httplib::Request&, httplib::Response& res) {
    const int now = ++active;
    int prev = peak.load();
    while (now > prev && !peak.compare_exchange_weak(prev, now)) {
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(30));
    --active;
    res.set_content(R"({"message":{"content":"ok"}})", "application/json");
  });
  auto cfg = remote(server.url());
  cfg.max_in_flight = 2;
  ChatClient client(cfg);
  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i) threads.emplace_back([&] { EXPECT_EQ(client.generate("s", "u"), "ok"); });
  for (auto& t : threads) t.join();
  EXPECT_LE(peak.load(), 2);
  EXPECT_GE(peak.load(), 1);
}

TEST(LlmDriver, PostsAreCleanedAndCapped) {
  MockServer server([&](const httplib::Request&, httplib::Response& res) {
    json reply{{"message", {{"content", "  \"" + std::string(300, 'a') + "\"  "}}}};
    res.set_content(reply.dump(), "application/json");
  });
  LlmDriver driver(remote(server.url()));
  const auto topics = default_topics();
  const auto priors = CoalitionPriors::defaults();
  const auto p = profile(Coalition::CentreLeft, 0.5);
  DriverContext ctx{p, topics, priors, Tick{0, 0}};
  const auto text = driver.write_post(ctx, topics[1]);
  EXPECT_EQ(text, std::string(280, 'a'));
  EXPECT_GT(word_count(text), 0u);
}
