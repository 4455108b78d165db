#include "polisim/agent_driver.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include <httplib.h>

#include "polisim/errors.hpp"
#include "polisim/rng.hpp"

namespace polisim {

std::string_view driver_mode_key(DriverMode mode) noexcept {
  return mode == DriverMode::Stub ? "stub" : "llm";
}

DriverMode parse_driver_mode(std::string_view text) {
  if (text == "stub") return DriverMode::Stub;
  if (text == "llm" || text == "remote") return DriverMode::Remote;
  throw ValidationError("unknown driver mode: '" + std::string(text) + "'");
}

void DriverConfig::validate() const {
  if (!(temperature > 0.0 && temperature <= 2.0)) {
    throw ValidationError("temperature must lie in (0, 2]");
  }
  if (timeout.count() <= 0) throw ValidationError("timeout must be positive");
  if (max_retries < 0) throw ValidationError("max_retries must be non-negative");
  if (max_in_flight < 1) throw ValidationError("max_in_flight must be at least 1");
  if (!(stub_drift_probability >= 0.0 && stub_drift_probability <= 1.0)) {
    throw ValidationError("stub_drift_probability outside [0, 1]");
  }
  if (mode == DriverMode::Remote && endpoint_url.empty()) {
    throw ValidationError("remote driver needs an endpoint_url");
  }
}

DriverConfig DriverConfig::from_env() {
  DriverConfig cfg;
  if (const char* e = std::getenv("SIM_LLM_ENDPOINT"); e && *e) cfg.endpoint_url = e;
  if (const char* m = std::getenv("SIM_LLM_MODEL"); m && *m) cfg.model_name = m;
  return cfg;
}

// ---------------------------------------------------------------------------
// ChatClient

ChatClient::ChatClient(DriverConfig config) : config_(std::move(config)) {
  config_.validate();
  const std::string& url = config_.endpoint_url;
  const std::size_t scheme_end = url.find("://");
  const std::size_t host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
  const std::size_t path_start = url.find('/', host_start);
  scheme_host_port_ = url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "" : url.substr(path_start);
  if (path_.empty() || path_ == "/") path_ = "/api/chat";
}

std::string ChatClient::post_once(const std::string& body) {
  httplib::Client cli(scheme_host_port_);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
  cli.set_connection_timeout(secs.count(), usecs.count());
  cli.set_read_timeout(secs.count(), usecs.count());
  cli.set_write_timeout(secs.count(), usecs.count());
  auto res = cli.Post(path_, body, "application/json");
  if (!res) {
    throw DriverError("request to " + scheme_host_port_ + path_ +
                      " failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw DriverError("endpoint returned HTTP " + std::to_string(res->status));
  }
  json reply;
  try {
    reply = json::parse(res->body);
    return reply.at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw DriverError(std::string("malformed chat response: ") + e.what());
  }
}

std::string ChatClient::generate(const std::string& system_prompt, const std::string& user_prompt) {
  json body{{"model", config_.model_name},
            {"messages",
             json::array({json{{"role", "system"}, {"content", system_prompt}},
                          json{{"role", "user"}, {"content", user_prompt}}})},
            {"stream", false},
            {"options", {{"temperature", config_.temperature}}}};
  const std::string payload = body.dump();

  {
    std::unique_lock lock(mutex_);
    slot_free_.wait(lock, [&] { return in_flight_ < config_.max_in_flight; });
    ++in_flight_;
  }
  struct Release {
    ChatClient& c;
    ~Release() {
      {
        std::lock_guard lock(c.mutex_);
        --c.in_flight_;
      }
      c.slot_free_.notify_one();
    }
  } release{*this};

  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    try {
      return post_once(payload);
    } catch (const DriverError& e) {
      last_error = e.what();
    }
  }
  throw DriverError("giving up after " + std::to_string(config_.max_retries + 1) +
                    " attempts: " + last_error);
}

std::string generate(const DriverConfig& config, const std::string& system_prompt,
                     const std::string& user_prompt, std::uint64_t seed) {
  if (config.mode == DriverMode::Remote) {
    ChatClient client(config);
    return client.generate(system_prompt, user_prompt);
  }
  const std::uint64_t h =
      fnv1a64(user_prompt, fnv1a64(system_prompt, derive_seed(seed, 0x5eed)));
  std::ostringstream out;
  out << "stub reply " << std::hex << h;
  return out.str();
}

// ---------------------------------------------------------------------------
// LlmDriver

std::string clean_tweet(std::string_view text) {
  auto is_ws = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!text.empty() && is_ws(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && is_ws(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.size() >= 2 && text.front() == '"' && text.back() == '"') {
    text = text.substr(1, text.size() - 2);
  }
  // Count UTF-8 code points; continuation bytes are 10xxxxxx.
  std::size_t code_points = 0;
  std::size_t cut = text.size();
  for (std::size_t i = 0; i < text.size(); ++i) {
    if ((static_cast<unsigned char>(text[i]) & 0xC0) != 0x80) {
      if (code_points == kMaxTweetLength) {
        cut = i;
        break;
      }
      ++code_points;
    }
  }
  return std::string(text.substr(0, cut));
}

LlmDriver::LlmDriver(DriverConfig config) : client_(std::move(config)) {}

std::string LlmDriver::write_post(const DriverContext& ctx, const Topic& topic) {
  const std::string system = render_roleplay_prompt(ctx.profile, ctx.topics, ctx.priors);
  const std::string user = render_post_prompt(ctx.profile, ctx.topics, topic.id);
  return clean_tweet(client_.generate(system, user));
}

std::string LlmDriver::write_comment(const DriverContext& ctx, const Topic& topic,
                                     std::span<const ThreadMessage> thread) {
  const std::string system = render_roleplay_prompt(ctx.profile, ctx.topics, ctx.priors);
  const std::string user = render_comment_prompt(ctx.profile, topic, thread);
  return clean_tweet(client_.generate(system, user));
}

std::string LlmDriver::update_opinions(const DriverContext& ctx, std::span<const Topic> touched,
                                       std::span<const MemoryEntry> memory, int /*attempt*/) {
  const std::string system = render_roleplay_prompt(ctx.profile, ctx.topics, ctx.priors);
  const std::string user = render_opinion_update_prompt(ctx.profile, touched, memory,
                                                        client_.config().bias_instructions);
  return client_.generate(system, user);
}

// ---------------------------------------------------------------------------
// Stub

namespace {

constexpr std::array<std::string_view, 6> kStubPhrases{
    "that is where I stand.", "hear me out.", "not changing my mind.",
    "say it louder.", "just my two cents.", "facts matter."};

std::size_t count_tokens(std::string_view s) {
  std::size_t n = 0;
  bool in_token = false;
  for (unsigned char c : s) {
    if (std::isspace(c)) {
      in_token = false;
    } else if (!in_token) {
      in_token = true;
      ++n;
    }
  }
  return n;
}

std::string handle(std::string_view name) {
  std::string h;
  for (char c : name) {
    if (!std::isspace(static_cast<unsigned char>(c))) h.push_back(c);
  }
  return h;
}

std::uint64_t hash_parts(std::uint64_t seed, std::initializer_list<std::string_view> parts) {
  std::uint64_t h = derive_seed(seed, 0xabcdef);
  for (std::string_view p : parts) {
    h = fnv1a64(p, h);
    h = fnv1a64("\x1f", h);
  }
  return h;
}

}  // namespace

std::string stub_decide_text(const AgentProfile& profile, ContentKind kind, const Topic& topic,
                             std::string_view context, std::uint64_t seed) {
  const StanceLabel label = profile.opinion(topic.id).label;
  const std::string_view phrase =
      kStubPhrases[hash_parts(seed, {profile.agent_id, content_kind_key(kind), topic.id, context}) %
                   kStubPhrases.size()];

  std::string head;
  if (kind == ContentKind::Comment) {
    head = "@" + (context.empty() ? std::string("someone") : handle(context)) + " ";
  }
  head += "[" + std::string(coalition_key(profile.coalition)) + "] " + topic.id + " " +
          std::string(label_key(label)) + " " + std::string(phrase);
  const std::string tail = kind == ContentKind::Post ? " #" + topic.id : "";

  const std::size_t base_tokens = count_tokens(head) + count_tokens(tail);
  const std::size_t marker_cost = kStubToxicityMarker.size() + 1;
  const std::size_t used = head.size() + tail.size();
  const std::size_t cap = used >= kMaxTweetLength ? 0 : (kMaxTweetLength - used) / marker_cost;
  const double t = std::clamp(profile.target_toxicity, 0.0, 1.0);
  std::size_t markers = cap;
  if (t < 1.0) {
    const double needed = static_cast<double>(base_tokens) * t / (1.0 - t);
    markers = std::min(cap, static_cast<std::size_t>(std::ceil(needed - 1e-9)));
  }

  std::string text = head;
  for (std::size_t i = 0; i < markers; ++i) {
    text += ' ';
    text += kStubToxicityMarker;
  }
  text += tail;
  return text.substr(0, kMaxTweetLength);
}

std::string render_stub_opinion_update(std::span<const OpinionUpdateEntry> entries,
                                       std::span<const Topic> topics) {
  std::string out;
  for (const OpinionUpdateEntry& e : entries) {
    const Topic& t = find_topic(topics, e.topic_id);
    out += t.name + ": [" + std::string(label_prompt_text(e.label)) + "] " + e.thought + "\n";
  }
  return out;
}

std::vector<StanceLabel> observed_stances(std::span<const MemoryEntry> memory,
                                          std::string_view topic_id) {
  std::vector<StanceLabel> found;
  for (const MemoryEntry& m : memory) {
    if (m.own || m.topic_id != topic_id) continue;
    std::istringstream words(m.text);
    std::string w;
    while (words >> w) {
      bool matched = false;
      for (StanceLabel l : kStanceLabels) {
        if (w == label_key(l)) {
          found.push_back(l);
          matched = true;
          break;
        }
      }
      if (matched) break;
    }
  }
  return found;
}

StubDriver::StubDriver(std::uint64_t seed, double drift_probability)
    : seed_(seed), drift_probability_(drift_probability) {}

std::string StubDriver::write_post(const DriverContext& ctx, const Topic& topic) {
  const std::string when = std::to_string(ctx.tick.absolute_hour());
  return stub_decide_text(ctx.profile, ContentKind::Post, topic, when, seed_);
}

std::string StubDriver::write_comment(const DriverContext& ctx, const Topic& topic,
                                      std::span<const ThreadMessage> thread) {
  if (thread.empty()) throw ValidationError("comment needs a non-empty thread");
  return stub_decide_text(ctx.profile, ContentKind::Comment, topic, thread.back().author_name, seed_);
}

std::string StubDriver::update_opinions(const DriverContext& ctx, std::span<const Topic> touched,
                                        std::span<const MemoryEntry> memory, int /*attempt*/) {
  std::vector<OpinionUpdateEntry> entries;
  const std::string day = std::to_string(ctx.tick.day);
  for (const Topic& t : touched) {
    const StanceLabel current = ctx.profile.opinion(t.id).label;
    const std::vector<StanceLabel> seen = observed_stances(memory, t.id);
    StanceLabel next = current;
    const double u = hash_to_unit(hash_parts(seed_, {ctx.profile.agent_id, day, t.id}));
    if (!seen.empty() && u < drift_probability_) {
      double sum = 0.0;
      for (StanceLabel l : seen) sum += label_to_score(l);
      next = step_toward(current, sum / static_cast<double>(seen.size()));
    }
    std::string thought = "After " + std::to_string(seen.size()) +
                          " exchanges my view on " + t.name + " is " +
                          std::string(label_prompt_text(next)) + ".";
    entries.push_back({t.id, next, std::move(thought)});
  }
  return render_stub_opinion_update(entries, ctx.topics);
}

std::unique_ptr<AgentDriver> make_driver(const DriverConfig& config, std::uint64_t seed) {
  config.validate();
  if (config.mode == DriverMode::Remote) return std::make_unique<LlmDriver>(config);
  return std::make_unique<StubDriver>(seed, config.stub_drift_probability);
}

}  // namespace polisim
