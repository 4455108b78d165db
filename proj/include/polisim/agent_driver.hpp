#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <condition_variable>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "polisim/domain.hpp"
#include "polisim/prompts.hpp"
#include "polisim/seeding.hpp"

namespace polisim {

enum class DriverMode { Stub, Remote };

std::string_view driver_mode_key(DriverMode mode) noexcept;
DriverMode parse_driver_mode(std::string_view text);  // "stub" | "llm" | "remote"

struct DriverConfig {
  DriverMode mode = DriverMode::Stub;
  std::string endpoint_url = "http://127.0.0.1:11434";
  std::string model_name = "llama3.2";
  double temperature = 0.9;
  int max_retries = 3;
  std::chrono::milliseconds timeout{120000};
  std::size_t max_in_flight = 4;
  std::string bias_instructions;
  /// Stub only: chance per (agent, day, topic) of stepping one label toward
  /// the mean stance observed in the day's feed.
  double stub_drift_probability = 0.2;

  void validate() const;
  bool operator==(const DriverConfig&) const = default;

  /// Defaults with SIM_LLM_ENDPOINT / SIM_LLM_MODEL applied when set.
  static DriverConfig from_env();
};

/// What a driver knows about the acting agent.
struct DriverContext {
  const AgentProfile& profile;
  std::span<const Topic> topics;
  const CoalitionPriors& priors;
  Tick tick;
};

/// Produces agent text. Implementations throw DriverError on transport failure.
class AgentDriver {
 public:
  virtual ~AgentDriver() = default;

  virtual std::string write_post(const DriverContext& ctx, const Topic& topic) = 0;
  virtual std::string write_comment(const DriverContext& ctx, const Topic& topic,
                                    std::span<const ThreadMessage> thread) = 0;
  /// Raw reply to the opinion-update prompt; `attempt` counts from 0.
  virtual std::string update_opinions(const DriverContext& ctx, std::span<const Topic> touched,
                                      std::span<const MemoryEntry> memory, int attempt) = 0;
};

// ---------------------------------------------------------------------------
// Remote (Ollama-style /api/chat) client

/// Blocking chat-completion client. Request body:
///   {"model", "messages": [{"role":"system",...}, {"role":"user",...}],
///    "stream": false, "options": {"temperature"}}
/// Response: {"message": {"content": "..."}}. Reentrant; at most
/// max_in_flight concurrent requests per client.
class ChatClient {
 public:
  explicit ChatClient(DriverConfig config);

  std::string generate(const std::string& system_prompt, const std::string& user_prompt);

  const DriverConfig& config() const noexcept { return config_; }

 private:
  std::string post_once(const std::string& body);

  DriverConfig config_;
  std::string scheme_host_port_;
  std::string path_;
  std::mutex mutex_;
  std::condition_variable slot_free_;
  std::size_t in_flight_ = 0;
};

/// Stub: deterministic text keyed by a hash of both prompts and the seed.
/// Remote: one chat call with retries.
std::string generate(const DriverConfig& config, const std::string& system_prompt,
                     const std::string& user_prompt, std::uint64_t seed = 0);

/// Drives agents through the role-play, post, comment and opinion-update
/// prompts against a ChatClient.
class LlmDriver : public AgentDriver {
 public:
  explicit LlmDriver(DriverConfig config);

  std::string write_post(const DriverContext& ctx, const Topic& topic) override;
  std::string write_comment(const DriverContext& ctx, const Topic& topic,
                            std::span<const ThreadMessage> thread) override;
  std::string update_opinions(const DriverContext& ctx, std::span<const Topic> touched,
                              std::span<const MemoryEntry> memory, int attempt) override;

 private:
  ChatClient client_;
};

/// Trims whitespace and wrapping quotes, then cuts to 280 code points.
std::string clean_tweet(std::string_view text);

// ---------------------------------------------------------------------------
// Stub

inline constexpr std::string_view kStubToxicityMarker = "grr";
inline constexpr std::size_t kMaxTweetLength = 280;

/// Template text of at most 280 characters embedding coalition, topic, the
/// agent's stance label and enough toxicity marker tokens that the marker
/// share of tokens is at least target_toxicity (subject to the length cap).
/// For comments, `context` is the addressed author's name.
std::string stub_decide_text(const AgentProfile& profile, ContentKind kind, const Topic& topic,
                             std::string_view context, std::uint64_t seed);

/// Lines "<topic name>: [<LABEL>] <thought>".
std::string render_stub_opinion_update(std::span<const OpinionUpdateEntry> entries,
                                       std::span<const Topic> topics);

/// Stance labels embedded in non-own memory entries on `topic_id`.
std::vector<StanceLabel> observed_stances(std::span<const MemoryEntry> memory,
                                          std::string_view topic_id);

class StubDriver : public AgentDriver {
 public:
  explicit StubDriver(std::uint64_t seed, double drift_probability = 0.2);

  std::string write_post(const DriverContext& ctx, const Topic& topic) override;
  std::string write_comment(const DriverContext& ctx, const Topic& topic,
                            std::span<const ThreadMessage> thread) override;
  std::string update_opinions(const DriverContext& ctx, std::span<const Topic> touched,
                              std::span<const MemoryEntry> memory, int attempt) override;

 private:
  std::uint64_t seed_;
  double drift_probability_;
};

std::unique_ptr<AgentDriver> make_driver(const DriverConfig& config, std::uint64_t seed);

}  // namespace polisim
