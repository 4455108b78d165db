#pragma once

// Prompt templates for agent role-play, content generation and opinion
// updates, plus the parser for structured opinion-update replies.

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "polisim/domain.hpp"
#include "polisim/seeding.hpp"

namespace polisim {

extern const std::string_view kRoleplayTemplate;
extern const std::string_view kPostTemplate;
extern const std::string_view kCommentTemplate;
extern const std::string_view kOpinionUpdateTemplate;

inline constexpr std::string_view kConversationStart = "##CONVERSATION START##";
inline constexpr std::string_view kConversationEnd = "##CONVERSATION END##";
inline constexpr std::string_view kInteractionsStart = "##INTERACTIONS START##";
inline constexpr std::string_view kInteractionsEnd = "##INTERACTIONS END##";

/// Single-pass substitution of {key} placeholders. Substituted values are not
/// rescanned. Throws ValidationError("missing placeholder value: key") for
/// keys without a non-empty value.
std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& values);

/// Placeholder names appearing in a template, in order of first use.
std::vector<std::string> template_placeholders(std::string_view tmpl);

std::string render_roleplay_prompt(const AgentProfile& profile, std::span<const Topic> topics,
                                   const CoalitionPriors& priors);

std::string render_post_prompt(const AgentProfile& profile, std::span<const Topic> topics,
                               std::string_view topic_id);

struct ThreadMessage {
  std::string author_name;
  std::string text;
};

/// `thread` is in chronological order and must not be empty.
std::string render_comment_prompt(const AgentProfile& profile, const Topic& topic,
                                  std::span<const ThreadMessage> thread);

/// One day-memory entry: content the agent wrote or was shown.
struct MemoryEntry {
  Tick observed;  // when the agent wrote or saw it
  Tick created;
  ContentId content_id;
  AgentId author;
  std::string author_name;
  ContentKind kind = ContentKind::Post;
  std::string topic_id;
  std::string text;
  bool own = false;

  bool operator==(const MemoryEntry&) const = default;
};

std::string render_memory(std::span<const MemoryEntry> memory);

std::string render_opinion_update_prompt(const AgentProfile& profile,
                                         std::span<const Topic> topics_touched,
                                         std::span<const MemoryEntry> memory,
                                         std::string_view bias_instructions = {});

struct OpinionUpdateEntry {
  std::string topic_id;
  StanceLabel label = StanceLabel::Neutral;
  std::string thought;

  bool operator==(const OpinionUpdateEntry&) const = default;
};

struct ParsedOpinionUpdate {
  std::vector<OpinionUpdateEntry> entries;  // at most one per topic, first line wins
  std::vector<std::string> missing_topics;
};

/// Extracts "<topic>: [<LABEL>] <thought>" lines. Topics match the id or the
/// display name, case-insensitively; unexpected topics are ignored. Throws
/// ParseFailure when no line parses.
ParsedOpinionUpdate parse_opinion_update(std::string_view raw, std::span<const Topic> expected);

}  // namespace polisim
