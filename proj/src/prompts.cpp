#include "polisim/prompts.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "polisim/errors.hpp"

namespace polisim {

const std::string_view kRoleplayTemplate =
    "You are role-playing as {name}, a {age}-year-old {nationality} {gender}, and you only "
    "speak {language}. You are {oe}, {co}, {ex}, {ag}, and {ne}.\n"
    "\n"
    "Current {nationality} political topics include: {topic_descriptions}.\n"
    "\n"
    "You politically identify as {leaning}. This party has historically promoted the "
    "following principles:\n"
    "{coalition_opinion}.\n"
    "\n"
    "These principles have shaped your initial worldview and personal beliefs.\n"
    "\n"
    "However, over time, your personal opinions have developed through individual experiences "
    "and exposure to alternative perspectives.\n"
    "Below is a summary of your current personal opinions on key political and social topics. "
    "These may reflect, diverge from, or expand upon your party's stance:\n"
    "{opinion}";

const std::string_view kPostTemplate =
    "Write a tweet that discusses the following topic: {topic}.\n"
    " - Your tweet MUST be under 280 characters including spaces. If it exceeds this limit, the "
    "output is INVALID. Keep it short and sharp.\n"
    " - The tweet must strictly reflect your character's beliefs as previously defined.\n"
    " - Use an informal tone, appropriate for social media posts.\n"
    " - The tweet must reflect a {toxicity} level of conflict, tone, and language style.\n"
    " - Hashtags should be placed at the end.\n"
    " - Output ONLY the tweet text, with no introductions or additional commentary. Don't "
    "mention anything with '@'.";

const std::string_view kCommentTemplate =
    "You are participating to a discussion about the following topic: {topic}. Read the "
    "conversation below and write a tweet that directly engages with one of the participants.\n"
    "\n"
    " - Your tweet MUST be under 280 characters including spaces. If it exceeds this limit, the "
    "output is INVALID. Keep it short and sharp.\n"
    " - The tweet must strictly reflect your character's beliefs as previously defined.\n"
    " - Use an informal tone, appropriate for social media posts.\n"
    " - The tweet must reflect a {toxicity} level of conflict, tone, and language style.\n"
    " - Begin with @username to address the user you are interacting with. Don't mention "
    "anything else with '@'.\n"
    " - Output ONLY the tweet text, with no introductions or additional commentary\n"
    "\n"
    "##CONVERSATION START##\n"
    "\n"
    "{conv}\n"
    "\n"
    "##CONVERSATION END##";

const std::string_view kOpinionUpdateTemplate =
    "You are updating your character's opinions based strictly on the interactions below. Be "
    "consistent with your character's beliefs and personality as previously defined.\n"
    "- {bias_instructions}\n"
    "- Update only the following topics: {topics}\n"
    "- Do not introduce external reasoning or general considerations.\n"
    "- Do not address a specific tweet, but express your character's updated opinion. The "
    "opinion must reflect the character's position on the topic as defined in the topic "
    "descriptions, not their reaction to individual statements or posts.\n"
    "- Don't mention anyone with '@'.\n"
    "- Output EXACTLY one line per topic, following this structure:\n"
    "<topic>: [<LABEL>] <thought>\n"
    "\n"
    "Where:\n"
    "- <thought> must be a clear and concise sentence that reflects your current personal "
    "opinion.\n"
    "- <LABEL> must be one of: [STRONGLY SUPPORTIVE], [SUPPORTIVE], [NEUTRAL], [OPPOSED], "
    "[STRONGLY OPPOSED]. Choose the label based on the direction and intensity of your "
    "character's past behavior and beliefs.\n"
    "    - [STRONGLY SUPPORTIVE] or [STRONGLY OPPOSED]: the character holds a firm, clearly "
    "defined position with strong consistency over time and no indication of moderation.\n"
    "    - [SUPPORTIVE] or [OPPOSED]: the character tends toward a position but with some "
    "openness or nuance.\n"
    "    - [NEUTRAL]: the character's behavior or prior stance shows ambiguity, balance, or lack "
    "of clear positioning.\n"
    "- DO NOT include additional formatting between topics.\n"
    "\n"
    "##OUTPUT FORMAT STRUCTURE##\n"
    "\n"
    "<topic1>: [<LABEL>] <thought>\n"
    "<topic2>: [<LABEL>] <thought>\n"
    "...\n"
    "\n"
    "##END OF OUTPUT FORMAT STRUCTURE##\n"
    "\n"
    "##INTERACTIONS START##\n"
    "\n"
    "{memory}\n"
    "\n"
    "##INTERACTIONS END##";

namespace {

bool is_placeholder_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

// Returns the length of a "{name}" placeholder starting at pos, or 0.
std::size_t placeholder_at(std::string_view tmpl, std::size_t pos) {
  if (tmpl[pos] != '{') return 0;
  std::size_t end = pos + 1;
  while (end < tmpl.size() && is_placeholder_char(tmpl[end])) ++end;
  if (end == pos + 1 || end >= tmpl.size() || tmpl[end] != '}') return 0;
  return end - pos + 1;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::map<std::string, std::string> persona_values(const AgentProfile& p) {
  std::map<std::string, std::string> v;
  auto put = [&](const char* key, const std::string& value) {
    if (!value.empty()) v[key] = value;
  };
  put("name", p.name);
  if (p.age) v["age"] = std::to_string(*p.age);
  put("nationality", p.nationality);
  put("gender", p.gender);
  put("language", p.language);
  put("oe", p.big_five.openness);
  put("co", p.big_five.conscientiousness);
  put("ex", p.big_five.extraversion);
  put("ag", p.big_five.agreeableness);
  put("ne", p.big_five.neuroticism);
  return v;
}

std::string topic_name_for(std::span<const Topic> topics, const std::string& id) {
  for (const Topic& t : topics) {
    if (t.id == id) return t.name;
  }
  return id;
}

}  // namespace

std::vector<std::string> template_placeholders(std::string_view tmpl) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    const std::size_t len = placeholder_at(tmpl, i);
    if (len == 0) continue;
    std::string name(tmpl.substr(i + 1, len - 2));
    if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(name);
    i += len - 1;
  }
  return names;
}

std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(tmpl.size() * 2);
  for (std::size_t i = 0; i < tmpl.size();) {
    const std::size_t len = placeholder_at(tmpl, i);
    if (len == 0) {
      out.push_back(tmpl[i++]);
      continue;
    }
    const std::string name(tmpl.substr(i + 1, len - 2));
    auto it = values.find(name);
    if (it == values.end()) throw ValidationError("missing placeholder value: " + name);
    out += it->second;
    i += len;
  }
  return out;
}

std::string render_roleplay_prompt(const AgentProfile& profile, std::span<const Topic> topics,
                                   const CoalitionPriors& priors) {
  auto values = persona_values(profile);

  std::ostringstream descriptions;
  for (std::size_t i = 0; i < topics.size(); ++i) {
    const Topic& t = topics[i];
    if (i) descriptions << "; ";
    descriptions << t.name << " (" << t.description << "; supportive means " << t.supportive_meaning
                 << "; opposed means " << t.opposed_meaning << ")";
  }
  if (!topics.empty()) values["topic_descriptions"] = descriptions.str();

  values["leaning"] = std::string(coalition_display_name(profile.coalition));

  std::ostringstream principles;
  for (std::size_t i = 0; i < topics.size(); ++i) {
    const TopicPrior& prior = priors.at(profile.coalition, topics[i].id);
    if (i) principles << '\n';
    principles << "- " << topics[i].name << ": [" << label_prompt_text(prior.label) << "] "
               << prior.justification;
  }
  if (!topics.empty()) values["coalition_opinion"] = principles.str();

  std::ostringstream opinions;
  for (std::size_t i = 0; i < profile.opinions.size(); ++i) {
    const OpinionRecord& r = profile.opinions[i];
    if (i) opinions << '\n';
    opinions << "- " << topic_name_for(topics, r.topic_id) << ": [" << label_prompt_text(r.label)
             << "] " << r.justification;
  }
  if (!profile.opinions.empty()) values["opinion"] = opinions.str();

  return render_template(kRoleplayTemplate, values);
}

std::string render_post_prompt(const AgentProfile& profile, std::span<const Topic> topics,
                               std::string_view topic_id) {
  const Topic& topic = find_topic(topics, topic_id);
  return render_template(kPostTemplate,
                         {{"topic", topic.name + " (" + topic.description + ")"},
                          {"toxicity", std::string(toxicity_token(profile.target_toxicity))}});
}

std::string render_comment_prompt(const AgentProfile& profile, const Topic& topic,
                                  std::span<const ThreadMessage> thread) {
  if (thread.empty()) throw ValidationError("comment prompt needs a non-empty thread");
  std::ostringstream conv;
  for (std::size_t i = 0; i < thread.size(); ++i) {
    if (i) conv << '\n';
    conv << '@' << thread[i].author_name << ": " << thread[i].text;
  }
  return render_template(kCommentTemplate,
                         {{"topic", topic.name + " (" + topic.description + ")"},
                          {"toxicity", std::string(toxicity_token(profile.target_toxicity))},
                          {"conv", conv.str()}});
}

std::string render_memory(std::span<const MemoryEntry> memory) {
  std::ostringstream out;
  for (std::size_t i = 0; i < memory.size(); ++i) {
    const MemoryEntry& m = memory[i];
    if (i) out << '\n';
    out << "[day " << m.created.day << ", " << (m.created.hour < 10 ? "0" : "") << m.created.hour
        << ":00] ";
    if (m.own) {
      out << "You wrote";
    } else {
      out << m.author_name << " wrote";
    }
    out << (m.kind == ContentKind::Post ? " a post" : " a comment") << " on " << m.topic_id << ": "
        << m.text;
  }
  return out.str();
}

std::string render_opinion_update_prompt(const AgentProfile& profile,
                                         std::span<const Topic> topics_touched,
                                         std::span<const MemoryEntry> memory,
                                         std::string_view bias_instructions) {
  (void)profile;
  if (topics_touched.empty()) throw ValidationError("opinion update needs at least one topic");
  std::string names;
  for (std::size_t i = 0; i < topics_touched.size(); ++i) {
    if (i) names += ", ";
    names += topics_touched[i].name;
  }
  return render_template(kOpinionUpdateTemplate, {{"bias_instructions", std::string(bias_instructions)},
                                                  {"topics", names},
                                                  {"memory", render_memory(memory)}});
}

ParsedOpinionUpdate parse_opinion_update(std::string_view raw, std::span<const Topic> expected) {
  ParsedOpinionUpdate result;
  std::set<std::string> seen;

  auto match_topic = [&](std::string_view text) -> const Topic* {
    std::string key = lower(trim(text));
    key.erase(std::remove(key.begin(), key.end(), '*'), key.end());
    std::string_view k = trim(key);
    for (const Topic& t : expected) {
      std::string spaced = t.id;
      std::replace(spaced.begin(), spaced.end(), '_', ' ');
      if (k == lower(t.id) || k == lower(t.name) || k == spaced) return &t;
    }
    return nullptr;
  };

  std::size_t start = 0;
  while (start <= raw.size()) {
    std::size_t end = raw.find('\n', start);
    if (end == std::string_view::npos) end = raw.size();
    std::string_view line = trim(raw.substr(start, end - start));
    start = end + 1;

    while (!line.empty() && (line.front() == '-' || line.front() == '*' || line.front() == '<')) {
      line.remove_prefix(1);
    }
    const std::size_t colon = line.find(':');
    if (colon == std::string_view::npos) continue;
    const Topic* topic = match_topic(line.substr(0, colon));
    if (!topic) continue;

    std::string_view rest = trim(line.substr(colon + 1));
    std::optional<StanceLabel> label;
    std::string_view thought;
    if (!rest.empty() && rest.front() == '[') {
      const std::size_t close = rest.find(']');
      if (close == std::string_view::npos) continue;
      label = parse_label(rest.substr(1, close - 1));
      thought = trim(rest.substr(close + 1));
    } else {
      // Unbracketed label: try the two-word labels first.
      const std::size_t first_space = rest.find(' ');
      const std::size_t second_space =
          first_space == std::string_view::npos ? first_space : rest.find(' ', first_space + 1);
      std::vector<std::string_view> heads;
      if (first_space != std::string_view::npos) {
        heads.push_back(rest.substr(0, second_space == std::string_view::npos ? rest.size() : second_space));
      }
      heads.push_back(rest.substr(0, first_space == std::string_view::npos ? rest.size() : first_space));
      for (std::string_view head : heads) {
        if ((label = parse_label(head))) {
          thought = trim(rest.substr(head.size()));
          break;
        }
      }
    }
    if (!label) continue;
    while (!thought.empty() && (thought.front() == '-' || thought.front() == ':')) {
      thought = trim(thought.substr(1));
    }
    if (!seen.insert(topic->id).second) continue;
    result.entries.push_back({topic->id, *label, std::string(thought)});
  }

  if (result.entries.empty()) throw ParseFailure("no parseable opinion line in driver output");
  for (const Topic& t : expected) {
    if (!seen.count(t.id)) result.missing_topics.push_back(t.id);
  }
  return result;
}

}  // namespace polisim
