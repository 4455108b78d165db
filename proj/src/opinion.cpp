#include "polisim/opinion.hpp"

#include <cctype>
#include <cmath>
#include <string>

#include "polisim/errors.hpp"

namespace polisim {

double label_to_score(StanceLabel label) noexcept {
  switch (label) {
    case StanceLabel::StronglyOpposed: return -1.0;
    case StanceLabel::Opposed: return -0.5;
    case StanceLabel::Neutral: return 0.0;
    case StanceLabel::Supportive: return 0.5;
    case StanceLabel::StronglySupportive: return 1.0;
  }
  return 0.0;
}

StanceLabel score_to_label(double score) {
  if (!(score >= -1.0 && score <= 1.0)) {
    throw ValidationError("stance score out of [-1, 1]: " + std::to_string(score));
  }
  const double mag = std::fabs(score);
  if (mag <= 0.25) return StanceLabel::Neutral;
  if (mag <= 0.75) return score > 0 ? StanceLabel::Supportive : StanceLabel::Opposed;
  return score > 0 ? StanceLabel::StronglySupportive : StanceLabel::StronglyOpposed;
}

std::string_view label_key(StanceLabel label) noexcept {
  switch (label) {
    case StanceLabel::StronglyOpposed: return "STRONGLY_OPPOSED";
    case StanceLabel::Opposed: return "OPPOSED";
    case StanceLabel::Neutral: return "NEUTRAL";
    case StanceLabel::Supportive: return "SUPPORTIVE";
    case StanceLabel::StronglySupportive: return "STRONGLY_SUPPORTIVE";
  }
  return "NEUTRAL";
}

std::string_view label_prompt_text(StanceLabel label) noexcept {
  switch (label) {
    case StanceLabel::StronglyOpposed: return "STRONGLY OPPOSED";
    case StanceLabel::Opposed: return "OPPOSED";
    case StanceLabel::Neutral: return "NEUTRAL";
    case StanceLabel::Supportive: return "SUPPORTIVE";
    case StanceLabel::StronglySupportive: return "STRONGLY SUPPORTIVE";
  }
  return "NEUTRAL";
}

std::optional<StanceLabel> parse_label(std::string_view text) {
  auto is_trim = [](unsigned char c) {
    return std::isspace(c) || c == '[' || c == ']' || c == '.' || c == ',' || c == ';' ||
           c == ':' || c == '!' || c == '*' || c == '"' || c == '\'';
  };
  while (!text.empty() && is_trim(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && is_trim(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);

  std::string norm;
  bool pending_sep = false;
  for (unsigned char c : text) {
    if (std::isspace(c) || c == '_' || c == '-') {
      pending_sep = !norm.empty();
      continue;
    }
    if (pending_sep) norm.push_back('_');
    pending_sep = false;
    norm.push_back(static_cast<char>(std::toupper(c)));
  }
  for (StanceLabel l : kStanceLabels) {
    if (norm == label_key(l)) return l;
  }
  return std::nullopt;
}

StanceLabel step_toward(StanceLabel label, double target_score) noexcept {
  const int idx = static_cast<int>(label);
  const double current = label_to_score(label);
  // Move only when the target is nearer to the adjacent anchor than to the current one.
  if (target_score > current + 0.25 && idx < 4) return static_cast<StanceLabel>(idx + 1);
  if (target_score < current - 0.25 && idx > 0) return static_cast<StanceLabel>(idx - 1);
  return label;
}

}  // namespace polisim
