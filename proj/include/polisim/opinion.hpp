#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace polisim {

/// Five-point stance scale used by the opinion-update protocol, ordered from
/// most opposed to most supportive.
enum class StanceLabel { StronglyOpposed, Opposed, Neutral, Supportive, StronglySupportive };

inline constexpr std::array<StanceLabel, 5> kStanceLabels{
    StanceLabel::StronglyOpposed, StanceLabel::Opposed, StanceLabel::Neutral,
    StanceLabel::Supportive, StanceLabel::StronglySupportive};

/// STRONGLY_SUPPORTIVE -> +1.0, SUPPORTIVE -> +0.5, NEUTRAL -> 0.0,
/// OPPOSED -> -0.5, STRONGLY_OPPOSED -> -1.0.
double label_to_score(StanceLabel label) noexcept;

/// Nearest anchor score; exact midpoints (+-0.25, +-0.75) resolve toward NEUTRAL.
/// Throws ValidationError outside [-1, 1].
StanceLabel score_to_label(double score);

/// Internal [-1, 1] score to the plotted [-2, 2] scale.
inline double display_scale(double score) noexcept { return 2.0 * score; }

/// Identifier form, e.g. "STRONGLY_SUPPORTIVE".
std::string_view label_key(StanceLabel label) noexcept;

/// Prompt form, e.g. "STRONGLY SUPPORTIVE".
std::string_view label_prompt_text(StanceLabel label) noexcept;

/// Lenient label parse: case-insensitive, spaces or underscores, optional
/// surrounding brackets, whitespace and trailing punctuation.
std::optional<StanceLabel> parse_label(std::string_view text);

/// One grid step from `label` toward `target_score`; unchanged when already
/// at the nearest anchor.
StanceLabel step_toward(StanceLabel label, double target_score) noexcept;

}  // namespace polisim
