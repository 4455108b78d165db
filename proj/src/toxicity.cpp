#include "polisim/toxicity.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <sstream>

#include "polisim/errors.hpp"
#include "polisim/stats.hpp"

namespace polisim {

namespace {

std::string normalize_token(std::string_view raw) {
  std::size_t b = 0, e = raw.size();
  while (b < e && !std::isalnum(static_cast<unsigned char>(raw[b]))) ++b;
  while (e > b && !std::isalnum(static_cast<unsigned char>(raw[e - 1]))) --e;
  std::string t(raw.substr(b, e - b));
  std::transform(t.begin(), t.end(), t.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return t;
}

}  // namespace

HeuristicScorer::HeuristicScorer() : HeuristicScorer(default_lexicon()) {}

HeuristicScorer::HeuristicScorer(std::vector<std::string> lexicon) {
  for (const std::string& w : lexicon) {
    const std::string t = normalize_token(w);
    if (!t.empty()) lexicon_.insert(t);
  }
}

std::vector<std::string> HeuristicScorer::default_lexicon() {
  return {"grr", "idiot", "idiots", "disgrace", "disgraceful", "liar", "liars",
          "clown", "clowns", "traitor", "traitors", "shameful", "pathetic", "stupid"};
}

ToxicityScore HeuristicScorer::score(const ContentId&, std::string_view text) const {
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t tokens = 0, hits = 0;
  while (in >> raw) {
    ++tokens;
    if (lexicon_.count(normalize_token(raw))) ++hits;
  }
  if (tokens == 0) return {0.0};
  return {static_cast<double>(hits) / static_cast<double>(tokens)};
}

SidecarScorer::SidecarScorer(std::map<ContentId, double> scores) : scores_(std::move(scores)) {
  for (const auto& [id, v] : scores_) {
    if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("sidecar score outside [0, 1] for " + id);
  }
}

SidecarScorer SidecarScorer::read(std::istream& in) {
  std::map<ContentId, double> scores;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      scores[j.at("content_id").get<std::string>()] = j.at("toxicity").get<double>();
    } catch (const json::exception& e) {
      throw ValidationError("sidecar line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return SidecarScorer(std::move(scores));
}

SidecarScorer SidecarScorer::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read toxicity sidecar " + path.string());
  return read(in);
}

ToxicityScore SidecarScorer::score(const ContentId& content_id, std::string_view) const {
  auto it = scores_.find(content_id);
  if (it == scores_.end()) {
    throw ValidationError("toxicity sidecar has no score for content_id " + content_id);
  }
  return {it->second};
}

ToxicityScore score_text(const ToxicityScorer& scorer, const ContentId& content_id,
                         std::string_view text) {
  if (text.empty()) throw ValidationError("cannot score empty text (" + content_id + ")");
  const ToxicityScore s = scorer.score(content_id, text);
  if (!(s.value >= 0.0 && s.value <= 1.0)) {
    throw ValidationError("scorer returned a value outside [0, 1] for " + content_id);
  }
  return s;
}

double percentile_95(std::span<const double> scores) { return percentile(scores, 0.95); }

}  // namespace polisim
