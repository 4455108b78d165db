#include "polisim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "polisim/errors.hpp"
#include "polisim/opinion.hpp"
#include "polisim/rng.hpp"

namespace polisim {

CoalitionMap coalition_map(std::span<const AgentProfile> population) {
  CoalitionMap out;
  for (const AgentProfile& p : population) out.emplace(p.agent_id, p.coalition);
  return out;
}

namespace {

Coalition lookup(const CoalitionMap& coalitions, const AgentId& id) {
  auto it = coalitions.find(id);
  if (it == coalitions.end()) throw ValidationError("agent without coalition: " + id);
  return it->second;
}

// Yields (from, to, event) for every reply in the log.
template <class F>
void for_each_reply(std::span<const Event> events, const CoalitionMap& coalitions, F&& f) {
  for (const Event& e : events) {
    if (e.kind != EventKind::Comment) continue;
    if (!e.target) throw ValidationError("comment event without parent author");
    f(coalition_index(lookup(coalitions, e.actor)), coalition_index(lookup(coalitions, *e.target)), e);
  }
}

}  // namespace

double InteractionMatrix::total() const noexcept {
  double t = 0.0;
  for (const auto& row : counts) {
    for (double v : row) t += v;
  }
  return t;
}

InteractionMatrix InteractionMatrix::from_counts(
    const std::array<std::array<double, kNumCoalitions>, kNumCoalitions>& counts) {
  InteractionMatrix m;
  m.counts = counts;
  for (std::size_t r = 0; r < kNumCoalitions; ++r) {
    double row_total = 0.0;
    for (double v : counts[r]) {
      if (v < 0.0) throw ValidationError("negative interaction count");
      row_total += v;
    }
    m.row_defined[r] = row_total > 0.0;
    for (std::size_t c = 0; c < kNumCoalitions; ++c) {
      m.proportions[r][c] = row_total > 0.0 ? counts[r][c] / row_total : 0.0;
    }
  }
  return m;
}

InteractionMatrix interaction_matrix(std::span<const Event> events, const CoalitionMap& coalitions) {
  std::array<std::array<double, kNumCoalitions>, kNumCoalitions> counts{};
  for_each_reply(events, coalitions,
                 [&](std::size_t from, std::size_t to, const Event&) { counts[from][to] += 1.0; });
  return InteractionMatrix::from_counts(counts);
}

InteractionMatrix aggregate(std::span<const InteractionMatrix> matrices) {
  std::array<std::array<double, kNumCoalitions>, kNumCoalitions> counts{};
  for (const InteractionMatrix& m : matrices) {
    for (std::size_t r = 0; r < kNumCoalitions; ++r) {
      for (std::size_t c = 0; c < kNumCoalitions; ++c) counts[r][c] += m.counts[r][c];
    }
  }
  return InteractionMatrix::from_counts(counts);
}

std::vector<MaybeValue> in_group_vector(const InteractionMatrix& m) {
  std::vector<MaybeValue> out;
  for (std::size_t i = 0; i < kNumCoalitions; ++i) {
    out.push_back(m.row_defined[i] ? MaybeValue(m.proportions[i][i]) : std::nullopt);
  }
  return out;
}

std::vector<MaybeValue> out_group_vector(const InteractionMatrix& m) {
  std::vector<MaybeValue> out;
  for (const auto& [from, to] : out_group_pairs()) {
    const std::size_t r = coalition_index(from);
    out.push_back(m.row_defined[r] ? MaybeValue(m.proportions[r][coalition_index(to)]) : std::nullopt);
  }
  return out;
}

std::vector<std::pair<Coalition, Coalition>> out_group_pairs() {
  std::vector<std::pair<Coalition, Coalition>> out;
  for (Coalition a : kCoalitions) {
    for (Coalition b : kCoalitions) {
      if (a != b) out.emplace_back(a, b);
    }
  }
  return out;
}

std::optional<double> pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ValidationError("pearson: length mismatch");
  if (a.size() < 2) throw ValidationError("pearson: need at least two values");
  const double ma = mean(a);
  const double mb = mean(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) return std::nullopt;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

Correlation pearson_pairwise(std::span<const MaybeValue> a, std::span<const MaybeValue> b) {
  if (a.size() != b.size()) throw ValidationError("pearson: length mismatch");
  std::vector<double> xa, xb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] && b[i]) {
      xa.push_back(*a[i]);
      xb.push_back(*b[i]);
    }
  }
  Correlation c;
  c.n = xa.size();
  if (c.n >= 2) c.r = pearson(xa, xb);
  return c;
}

void ReplyToxicity::append(const ReplyToxicity& other) {
  for (std::size_t r = 0; r < kNumCoalitions; ++r) {
    for (std::size_t c = 0; c < kNumCoalitions; ++c) {
      scores[r][c].insert(scores[r][c].end(), other.scores[r][c].begin(), other.scores[r][c].end());
    }
  }
}

ReplyToxicity collect_reply_toxicity(std::span<const Event> events, const ToxicityScorer& scorer,
                                     const CoalitionMap& coalitions) {
  ReplyToxicity out;
  for_each_reply(events, coalitions, [&](std::size_t from, std::size_t to, const Event& e) {
    if (!e.content_id) throw ValidationError("comment event without content_id");
    const std::string text = e.payload.value("text", std::string());
    out.scores[from][to].push_back(score_text(scorer, *e.content_id, text).value);
  });
  return out;
}

ToxicityVectors toxicity_vectors(const ReplyToxicity& replies) {
  auto p95 = [&](std::size_t r, std::size_t c) -> MaybeValue {
    const auto& s = replies.scores[r][c];
    if (s.empty()) return std::nullopt;
    return percentile_95(s);
  };
  ToxicityVectors v;
  for (std::size_t i = 0; i < kNumCoalitions; ++i) v.in_group.push_back(p95(i, i));
  for (const auto& [from, to] : out_group_pairs()) {
    v.out_group.push_back(p95(coalition_index(from), coalition_index(to)));
  }
  return v;
}

ToxicityVectors toxicity_vectors(std::span<const Event> events, const ToxicityScorer& scorer,
                                 const CoalitionMap& coalitions) {
  return toxicity_vectors(collect_reply_toxicity(events, scorer, coalitions));
}

// ---------------------------------------------------------------------------

ReferenceData reference_from_json(const json& j) {
  auto vec = [&](const char* key, std::size_t n) {
    std::vector<MaybeValue> out;
    if (!j.contains(key)) {
      out.assign(n, std::nullopt);
      return out;
    }
    const json& a = j.at(key);
    if (!a.is_array() || a.size() != n) {
      throw ConfigError(std::string("reference.") + key + ": expected " + std::to_string(n) + " values");
    }
    for (const json& v : a) out.push_back(v.is_null() ? MaybeValue() : MaybeValue(v.get<double>()));
    return out;
  };
  if (!j.is_object()) throw ConfigError("reference: expected a JSON object");
  if (!j.contains("in_group") || !j.contains("out_group")) {
    throw ConfigError("reference: in_group and out_group are required");
  }
  return ReferenceData{vec("in_group", 4), vec("out_group", 12), vec("toxicity_in_group", 4),
                       vec("toxicity_out_group", 12)};
}

ReferenceData load_reference(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return reference_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------

namespace {

// Pooled member scores for one (day, topic, coalition) across runs.
std::vector<double> pooled(std::span<const RunOpinions> runs, const OpinionSnapshot* (*pick)(const RunOpinions&, int),
                           int day, const std::string& topic, Coalition coalition) {
  std::vector<double> values;
  for (const RunOpinions& run : runs) {
    const OpinionSnapshot* snap = pick(run, day);
    if (!snap) continue;
    for (const auto& [agent, scores] : snap->scores) {
      auto c = run.coalitions.find(agent);
      if (c == run.coalitions.end() || c->second != coalition) continue;
      auto s = scores.find(topic);
      if (s == scores.end()) throw ValidationError("snapshot lacks topic " + topic + " for " + agent);
      values.push_back(s->second);
    }
  }
  return values;
}

const OpinionSnapshot* snapshot_on(const RunOpinions& run, int day) {
  for (const OpinionSnapshot& s : run.snapshots) {
    if (s.day == day) return &s;
  }
  return nullptr;
}

const OpinionSnapshot* first_snapshot(const RunOpinions& run, int) {
  return run.snapshots.empty() ? nullptr : &run.snapshots.front();
}

const OpinionSnapshot* last_snapshot(const RunOpinions& run, int) {
  return run.snapshots.empty() ? nullptr : &run.snapshots.back();
}

}  // namespace

std::vector<TrajectoryPoint> opinion_trajectories(std::span<const RunOpinions> runs,
                                                  std::span<const Topic> topics,
                                                  const BootstrapConfig& bootstrap) {
  std::set<int> days;
  for (const RunOpinions& run : runs) {
    for (const OpinionSnapshot& s : run.snapshots) days.insert(s.day);
  }
  if (days.empty()) throw ValidationError("opinion_trajectories: no snapshots");

  std::vector<TrajectoryPoint> out;
  for (int day : days) {
    for (std::size_t t = 0; t < topics.size(); ++t) {
      for (Coalition c : kCoalitions) {
        const std::vector<double> values = pooled(runs, snapshot_on, day, topics[t].id, c);
        if (values.empty()) continue;
        BootstrapConfig cfg = bootstrap;
        cfg.seed = derive_seed(derive_seed(derive_seed(bootstrap.seed, static_cast<std::uint64_t>(day)), t),
                               coalition_index(c));
        TrajectoryPoint p;
        p.day = day;
        p.topic_id = topics[t].id;
        p.coalition = c;
        p.median = median(values);
        p.ci = parallel::bootstrap_median_ci(values, cfg);
        p.n = values.size();
        out.push_back(std::move(p));
      }
    }
  }
  return out;
}

std::vector<OpinionShift> opinion_shifts(std::span<const RunOpinions> runs,
                                         std::span<const Topic> topics) {
  for (const RunOpinions& run : runs) {
    if (run.snapshots.size() < 2) throw ValidationError("opinion_shifts: need at least two snapshots");
  }
  std::vector<OpinionShift> out;
  for (const Topic& topic : topics) {
    for (Coalition c : kCoalitions) {
      const std::vector<double> first = pooled(runs, first_snapshot, 0, topic.id, c);
      const std::vector<double> last = pooled(runs, last_snapshot, 0, topic.id, c);
      if (first.empty() || last.empty()) continue;
      out.push_back({topic.id, c, display_scale(median(first)), display_scale(median(last))});
    }
  }
  return out;
}

}  // namespace polisim
