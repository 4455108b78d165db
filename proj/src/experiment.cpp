#include "polisim/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "polisim/errors.hpp"
#include "polisim/event_log.hpp"
#include "polisim/opinion.hpp"
#include "polisim/toxicity.hpp"

namespace fs = std::filesystem;

namespace polisim {

namespace {

std::string fmt(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw ValidationError("cannot format number");
  return std::string(buf, end);
}

std::string fmt(const MaybeValue& v) { return v ? fmt(*v) : std::string(); }

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, std::initializer_list<std::string_view> header)
      : out_(path, std::ios::binary), path_(path) {
    if (!out_) throw IoError("cannot write " + path.string());
    row(header);
  }

  template <class Range>
  void row(const Range& fields) {
    bool first = true;
    for (const auto& f : fields) {
      if (!first) out_ << ',';
      out_ << f;
      first = false;
    }
    out_ << '\n';
  }

  void row(std::initializer_list<std::string> fields) { row<std::initializer_list<std::string>>(fields); }

  ~CsvWriter() noexcept(false) {
    out_.flush();
    if (!out_ && std::uncaught_exceptions() == 0) throw IoError("write failed: " + path_.string());
  }

 private:
  std::ofstream out_;
  fs::path path_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name, const fs::path& path) const {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ValidationError(path.string() + ": missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  }
};

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(path.string() + ": empty CSV");
  t.header = split_csv_line(line);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != t.header.size()) {
      throw ValidationError(path.string() + ": row with " + std::to_string(fields.size()) +
                            " fields, expected " + std::to_string(t.header.size()));
    }
    t.rows.push_back(std::move(fields));
  }
  return t;
}

std::string run_dir_name(int run_index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "run_%02d", run_index);
  return buf;
}

void ensure_writable(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  const fs::path probe = dir / ".write_probe";
  {
    std::ofstream out(probe);
    if (!out) throw IoError("output directory is not writable: " + dir.string());
  }
  fs::remove(probe, ec);
}

// Runs f(i) for i in [0, n) on `jobs` threads; rethrows the first failure.
template <class F>
void parallel_for_jobs(std::size_t n, int jobs, F&& f) {
  std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
  for (std::size_t i = 0; i < n; ++i) {
    try {
      f(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

// ---------------------------------------------------------------------------

std::string Condition::name() const {
  return std::string(network_init_key(network_init)) + "__" + std::string(recommender_key(recommender));
}

std::vector<Condition> experiment_conditions(const ExperimentConfig& cfg) {
  if (!cfg.matrix) return {Condition{cfg.simulation.network_init, cfg.simulation.recommender.kind}};
  std::vector<Condition> out;
  for (NetworkInit init : {NetworkInit::Empty, NetworkInit::FullyConnected}) {
    for (RecommenderKind rec :
         {RecommenderKind::ReverseChronoFollowersPopularity, RecommenderKind::ContentRecSys}) {
      out.push_back({init, rec});
    }
  }
  return out;
}

fs::path run_directory(const ExperimentConfig& cfg, const Condition& condition, int run_index) {
  fs::path base(cfg.out_dir);
  if (cfg.matrix) base /= condition.name();
  return base / run_dir_name(run_index);
}

std::vector<SeedRecord> experiment_seeds(const ExperimentConfig& cfg) {
  if (cfg.seeds_path) return load_seed_records(*cfg.seeds_path);
  return synthetic_seed_records(cfg.synthetic_seed_count, cfg.simulation.rng_seed);
}

SimulationConfig run_simulation_config(const ExperimentConfig& cfg, const Condition& condition,
                                       int run_index) {
  SimulationConfig sim = cfg.simulation;
  sim.network_init = condition.network_init;
  sim.recommender.kind = condition.recommender;
  sim.rng_seed = cfg.simulation.rng_seed + static_cast<std::uint64_t>(run_index);
  sim.run_index = run_index;
  return sim;
}

std::vector<AgentProfile> run_population(const ExperimentConfig& cfg,
                                         std::span<const SeedRecord> seeds, int run_index) {
  PopulationConfig pop = cfg.population;
  pop.population_size = cfg.simulation.population_size;
  Rng rng(derive_seed(cfg.simulation.rng_seed + static_cast<std::uint64_t>(run_index), 2));
  return build_population(seeds, pop, cfg.topics, cfg.priors, rng);
}

void write_run_artifacts(const fs::path& dir, const SimulationConfig& sim,
                         std::span<const AgentProfile> initial_population,
                         const SimulationResult& result) {
  fs::create_directories(dir / "snapshots");
  write_json_file(dir / "config.json", to_json(sim));
  write_json_file(dir / "population.json", population_to_json(initial_population));
  save_event_log(dir / "events.jsonl", result.events);
  if (result.graph_snapshots.size() != result.opinion_snapshots.size()) {
    throw ValidationError("graph and opinion snapshot counts differ");
  }
  for (std::size_t i = 0; i < result.graph_snapshots.size(); ++i) {
    const GraphSnapshot& g = result.graph_snapshots[i];
    write_json_file(dir / "snapshots" / ("day_" + std::to_string(g.day) + ".json"),
                    snapshot_to_json(g, result.opinion_snapshots[i]));
  }
}

void cmd_run(const ExperimentConfig& cfg) {
  cfg.validate();
  ensure_writable(cfg.out_dir);
  write_json_file(fs::path(cfg.out_dir) / "config.resolved.json", to_json(cfg));

  const std::vector<SeedRecord> seeds = experiment_seeds(cfg);
  const std::vector<Condition> conditions = experiment_conditions(cfg);
  World world{cfg.topics, cfg.priors};
  const std::size_t runs = static_cast<std::size_t>(cfg.runs);

  parallel_for_jobs(conditions.size() * runs, cfg.jobs, [&](std::size_t task) {
    const Condition& condition = conditions[task / runs];
    const int run_index = static_cast<int>(task % runs);
    const SimulationConfig sim = run_simulation_config(cfg, condition, run_index);
    std::vector<AgentProfile> population = run_population(cfg, seeds, run_index);
    auto driver = make_driver(sim.driver, sim.rng_seed);
    const SimulationResult result = run_simulation(sim, population, world, *driver);
    write_run_artifacts(run_directory(cfg, condition, run_index), sim, population, result);
  });
}

// ---------------------------------------------------------------------------

std::string RunArtifacts::condition() const {
  return Condition{config.network_init, config.recommender.kind}.name();
}

std::vector<fs::path> discover_runs(const fs::path& root) {
  if (!fs::is_directory(root)) throw IoError("not a directory: " + root.string());
  std::vector<fs::path> out;
  if (fs::exists(root / "config.json") && fs::exists(root / "population.json")) out.push_back(root);
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_directory() && fs::exists(entry.path() / "config.json") &&
        fs::exists(entry.path() / "population.json")) {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

RunArtifacts load_run(const fs::path& dir) {
  RunArtifacts run;
  run.dir = dir;
  run.config = simulation_config_from_json(read_json_file(dir / "config.json"), SimulationConfig{});
  run.population = population_from_json(read_json_file(dir / "population.json"));

  const fs::path snaps = dir / "snapshots";
  if (!fs::is_directory(snaps)) throw IoError("missing snapshots directory: " + snaps.string());
  std::vector<std::pair<int, fs::path>> files;
  for (const auto& entry : fs::directory_iterator(snaps)) {
    const std::string name = entry.path().filename().string();
    int day = 0;
    if (name.rfind("day_", 0) != 0 || entry.path().extension() != ".json") continue;
    const std::string digits = name.substr(4, name.size() - 9);
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), day);
    if (ec != std::errc() || ptr != digits.data() + digits.size()) continue;
    files.emplace_back(day, entry.path());
  }
  if (files.empty()) throw IoError("no snapshots in " + snaps.string());
  std::sort(files.begin(), files.end());
  for (const auto& [day, path] : files) {
    auto [g, o] = snapshot_from_json(read_json_file(path));
    if (g.day != day) throw ValidationError(path.string() + ": day field does not match file name");
    run.graphs.push_back(std::move(g));
    run.opinions.push_back(std::move(o));
  }
  if (run.opinions.front().day != 0) throw IoError("missing day-0 snapshot in " + snaps.string());
  return run;
}

std::vector<std::vector<FJDayResult>> fj_for_run(const RunArtifacts& run,
                                                 std::span<const Topic> topics,
                                                 const FJSettings& settings) {
  const OpinionSnapshot& day0 = run.opinions.front();
  std::vector<AgentId> agents;
  for (const auto& [agent, scores] : day0.scores) agents.push_back(agent);
  const std::vector<GraphSnapshot> days(run.graphs.begin() + 1, run.graphs.end());
  const FJParams params = settings.params(agents.size());

  std::vector<std::vector<FJDayResult>> out;
  for (const Topic& topic : topics) {
    std::vector<double> x0;
    for (const AgentId& a : agents) {
      auto it = day0.scores.at(a).find(topic.id);
      if (it == day0.scores.at(a).end()) {
        throw ValidationError("day-0 snapshot lacks topic " + topic.id + " for " + a);
      }
      x0.push_back(it->second);
    }
    out.push_back(fj_run(days, agents, x0, params));
  }
  return out;
}

void cmd_fj(const ExperimentConfig& cfg, const fs::path& root) {
  cfg.fj.validate();
  const std::vector<fs::path> dirs = discover_runs(root);
  if (dirs.empty()) throw IoError("no run directories below " + root.string());

  std::vector<RunOpinions> fj_opinions(dirs.size());
  std::vector<std::string> conditions(dirs.size());
  parallel_for_jobs(dirs.size(), cfg.jobs, [&](std::size_t i) {
    const RunArtifacts run = load_run(dirs[i]);
    const auto results = fj_for_run(run, cfg.topics, cfg.fj);
    std::vector<AgentId> agents;
    for (const auto& [agent, scores] : run.opinions.front().scores) agents.push_back(agent);

    RunOpinions& ro = fj_opinions[i];
    ro.coalitions = coalition_map(run.population);
    ro.snapshots.push_back(run.opinions.front());
    const std::size_t days = results.empty() ? 0 : results.front().size();
    for (std::size_t d = 0; d < days; ++d) {
      OpinionSnapshot snap;
      snap.day = results.front()[d].day;
      for (std::size_t t = 0; t < cfg.topics.size(); ++t) {
        for (std::size_t a = 0; a < agents.size(); ++a) {
          snap.scores[agents[a]][cfg.topics[t].id] = results[t][d].opinions[a];
        }
      }
      ro.snapshots.push_back(std::move(snap));
    }
    conditions[i] = run.condition();

    CsvWriter csv(dirs[i] / "fj_trajectories.csv", {"day", "topic", "agent_id", "score", "display_score"});
    for (std::size_t d = 0; d < days; ++d) {
      for (std::size_t t = 0; t < cfg.topics.size(); ++t) {
        for (std::size_t a = 0; a < agents.size(); ++a) {
          const double x = results[t][d].opinions[a];
          csv.row({std::to_string(results[t][d].day), cfg.topics[t].id, agents[a], fmt(x),
                   fmt(display_scale(x))});
        }
      }
    }
  });

  std::map<std::string, std::vector<RunOpinions>> by_condition;
  for (std::size_t i = 0; i < dirs.size(); ++i) by_condition[conditions[i]].push_back(fj_opinions[i]);
  CsvWriter csv(root / "fj_coalition_trajectories.csv",
                {"condition", "day", "topic", "coalition", "median", "ci_low", "ci_high", "n"});
  for (const auto& [condition, runs] : by_condition) {
    for (const TrajectoryPoint& p : opinion_trajectories(runs, cfg.topics)) {
      csv.row({condition, std::to_string(p.day), p.topic_id, std::string(coalition_key(p.coalition)),
               fmt(p.median), fmt(p.ci.low), fmt(p.ci.high), std::to_string(p.n)});
    }
  }
  write_json_file(root / "fj_config.json", to_json(cfg.fj));
}

// ---------------------------------------------------------------------------

void cmd_analyze(const AnalyzeOptions& options) {
  if (options.events.empty()) throw ValidationError("analyze needs at least one event log");
  std::optional<ReferenceData> reference;
  if (options.reference) reference = load_reference(*options.reference);
  std::unique_ptr<ToxicityScorer> scorer;
  if (options.toxicity_sidecar) {
    scorer = std::make_unique<SidecarScorer>(SidecarScorer::load(*options.toxicity_sidecar));
  } else {
    scorer = std::make_unique<HeuristicScorer>();
  }
  ensure_writable(options.out);

  struct RunAnalysis {
    std::string condition;
    std::string run;
    InteractionMatrix interactions;
    ReplyToxicity toxicity;
    RunOpinions opinions;
  };
  std::vector<RunAnalysis> runs(options.events.size());
  parallel_for_jobs(runs.size(), options.jobs, [&](std::size_t i) {
    const fs::path& events_path = options.events[i];
    const RunArtifacts art = load_run(events_path.parent_path().empty() ? fs::path(".")
                                                                        : events_path.parent_path());
    const std::vector<Event> events = load_event_log(events_path);
    const CoalitionMap coalitions = coalition_map(art.population);
    runs[i].condition = art.condition();
    runs[i].run = std::to_string(art.config.run_index);
    runs[i].interactions = interaction_matrix(events, coalitions);
    runs[i].toxicity = collect_reply_toxicity(events, *scorer, coalitions);
    runs[i].opinions = RunOpinions{art.opinions, coalitions};
  });

  // Per-run rows followed by one pooled row set per condition.
  std::map<std::string, std::vector<const RunAnalysis*>> by_condition;
  for (const RunAnalysis& r : runs) by_condition[r.condition].push_back(&r);
  std::vector<RunAnalysis> rows;
  for (const auto& [condition, members] : by_condition) {
    for (const RunAnalysis* r : members) rows.push_back(*r);
    RunAnalysis pooled;
    pooled.condition = condition;
    pooled.run = "pooled";
    std::vector<InteractionMatrix> ms;
    for (const RunAnalysis* r : members) {
      ms.push_back(r->interactions);
      pooled.toxicity.append(r->toxicity);
    }
    pooled.interactions = aggregate(ms);
    rows.push_back(std::move(pooled));
  }

  const fs::path& out = options.out;
  CsvWriter in_csv(out / "interactions_ingroup.csv", {"condition", "run", "coalition", "proportion", "replies"});
  CsvWriter out_csv(out / "interactions_outgroup.csv",
                    {"condition", "run", "from", "to", "proportion", "replies"});
  CsvWriter tin_csv(out / "toxicity_ingroup.csv", {"condition", "run", "coalition", "p95", "replies"});
  CsvWriter tout_csv(out / "toxicity_outgroup.csv", {"condition", "run", "from", "to", "p95", "replies"});
  CsvWriter corr_csv(out / "correlations.csv", {"condition", "run", "metric", "pearson", "n"});
  const auto pairs = out_group_pairs();

  for (const RunAnalysis& r : rows) {
    const auto& m = r.interactions;
    auto row_total = [&](std::size_t i) {
      double t = 0.0;
      for (double v : m.counts[i]) t += v;
      return fmt(t);
    };
    const auto ig = in_group_vector(m);
    const auto og = out_group_vector(m);
    const ToxicityVectors tv = toxicity_vectors(r.toxicity);
    for (std::size_t i = 0; i < kNumCoalitions; ++i) {
      const std::string c(coalition_key(kCoalitions[i]));
      in_csv.row({r.condition, r.run, c, fmt(ig[i]), row_total(i)});
      tin_csv.row({r.condition, r.run, c, fmt(tv.in_group[i]),
                   std::to_string(r.toxicity.scores[i][i].size())});
    }
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const std::size_t a = coalition_index(pairs[k].first);
      const std::size_t b = coalition_index(pairs[k].second);
      const std::string from(coalition_key(pairs[k].first));
      const std::string to(coalition_key(pairs[k].second));
      out_csv.row({r.condition, r.run, from, to, fmt(og[k]), row_total(a)});
      tout_csv.row({r.condition, r.run, from, to, fmt(tv.out_group[k]),
                    std::to_string(r.toxicity.scores[a][b].size())});
    }
    if (reference) {
      const std::pair<const char*, Correlation> metrics[] = {
          {"interactions_ingroup", pearson_pairwise(ig, reference->in_group)},
          {"interactions_outgroup", pearson_pairwise(og, reference->out_group)},
          {"toxicity_ingroup", pearson_pairwise(tv.in_group, reference->toxicity_in_group)},
          {"toxicity_outgroup", pearson_pairwise(tv.out_group, reference->toxicity_out_group)},
      };
      for (const auto& [metric, c] : metrics) {
        corr_csv.row({r.condition, r.run, std::string(metric), fmt(c.r), std::to_string(c.n)});
      }
    }
  }

  CsvWriter traj_csv(out / "trajectories.csv",
                     {"condition", "day", "topic", "coalition", "median", "ci_low", "ci_high", "n"});
  CsvWriter shift_csv(out / "shifts.csv",
                      {"condition", "topic", "coalition", "initial_display", "final_display"});
  for (const auto& [condition, members] : by_condition) {
    std::vector<RunOpinions> ops;
    for (const RunAnalysis* r : members) ops.push_back(r->opinions);
    for (const TrajectoryPoint& p : opinion_trajectories(ops, options.topics, options.bootstrap)) {
      traj_csv.row({condition, std::to_string(p.day), p.topic_id, std::string(coalition_key(p.coalition)),
                    fmt(p.median), fmt(p.ci.low), fmt(p.ci.high), std::to_string(p.n)});
    }
    const bool enough = std::all_of(ops.begin(), ops.end(),
                                    [](const RunOpinions& o) { return o.snapshots.size() >= 2; });
    if (!enough) continue;
    for (const OpinionShift& s : opinion_shifts(ops, options.topics)) {
      shift_csv.row({condition, s.topic_id, std::string(coalition_key(s.coalition)),
                     fmt(s.initial_display), fmt(s.final_display)});
    }
  }
}

// ---------------------------------------------------------------------------

void cmd_compare(const CompareOptions& options) {
  using Key = std::tuple<std::string, int, std::string, std::string>;
  auto load = [](const fs::path& path) {
    const CsvTable t = read_csv(path);
    const std::size_t cc = t.column("condition", path), dc = t.column("day", path),
                      tc = t.column("topic", path), kc = t.column("coalition", path),
                      mc = t.column("median", path);
    std::vector<std::pair<Key, double>> rows;
    for (const auto& r : t.rows) {
      rows.push_back({Key{r[cc], std::stoi(r[dc]), r[tc], r[kc]}, std::stod(r[mc])});
    }
    return rows;
  };
  const auto llm = load(options.llm);
  const auto fj = load(options.fj);
  std::map<Key, double> fj_map(fj.begin(), fj.end());
  std::map<Key, double> llm_map(llm.begin(), llm.end());

  auto describe = [](const Key& k) {
    return std::get<0>(k) + "/day " + std::to_string(std::get<1>(k)) + "/" + std::get<2>(k) + "/" +
           std::get<3>(k);
  };
  std::vector<std::string> missing;
  for (const auto& [k, v] : llm_map) {
    if (!fj_map.count(k)) missing.push_back("missing in FJ: " + describe(k));
  }
  for (const auto& [k, v] : fj_map) {
    if (!llm_map.count(k)) missing.push_back("missing in LLM: " + describe(k));
  }
  if (!missing.empty()) {
    std::string msg = "trajectory keys do not match:";
    for (const std::string& m : missing) msg += "\n  " + m;
    throw ValidationError(msg);
  }

  const double scale = options.display_scale ? 2.0 : 1.0;
  if (options.out.has_parent_path()) fs::create_directories(options.out.parent_path());
  CsvWriter csv(options.out,
                {"condition", "day", "topic", "coalition", "llm_median", "fj_median", "difference"});
  for (const auto& [k, v] : llm_map) {
    const double a = scale * v;
    const double b = scale * fj_map.at(k);
    csv.row({std::get<0>(k), std::to_string(std::get<1>(k)), std::get<2>(k), std::get<3>(k), fmt(a),
             fmt(b), fmt(a - b)});
  }
}

}  // namespace polisim
