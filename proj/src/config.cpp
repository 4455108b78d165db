#include "polisim/config.hpp"

#include <fstream>
#include <set>

#include "polisim/errors.hpp"
#include "polisim/opinion.hpp"

namespace polisim {

namespace {

// Overrides fields from present keys and rejects keys nobody asked for.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string context) : j_(j), context_(std::move(context)) {
    if (!j_.is_object()) throw ConfigError(context_ + ": expected a JSON object");
  }

  template <class T>
  bool get(const std::string& key, T& out) {
    const json* v = raw(key);
    if (!v) return false;
    try {
      out = v->get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(context_ + "." + key + ": " + e.what());
    }
    return true;
  }

  const json* raw(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(context_ + ": unknown key '" + it.key() + "'");
    }
  }

 private:
  const json& j_;
  std::string context_;
  std::set<std::string> seen_;
};

template <class F>
auto wrap(const std::string& context, F&& f) {
  try {
    return f();
  } catch (const ValidationError& e) {
    throw ConfigError(context + ": " + e.what());
  }
}

json opinion_to_json(const OpinionRecord& r) {
  return json{{"topic_id", r.topic_id},
              {"label", label_key(r.label)},
              {"stance_score", r.stance_score},
              {"justification", r.justification}};
}

OpinionRecord opinion_from_json(const json& j) {
  OpinionRecord r;
  ObjectReader rd(j, "opinion");
  std::string label;
  rd.get("topic_id", r.topic_id);
  rd.get("label", label);
  rd.get("stance_score", r.stance_score);
  rd.get("justification", r.justification);
  rd.finish();
  auto parsed = parse_label(label);
  if (!parsed) throw ConfigError("opinion: unknown label '" + label + "'");
  r.label = *parsed;
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------

json to_json(const RecommenderConfig& cfg) {
  return json{{"kind", recommender_key(cfg.kind)},
              {"feed_limit", cfg.feed_limit},
              {"external_fraction", cfg.external_fraction},
              {"recency_window_hours", cfg.recency_window_hours},
              {"popularity_primary", cfg.popularity_primary}};
}

RecommenderConfig recommender_config_from_json(const json& j, RecommenderConfig base) {
  if (j.is_string()) {
    base.kind = wrap("recommender", [&] { return parse_recommender(j.get<std::string>()); });
    return base;
  }
  ObjectReader rd(j, "recommender");
  std::string kind;
  if (rd.get("kind", kind)) base.kind = wrap("recommender", [&] { return parse_recommender(kind); });
  rd.get("feed_limit", base.feed_limit);
  rd.get("external_fraction", base.external_fraction);
  rd.get("recency_window_hours", base.recency_window_hours);
  rd.get("popularity_primary", base.popularity_primary);
  rd.finish();
  return base;
}

json to_json(const DriverConfig& cfg) {
  return json{{"mode", driver_mode_key(cfg.mode)},
              {"endpoint_url", cfg.endpoint_url},
              {"model_name", cfg.model_name},
              {"temperature", cfg.temperature},
              {"max_retries", cfg.max_retries},
              {"timeout_ms", cfg.timeout.count()},
              {"max_in_flight", cfg.max_in_flight},
              {"bias_instructions", cfg.bias_instructions},
              {"stub_drift_probability", cfg.stub_drift_probability}};
}

DriverConfig driver_config_from_json(const json& j, DriverConfig base) {
  ObjectReader rd(j, "driver");
  std::string mode;
  if (rd.get("mode", mode)) base.mode = wrap("driver", [&] { return parse_driver_mode(mode); });
  rd.get("endpoint_url", base.endpoint_url);
  rd.get("model_name", base.model_name);
  rd.get("temperature", base.temperature);
  rd.get("max_retries", base.max_retries);
  std::int64_t timeout_ms = 0;
  if (rd.get("timeout_ms", timeout_ms)) base.timeout = std::chrono::milliseconds(timeout_ms);
  rd.get("max_in_flight", base.max_in_flight);
  rd.get("bias_instructions", base.bias_instructions);
  rd.get("stub_drift_probability", base.stub_drift_probability);
  rd.finish();
  return base;
}

json to_json(const ActionWeights& w) {
  return json{{"post", w.post},     {"comment", w.comment},   {"like", w.like},
              {"follow", w.follow}, {"unfollow", w.unfollow}, {"none", w.none}};
}

ActionWeights action_weights_from_json(const json& j, ActionWeights base) {
  ObjectReader rd(j, "action_weights");
  rd.get("post", base.post);
  rd.get("comment", base.comment);
  rd.get("like", base.like);
  rd.get("follow", base.follow);
  rd.get("unfollow", base.unfollow);
  rd.get("none", base.none);
  rd.finish();
  return base;
}

json to_json(const SimulationConfig& cfg) {
  return json{{"population_size", cfg.population_size},
              {"days", cfg.days},
              {"network_init", network_init_key(cfg.network_init)},
              {"recommender", to_json(cfg.recommender)},
              {"hourly_weights", cfg.hourly_weights},
              {"action_weights", to_json(cfg.action_weights)},
              {"rng_seed", cfg.rng_seed},
              {"run_index", cfg.run_index},
              {"driver", to_json(cfg.driver)},
              {"recap_feed_items", cfg.recap_feed_items}};
}

SimulationConfig simulation_config_from_json(const json& j, SimulationConfig base) {
  ObjectReader rd(j, "simulation");
  rd.get("population_size", base.population_size);
  rd.get("days", base.days);
  std::string init;
  if (rd.get("network_init", init)) {
    base.network_init = wrap("simulation", [&] { return parse_network_init(init); });
  }
  if (const json* r = rd.raw("recommender")) {
    base.recommender = recommender_config_from_json(*r, base.recommender);
  }
  if (const json* h = rd.raw("hourly_weights")) {
    if (h->is_number()) {
      base.hourly_weights = SimulationConfig::uniform_hourly_weights(h->get<double>());
    } else {
      if (!h->is_array() || h->size() != kHoursPerDay) {
        throw ConfigError("simulation.hourly_weights: expected a number or 24 numbers");
      }
      for (std::size_t i = 0; i < kHoursPerDay; ++i) base.hourly_weights[i] = (*h)[i].get<double>();
    }
  }
  if (const json* a = rd.raw("action_weights")) {
    base.action_weights = action_weights_from_json(*a, base.action_weights);
  }
  rd.get("rng_seed", base.rng_seed);
  rd.get("run_index", base.run_index);
  if (const json* d = rd.raw("driver")) base.driver = driver_config_from_json(*d, base.driver);
  rd.get("recap_feed_items", base.recap_feed_items);
  rd.finish();
  return base;
}

json to_json(const PopulationConfig& cfg) {
  json dist = nullptr;
  if (cfg.coalition_distribution) {
    dist = json::object();
    for (Coalition c : kCoalitions) {
      dist[std::string(coalition_key(c))] = (*cfg.coalition_distribution)[coalition_index(c)];
    }
  }
  json bands = json::array();
  for (const AgeBand& b : cfg.age_bands) {
    bands.push_back({{"min_age", b.min_age}, {"max_age", b.max_age}, {"weight", b.weight}});
  }
  json genders = json::array();
  for (const GenderWeight& g : cfg.gender_weights) {
    genders.push_back({{"gender", g.gender}, {"weight", g.weight}});
  }
  return json{{"population_size", cfg.population_size},
              {"sample_with_replacement", cfg.sample_with_replacement},
              {"coalition_distribution", dist},
              {"age_bands", bands},
              {"gender_weights", genders},
              {"nationality", cfg.nationality},
              {"language", cfg.language}};
}

PopulationConfig population_config_from_json(const json& j, PopulationConfig base) {
  ObjectReader rd(j, "population");
  rd.get("population_size", base.population_size);
  rd.get("sample_with_replacement", base.sample_with_replacement);
  if (const json* d = rd.raw("coalition_distribution")) {
    if (d->is_null()) {
      base.coalition_distribution.reset();
    } else if (d->is_string() && d->get<std::string>() == "uniform") {
      base.coalition_distribution = uniform_coalition_distribution();
    } else {
      ObjectReader dr(*d, "population.coalition_distribution");
      CoalitionDistribution dist{};
      for (Coalition c : kCoalitions) dr.get(std::string(coalition_key(c)), dist[coalition_index(c)]);
      dr.finish();
      base.coalition_distribution = dist;
    }
  }
  if (const json* bands = rd.raw("age_bands")) {
    base.age_bands.clear();
    for (const json& b : *bands) {
      AgeBand band;
      ObjectReader br(b, "population.age_bands[]");
      br.get("min_age", band.min_age);
      br.get("max_age", band.max_age);
      br.get("weight", band.weight);
      br.finish();
      base.age_bands.push_back(band);
    }
  }
  if (const json* genders = rd.raw("gender_weights")) {
    base.gender_weights.clear();
    for (const json& g : *genders) {
      GenderWeight gw;
      ObjectReader gr(g, "population.gender_weights[]");
      gr.get("gender", gw.gender);
      gr.get("weight", gw.weight);
      gr.finish();
      base.gender_weights.push_back(gw);
    }
  }
  rd.get("nationality", base.nationality);
  rd.get("language", base.language);
  rd.finish();
  return base;
}

json to_json(std::span<const Topic> topics) {
  json out = json::array();
  for (const Topic& t : topics) {
    out.push_back({{"id", t.id},
                   {"name", t.name},
                   {"description", t.description},
                   {"supportive_meaning", t.supportive_meaning},
                   {"opposed_meaning", t.opposed_meaning}});
  }
  return out;
}

std::vector<Topic> topics_from_json(const json& j) {
  if (!j.is_array()) throw ConfigError("topics: expected an array");
  std::vector<Topic> topics;
  for (const json& t : j) {
    Topic topic;
    ObjectReader rd(t, "topics[]");
    rd.get("id", topic.id);
    rd.get("name", topic.name);
    rd.get("description", topic.description);
    rd.get("supportive_meaning", topic.supportive_meaning);
    rd.get("opposed_meaning", topic.opposed_meaning);
    rd.finish();
    topics.push_back(std::move(topic));
  }
  wrap("topics", [&] {
    validate_topics(topics);
    return 0;
  });
  return topics;
}

json to_json(const CoalitionPriors& priors) {
  json out = json::object();
  for (const auto& [coalition, per_topic] : priors.entries()) {
    json& c = out[std::string(coalition_key(coalition))];
    for (const auto& [topic, prior] : per_topic) {
      c[topic] = {{"label", label_key(prior.label)}, {"justification", prior.justification}};
    }
  }
  return out;
}

CoalitionPriors priors_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("priors: expected an object");
  CoalitionPriors priors;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const Coalition c = wrap("priors", [&] { return parse_coalition(it.key()); });
    if (!it->is_object()) throw ConfigError("priors." + it.key() + ": expected an object");
    for (auto t = it->begin(); t != it->end(); ++t) {
      ObjectReader rd(*t, "priors." + it.key() + "." + t.key());
      std::string label;
      TopicPrior prior;
      rd.get("label", label);
      rd.get("justification", prior.justification);
      rd.finish();
      auto parsed = parse_label(label);
      if (!parsed) throw ConfigError("priors: unknown label '" + label + "'");
      prior.label = *parsed;
      priors.set(c, t.key(), std::move(prior));
    }
  }
  return priors;
}

json to_json(const AgentProfile& p) {
  json opinions = json::array();
  for (const OpinionRecord& r : p.opinions) opinions.push_back(opinion_to_json(r));
  json initial = json::array();
  for (const OpinionRecord& r : p.initial_opinions()) initial.push_back(opinion_to_json(r));
  return json{{"agent_id", p.agent_id},
              {"name", p.name},
              {"age", p.age ? json(*p.age) : json(nullptr)},
              {"gender", p.gender},
              {"nationality", p.nationality},
              {"language", p.language},
              {"big_five",
               {{"openness", p.big_five.openness},
                {"conscientiousness", p.big_five.conscientiousness},
                {"extraversion", p.big_five.extraversion},
                {"agreeableness", p.big_five.agreeableness},
                {"neuroticism", p.big_five.neuroticism}}},
              {"coalition", coalition_key(p.coalition)},
              {"activity", p.activity},
              {"target_toxicity", p.target_toxicity},
              {"opinions", opinions},
              {"initial_opinions", p.initial_frozen() ? initial : json(nullptr)}};
}

AgentProfile profile_from_json(const json& j) {
  AgentProfile p;
  ObjectReader rd(j, "profile");
  rd.get("agent_id", p.agent_id);
  rd.get("name", p.name);
  if (const json* age = rd.raw("age"); age && !age->is_null()) p.age = age->get<int>();
  rd.get("gender", p.gender);
  rd.get("nationality", p.nationality);
  rd.get("language", p.language);
  if (const json* b = rd.raw("big_five")) {
    ObjectReader br(*b, "profile.big_five");
    br.get("openness", p.big_five.openness);
    br.get("conscientiousness", p.big_five.conscientiousness);
    br.get("extraversion", p.big_five.extraversion);
    br.get("agreeableness", p.big_five.agreeableness);
    br.get("neuroticism", p.big_five.neuroticism);
    br.finish();
  }
  std::string coalition;
  if (rd.get("coalition", coalition)) {
    p.coalition = wrap("profile", [&] { return parse_coalition(coalition); });
  }
  rd.get("activity", p.activity);
  rd.get("target_toxicity", p.target_toxicity);
  if (const json* ops = rd.raw("opinions")) {
    for (const json& o : *ops) p.opinions.push_back(opinion_from_json(o));
  }
  if (const json* init = rd.raw("initial_opinions"); init && !init->is_null()) {
    std::vector<OpinionRecord> initial;
    for (const json& o : *init) initial.push_back(opinion_from_json(o));
    p.restore_initial_opinions(std::move(initial));
  }
  rd.finish();
  return p;
}

json population_to_json(std::span<const AgentProfile> population) {
  json out = json::array();
  for (const AgentProfile& p : population) out.push_back(to_json(p));
  return out;
}

std::vector<AgentProfile> population_from_json(const json& j) {
  if (!j.is_array()) throw ConfigError("population: expected an array");
  std::vector<AgentProfile> out;
  for (const json& p : j) out.push_back(profile_from_json(p));
  return out;
}

json to_json(const SocialGraph& graph) {
  json edges = json::array();
  for (const auto& [a, b] : graph.edges()) edges.push_back(json::array({a, b}));
  return json{{"nodes", graph.nodes()}, {"edges", edges}};
}

SocialGraph graph_from_json(const json& j) {
  ObjectReader rd(j, "graph");
  std::vector<AgentId> nodes;
  rd.get("nodes", nodes);
  SocialGraph g(nodes);
  if (const json* edges = rd.raw("edges")) {
    for (const json& e : *edges) {
      if (!e.is_array() || e.size() != 2) throw ConfigError("graph.edges: expected [follower, followee]");
      wrap("graph", [&] { return g.follow(e[0].get<std::string>(), e[1].get<std::string>()); });
    }
  }
  rd.finish();
  return g;
}

json snapshot_to_json(const GraphSnapshot& graph, const OpinionSnapshot& opinions) {
  if (graph.day != opinions.day) throw ValidationError("graph and opinion snapshot days differ");
  json ops = json::object();
  for (const auto& [agent, scores] : opinions.scores) ops[agent] = scores;
  return json{{"day", graph.day}, {"graph", to_json(graph.graph)}, {"opinions", ops}};
}

std::pair<GraphSnapshot, OpinionSnapshot> snapshot_from_json(const json& j) {
  ObjectReader rd(j, "snapshot");
  GraphSnapshot g;
  OpinionSnapshot o;
  rd.get("day", g.day);
  o.day = g.day;
  if (const json* graph = rd.raw("graph")) g.graph = graph_from_json(*graph);
  rd.get("opinions", o.scores);
  rd.finish();
  return {std::move(g), std::move(o)};
}

// ---------------------------------------------------------------------------

void FJSettings::validate() const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ValidationError("fj.lambda must lie in [0, 1]");
  if (!(tolerance > 0.0)) throw ValidationError("fj.tolerance must be positive");
  if (max_iters == 0) throw ValidationError("fj.max_iters must be positive");
}

FJParams FJSettings::params(std::size_t agents) const {
  FJParams p;
  p.susceptibility.assign(agents, lambda);
  p.tolerance = tolerance;
  p.max_iters = max_iters;
  p.steps_per_day = steps_per_day;
  p.parallel = parallel;
  return p;
}

json to_json(const FJSettings& s) {
  return json{{"lambda", s.lambda},
              {"tolerance", s.tolerance},
              {"max_iters", s.max_iters},
              {"steps_per_day", s.steps_per_day},
              {"parallel", s.parallel}};
}

FJSettings fj_settings_from_json(const json& j, FJSettings base) {
  ObjectReader rd(j, "fj");
  rd.get("lambda", base.lambda);
  rd.get("tolerance", base.tolerance);
  rd.get("max_iters", base.max_iters);
  rd.get("steps_per_day", base.steps_per_day);
  rd.get("parallel", base.parallel);
  rd.finish();
  return base;
}

void ExperimentConfig::validate() const {
  if (runs < 1) throw ConfigError("runs must be at least 1");
  if (jobs < 1) throw ConfigError("jobs must be at least 1");
  if (out_dir.empty()) throw ConfigError("out_dir must not be empty");
  if (population.population_size != simulation.population_size) {
    throw ConfigError("population.population_size differs from simulation.population_size");
  }
  if (!seeds_path && synthetic_seed_count == 0) {
    throw ConfigError("synthetic_seed_count must be positive without a seeds file");
  }
  wrap("config", [&] {
    simulation.validate();
    population.validate();
    if (topics.empty()) throw ValidationError("at least one topic is required");
    validate_topics(topics);
    priors.validate(topics);
    fj.validate();
    return 0;
  });
}

json to_json(const ExperimentConfig& cfg) {
  return json{{"simulation", to_json(cfg.simulation)},
              {"population", to_json(cfg.population)},
              {"topics", to_json(cfg.topics)},
              {"priors", to_json(cfg.priors)},
              {"seeds_path", cfg.seeds_path ? json(*cfg.seeds_path) : json(nullptr)},
              {"synthetic_seed_count", cfg.synthetic_seed_count},
              {"reference_path", cfg.reference_path ? json(*cfg.reference_path) : json(nullptr)},
              {"out_dir", cfg.out_dir},
              {"runs", cfg.runs},
              {"matrix", cfg.matrix},
              {"jobs", cfg.jobs},
              {"fj", to_json(cfg.fj)}};
}

ExperimentConfig experiment_config_from_json(const json& j, ExperimentConfig base) {
  ObjectReader rd(j, "config");
  if (const json* s = rd.raw("simulation")) {
    base.simulation = simulation_config_from_json(*s, base.simulation);
    base.population.population_size = base.simulation.population_size;
  }
  if (const json* p = rd.raw("population")) {
    base.population = population_config_from_json(*p, base.population);
  }
  if (const json* t = rd.raw("topics")) base.topics = topics_from_json(*t);
  if (const json* p = rd.raw("priors")) base.priors = priors_from_json(*p);
  if (const json* s = rd.raw("seeds_path")) {
    if (s->is_null()) base.seeds_path.reset(); else base.seeds_path = s->get<std::string>();
  }
  rd.get("synthetic_seed_count", base.synthetic_seed_count);
  if (const json* r = rd.raw("reference_path")) {
    if (r->is_null()) base.reference_path.reset(); else base.reference_path = r->get<std::string>();
  }
  rd.get("out_dir", base.out_dir);
  rd.get("runs", base.runs);
  rd.get("matrix", base.matrix);
  rd.get("jobs", base.jobs);
  if (const json* f = rd.raw("fj")) base.fj = fj_settings_from_json(*f, base.fj);
  rd.finish();
  return base;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path, ExperimentConfig base) {
  const json j = read_json_file(path);
  ExperimentConfig cfg = experiment_config_from_json(j, std::move(base));
  // Input files named in the config resolve against the config's directory.
  const std::filesystem::path dir = path.parent_path();
  for (auto* field : {&cfg.seeds_path, &cfg.reference_path}) {
    if (*field && std::filesystem::path(**field).is_relative()) {
      const bool from_file = field == &cfg.seeds_path ? j.contains("seeds_path") : j.contains("reference_path");
      if (from_file) **field = (dir / **field).lexically_normal().string();
    }
  }
  return cfg;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace polisim
