#include "polisim/seeding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>

#include "polisim/errors.hpp"
#include "polisim/stats.hpp"

namespace polisim {

// ---------------------------------------------------------------------------
// Seed records

std::vector<SeedRecord> read_seed_records(std::istream& in) {
  std::vector<SeedRecord> seeds;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      SeedRecord r;
      r.user_id = j.at("user_id").get<std::string>();
      r.n_posts = j.at("n_posts").get<std::int64_t>();
      r.coalition = parse_coalition(j.at("coalition").get<std::string>());
      r.avg_toxicity = j.at("avg_toxicity").get<double>();
      if (r.n_posts < 0) throw ValidationError("n_posts must be non-negative");
      if (!(r.avg_toxicity >= 0.0 && r.avg_toxicity <= 1.0)) {
        throw ValidationError("avg_toxicity outside [0, 1]");
      }
      seeds.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw ValidationError("seed line " + std::to_string(line_no) + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError("seed line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return seeds;
}

std::vector<SeedRecord> load_seed_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read seed file " + path.string());
  return read_seed_records(in);
}

void write_seed_records(std::ostream& out, std::span<const SeedRecord> seeds) {
  for (const SeedRecord& r : seeds) {
    nlohmann::ordered_json j;
    j["user_id"] = r.user_id;
    j["n_posts"] = r.n_posts;
    j["coalition"] = coalition_key(r.coalition);
    j["avg_toxicity"] = r.avg_toxicity;
    out << j.dump() << '\n';
  }
}

std::vector<SeedRecord> synthetic_seed_records(std::size_t count, std::uint64_t seed) {
  // Right-skewed coalition mix; per-coalition toxicity centres.
  constexpr CoalitionDistribution mix{0.45, 0.22, 0.20, 0.13};
  constexpr std::array<double, 4> toxicity_centre{0.35, 0.20, 0.15, 0.28};
  Rng rng(seed);
  std::vector<SeedRecord> seeds;
  seeds.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    SeedRecord r;
    r.user_id = "seed" + std::to_string(i);
    r.coalition = sample_coalition(mix, rng);
    // Log-uniform post counts in [0, 5000).
    r.n_posts = static_cast<std::int64_t>(std::floor(std::exp(rng.uniform() * std::log(5000.0)))) - 1;
    const double jitter = (rng.uniform() - 0.5) * 0.3;
    r.avg_toxicity = std::clamp(toxicity_centre[coalition_index(r.coalition)] + jitter, 0.0, 1.0);
    seeds.push_back(std::move(r));
  }
  return seeds;
}

// ---------------------------------------------------------------------------
// Activity

double activity_threshold(std::span<const std::int64_t> post_counts) {
  if (post_counts.empty()) throw ValidationError("activity_threshold of an empty list");
  std::vector<double> values;
  values.reserve(post_counts.size());
  for (std::int64_t n : post_counts) {
    if (n < 0) throw ValidationError("negative post count");
    values.push_back(static_cast<double>(n));
  }
  return percentile(values, 0.995);
}

double normalize_activity(std::int64_t n_posts, double n995) {
  if (!(n995 > 0.0)) throw ValidationError("activity threshold must be positive");
  if (n_posts < 0) throw ValidationError("negative post count");
  if (static_cast<double>(n_posts) >= n995) return 1.0;
  return std::min(std::log1p(static_cast<double>(n_posts)) / std::log1p(n995), 1.0);
}

// ---------------------------------------------------------------------------
// Coalitions

CoalitionDistribution uniform_coalition_distribution() { return {0.25, 0.25, 0.25, 0.25}; }

void validate_distribution(const CoalitionDistribution& dist) {
  double total = 0.0;
  for (double p : dist) {
    if (!(p >= 0.0)) throw ValidationError("coalition probability must be non-negative");
    total += p;
  }
  if (std::fabs(total - 1.0) > 1e-9) {
    throw ValidationError("coalition probabilities must sum to 1 (got " + std::to_string(total) +
                          ")");
  }
}

Coalition sample_coalition(const CoalitionDistribution& dist, Rng& rng) {
  validate_distribution(dist);
  return kCoalitions[rng.weighted(dist)];
}

// ---------------------------------------------------------------------------
// Priors

void CoalitionPriors::set(Coalition c, const std::string& topic_id, TopicPrior prior) {
  priors_[c][topic_id] = std::move(prior);
}

const TopicPrior* CoalitionPriors::find(Coalition c, const std::string& topic_id) const {
  auto it = priors_.find(c);
  if (it == priors_.end()) return nullptr;
  auto jt = it->second.find(topic_id);
  return jt == it->second.end() ? nullptr : &jt->second;
}

const TopicPrior& CoalitionPriors::at(Coalition c, const std::string& topic_id) const {
  const TopicPrior* p = find(c, topic_id);
  if (!p) {
    throw ValidationError("missing prior for coalition '" + std::string(coalition_key(c)) +
                          "' on topic '" + topic_id + "'");
  }
  return *p;
}

void CoalitionPriors::validate(std::span<const Topic> topics) const {
  for (Coalition c : kCoalitions) {
    for (const Topic& t : topics) at(c, t.id);
  }
}

CoalitionPriors CoalitionPriors::defaults() {
  using L = StanceLabel;
  CoalitionPriors p;
  const auto cl = Coalition::CentreLeft;
  p.set(cl, "civil_rights",
        {L::StronglySupportive,
         "Support for equal marriage and adoption rights for same-sex couples, "
         "anti-homotransphobia laws, and recognition of LGBTQIA+ rights."});
  p.set(cl, "immigration",
        {L::Supportive,
         "Policies of reception and inclusion are needed, aiming to facilitate integration "
         "pathways, guarantee migrants' rights, and build a European immigration management "
         "system based on solidarity among member states. Humanitarian corridors should be "
         "expanded for emergency situations."});
  p.set(cl, "nuclear",
        {L::StronglyOpposed,
         "The ecological transition must prioritize renewables and energy efficiency; nuclear "
         "power is considered too expensive, slow to implement, and incompatible with the "
         "urgent need to reduce emissions by 2030, while also raising unresolved environmental "
         "concerns."});
  p.set(cl, "reddito_di_cittadinanza",
        {L::Supportive,
         "The current system shouldn't be abolished, but we should address distortions. "
         "Proposals include recalibrating the benefit, introducing support for large families, "
         "a minimum wage, mandating pay for curricular internships, and abolishing unpaid "
         "extracurricular internships."});

  const auto m5s = Coalition::M5S;
  p.set(m5s, "civil_rights",
        {L::StronglySupportive, "Support for equal marriage, anti-homotransphobia legislation."});
  p.set(m5s, "immigration",
        {L::Supportive,
         "A humanitarian approach is needed, with integration policies and mandatory "
         "redistribution of migrants across Europe."});
  p.set(m5s, "nuclear",
        {L::StronglyOpposed,
         "Nuclear energy has high costs and safety risks. We should focus on a decentralized "
         "energy model that encourages self-production and local energy efficiency."});
  p.set(m5s, "reddito_di_cittadinanza",
        {L::StronglySupportive,
         "The reddito di cittadinanza is strongly defended, with proposals to enhance the "
         "efficiency of active labor policies and implement antifraud monitoring mechanisms."});

  const auto right = Coalition::Right;
  p.set(right, "civil_rights",
        {L::StronglyOpposed,
         "We should avoid reforms introducing new rights regarding family and gender identity, "
         "with a preference for defending the 'traditional family.'"});
  p.set(right, "immigration",
        {L::StronglyOpposed,
         "We should stop illegal immigration, with the support for stricter control policies, "
         "naval blockades, and flow management through bilateral agreements with countries of "
         "origin. We should create European-managed centers outside Europe to process asylum "
         "requests and distribute refugees fairly."});
  p.set(right, "nuclear",
        {L::StronglySupportive,
         "We should support the development of next-generation nuclear power. This includes "
         "investment in research, production facilities, and integration with renewable energy "
         "sources to ensure energy security and reduce dependence on imports."});
  p.set(right, "reddito_di_cittadinanza",
        {L::StronglyOpposed,
         "We should abolish the reddito di cittadinanza, with a preference for targeted support "
         "measures for employment and vulnerable groups to prevent abuse."});

  const auto tp = Coalition::ThirdPole;
  p.set(tp, "civil_rights",
        {L::Supportive,
         "We need the introduction of laws against homophobia and transphobia, the creation of "
         "an Anti-Discrimination Authority."});
  p.set(tp, "immigration",
        {L::Supportive,
         "A regulated and planned immigration system is needed, with integration policies, "
         "regularization for those with jobs, and training pathways. Expanding humanitarian "
         "corridors and establishing a Ministry for Migration are also supported."});
  p.set(tp, "nuclear",
        {L::Supportive,
         "Including nuclear energy in the energy mix is needed to achieve the 'net zero "
         "emissions' goal by 2050, considering it necessary to meet future energy needs safely "
         "and efficiently."});
  p.set(tp, "reddito_di_cittadinanza",
        {L::Opposed,
         "The current system is considered ineffective. It should be reformed to be reserved "
         "only for those unfit for work. The benefit should be revoked after the first job "
         "refusal, and a time limit should be imposed: if no employment is found within two "
         "years, the amount is reduced."});
  return p;
}

std::vector<OpinionRecord> initial_opinions(Coalition coalition, std::span<const Topic> topics,
                                            const CoalitionPriors& priors) {
  std::vector<OpinionRecord> out;
  out.reserve(topics.size());
  for (const Topic& t : topics) {
    const TopicPrior& prior = priors.at(coalition, t.id);
    out.push_back({t.id, prior.label, label_to_score(prior.label), prior.justification});
  }
  return out;
}

std::string_view toxicity_token(double target_toxicity) {
  if (target_toxicity < 1.0 / 3.0) return "low";
  if (target_toxicity < 2.0 / 3.0) return "moderate";
  return "high";
}

// ---------------------------------------------------------------------------
// Population

void PopulationConfig::validate() const {
  if (population_size < 2) throw ValidationError("population_size must be at least 2");
  if (coalition_distribution) validate_distribution(*coalition_distribution);
  if (age_bands.empty()) throw ValidationError("age_bands must not be empty");
  double age_total = 0.0;
  for (const AgeBand& b : age_bands) {
    if (b.min_age < 18 || b.max_age > 60 || b.min_age > b.max_age) {
      throw ValidationError("age band outside [18, 60]");
    }
    if (!(b.weight >= 0.0)) throw ValidationError("negative age band weight");
    age_total += b.weight;
  }
  if (!(age_total > 0.0)) throw ValidationError("age band weights are all zero");
  double gender_total = 0.0;
  for (const GenderWeight& g : gender_weights) {
    if (g.gender.empty()) throw ValidationError("empty gender category");
    if (!(g.weight >= 0.0)) throw ValidationError("negative gender weight");
    gender_total += g.weight;
  }
  if (!(gender_total > 0.0)) throw ValidationError("gender weights are all zero");
}

namespace {

constexpr std::array<std::string_view, 24> kFirstNames{
    "Alessandro", "Giulia", "Marco", "Chiara", "Luca", "Francesca", "Matteo", "Sara",
    "Lorenzo", "Martina", "Davide", "Elena", "Simone", "Valentina", "Andrea", "Federica",
    "Stefano", "Alice", "Riccardo", "Silvia", "Paolo", "Irene", "Nicola", "Beatrice"};
constexpr std::array<std::string_view, 24> kLastNames{
    "Rossi", "Bianchi", "Ferrari", "Esposito", "Romano", "Colombo", "Ricci", "Marino",
    "Greco", "Bruno", "Gallo", "Conti", "Costa", "Giordano", "Mancini", "Lombardi",
    "Moretti", "Barbieri", "Fontana", "Santoro", "Mariani", "Rinaldi", "Caruso", "Ferri"};

constexpr std::array<std::array<std::string_view, 3>, 5> kTraitDescriptors{{
    {"very open to new experiences", "moderately open to new experiences",
     "cautious about new experiences"},
    {"highly conscientious", "moderately organized", "rather spontaneous and careless"},
    {"very extroverted", "moderately sociable", "introverted"},
    {"very agreeable", "moderately cooperative", "often confrontational"},
    {"emotionally volatile", "occasionally anxious", "emotionally stable"},
}};

std::vector<std::size_t> shuffled(std::vector<std::size_t> v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.index(i)]);
  return v;
}

std::string make_agent_id(std::size_t i, std::size_t n) {
  std::size_t width = 3;
  for (std::size_t m = n - 1; m >= 1000; m /= 10) ++width;
  std::string digits = std::to_string(i);
  return "a" + std::string(width > digits.size() ? width - digits.size() : 0, '0') + digits;
}

std::vector<std::size_t> select_seeds(std::span<const SeedRecord> seeds,
                                      const PopulationConfig& cfg, Rng& rng) {
  const std::size_t n = cfg.population_size;
  std::vector<std::size_t> chosen;
  chosen.reserve(n);
  if (!cfg.coalition_distribution) {
    if (cfg.sample_with_replacement) {
      for (std::size_t i = 0; i < n; ++i) chosen.push_back(rng.index(seeds.size()));
      return chosen;
    }
    if (seeds.size() < n) {
      throw ValidationError("seed corpus has " + std::to_string(seeds.size()) +
                            " records but population_size is " + std::to_string(n) +
                            "; enable sample_with_replacement");
    }
    std::vector<std::size_t> all(seeds.size());
    std::iota(all.begin(), all.end(), 0);
    all = shuffled(std::move(all), rng);
    chosen.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n));
    return chosen;
  }

  std::array<std::vector<std::size_t>, 4> pools;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    pools[coalition_index(seeds[i].coalition)].push_back(i);
  }
  if (!cfg.sample_with_replacement) {
    for (auto& pool : pools) pool = shuffled(std::move(pool), rng);
  }
  std::array<std::size_t, 4> next{};
  for (std::size_t i = 0; i < n; ++i) {
    const Coalition c = sample_coalition(*cfg.coalition_distribution, rng);
    auto& pool = pools[coalition_index(c)];
    if (pool.empty()) {
      throw ValidationError("no seed records for coalition '" + std::string(coalition_key(c)) + "'");
    }
    if (cfg.sample_with_replacement) {
      chosen.push_back(pool[rng.index(pool.size())]);
    } else {
      auto& k = next[coalition_index(c)];
      if (k >= pool.size()) {
        throw ValidationError("seed records for coalition '" + std::string(coalition_key(c)) +
                              "' exhausted; enable sample_with_replacement");
      }
      chosen.push_back(pool[k++]);
    }
  }
  return chosen;
}

}  // namespace

std::vector<AgentProfile> build_population(std::span<const SeedRecord> seeds,
                                           const PopulationConfig& config,
                                           std::span<const Topic> topics,
                                           const CoalitionPriors& priors, Rng& rng) {
  if (seeds.empty()) throw ValidationError("seed corpus is empty");
  config.validate();
  validate_topics(topics);
  priors.validate(topics);

  std::vector<std::int64_t> counts;
  counts.reserve(seeds.size());
  for (const SeedRecord& s : seeds) counts.push_back(s.n_posts);
  const double n995 = activity_threshold(counts);

  const std::vector<std::size_t> chosen = select_seeds(seeds, config, rng);

  std::vector<double> age_weights, gender_weights;
  for (const AgeBand& b : config.age_bands) age_weights.push_back(b.weight);
  for (const GenderWeight& g : config.gender_weights) gender_weights.push_back(g.weight);

  std::vector<AgentProfile> population;
  population.reserve(chosen.size());
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    const SeedRecord& seed = seeds[chosen[i]];
    AgentProfile p;
    p.agent_id = make_agent_id(i, chosen.size());
    p.name = std::string(kFirstNames[rng.index(kFirstNames.size())]) + " " +
             std::string(kLastNames[rng.index(kLastNames.size())]);
    const AgeBand& band = config.age_bands[rng.weighted(age_weights)];
    p.age = band.min_age +
            static_cast<int>(rng.index(static_cast<std::size_t>(band.max_age - band.min_age + 1)));
    p.gender = config.gender_weights[rng.weighted(gender_weights)].gender;
    p.nationality = config.nationality;
    p.language = config.language;
    p.big_five.openness = std::string(kTraitDescriptors[0][rng.index(3)]);
    p.big_five.conscientiousness = std::string(kTraitDescriptors[1][rng.index(3)]);
    p.big_five.extraversion = std::string(kTraitDescriptors[2][rng.index(3)]);
    p.big_five.agreeableness = std::string(kTraitDescriptors[3][rng.index(3)]);
    p.big_five.neuroticism = std::string(kTraitDescriptors[4][rng.index(3)]);
    p.coalition = seed.coalition;
    // A zero threshold means almost every seed is silent; any poster clips to 1.
    p.activity = n995 > 0.0 ? normalize_activity(seed.n_posts, n995) : (seed.n_posts > 0 ? 1.0 : 0.0);
    p.target_toxicity = seed.avg_toxicity;
    p.opinions = initial_opinions(p.coalition, topics, priors);
    p.freeze_initial_opinions();
    population.push_back(std::move(p));
  }
  return population;
}

}  // namespace polisim
