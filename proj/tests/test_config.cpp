#include <gtest/gtest.h>

#include <filesystem>

#include "polisim/config.hpp"
#include "polisim/errors.hpp"

using namespace polisim;
namespace fs = std::filesystem;

TEST(Config, DefaultsRoundTrip) {
  const ExperimentConfig cfg;
  EXPECT_EQ(experiment_config_from_json(to_json(cfg)), cfg);
}

TEST(Config, ModifiedRoundTrip) {
  ExperimentConfig cfg;
  cfg.simulation.days = 3;
  cfg.simulation.network_init = NetworkInit::FullyConnected;
  cfg.simulation.recommender.kind = RecommenderKind::ContentRecSys;
  cfg.simulation.hourly_weights[7] = 0.9;
  cfg.simulation.driver.mode = DriverMode::Remote;
  cfg.simulation.driver.timeout = std::chrono::milliseconds(1500);
  cfg.population.coalition_distribution = uniform_coalition_distribution();
  cfg.seeds_path = "seeds.jsonl";
  cfg.reference_path = "ref.json";
  cfg.matrix = true;
  cfg.runs = 3;
  cfg.fj.lambda = 0.25;
  cfg.fj.steps_per_day = 2;
  const json j = to_json(cfg);
  EXPECT_EQ(experiment_config_from_json(j), cfg);
  EXPECT_EQ(experiment_config_from_json(json::parse(j.dump())), cfg);
}

TEST(Config, PartialOverrides) {
  ExperimentConfig base;
  base.runs = 4;
  const auto cfg = experiment_config_from_json(json{{"simulation", {{"days", 2}}}, {"fj", {{"lambda", 0.9}}}}, base);
  EXPECT_EQ(cfg.runs, 4);
  EXPECT_EQ(cfg.simulation.days, 2);
  EXPECT_EQ(cfg.fj.lambda, 0.9);
  EXPECT_EQ(cfg.fj.tolerance, 1e-8);
  const auto hw = simulation_config_from_json(json{{"hourly_weights", 0.3}}, SimulationConfig{});
  for (double w : hw.hourly_weights) EXPECT_EQ(w, 0.3);
  const auto rec = recommender_config_from_json(json("content_recsys"));
  EXPECT_EQ(rec.kind, RecommenderKind::ContentRecSys);
}

TEST(Config, RejectsUnknownKeys) {
  EXPECT_THROW(experiment_config_from_json(json{{"runz", 3}}), ConfigError);
  EXPECT_THROW(experiment_config_from_json(json{{"simulation", {{"dayz", 3}}}}), ConfigError);
  EXPECT_THROW(fj_settings_from_json(json{{"lambda", 0.5}, {"mu", 1}}), ConfigError);
  EXPECT_THROW(simulation_config_from_json(json{{"hourly_weights", {0.1, 0.2}}}, SimulationConfig{}),
               ConfigError);
}

TEST(Config, Validation) {
  ExperimentConfig cfg;
  cfg.runs = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = ExperimentConfig{};
  cfg.population.population_size = 7;
  EXPECT_THROW(cfg.validate(), ConfigError);
  FJSettings fj;
  fj.lambda = 1.5;
  EXPECT_THROW(fj.validate(), ValidationError);
  const auto p = FJSettings{}.params(3);
  EXPECT_EQ(p.susceptibility, (std::vector<double>{0.5, 0.5, 0.5}));
}

TEST(Config, PopulationAndSnapshots) {
  const auto seeds = synthetic_seed_records(50, 3);
  PopulationConfig pc;
  pc.population_size = 8;
  Rng rng(2);
  auto pop = build_population(seeds, pc, default_topics(), CoalitionPriors::defaults(), rng);
  pop[0].opinion("immigration").stance_score = -0.5;
  pop[0].opinion("immigration").label = StanceLabel::Opposed;
  const auto back = population_from_json(json::parse(population_to_json(pop).dump()));
  EXPECT_EQ(back, pop);
  EXPECT_TRUE(back[0].initial_frozen());
  EXPECT_NE(back[0].initial_opinions(), back[0].opinions);

  SocialGraph g(std::vector<AgentId>{"a", "b", "c"});
  g.follow("a", "b");
  g.follow("c", "a");
  const GraphSnapshot gs{3, g};
  const OpinionSnapshot os{3, {{"a", {{"t", 0.5}}}}};
  const auto [g2, o2] = snapshot_from_json(snapshot_to_json(gs, os));
  EXPECT_EQ(g2.day, 3);
  EXPECT_EQ(g2.graph, g);
  EXPECT_EQ(o2, os);
  json bad = {{"nodes", {"a"}}};
  bad["edges"] = json::array({json::array({"a", "z"})});
  EXPECT_THROW(graph_from_json(bad), ConfigError);
  bad["edges"] = json::array({json::array({"a"})});
  EXPECT_THROW(graph_from_json(bad), ConfigError);
}

TEST(Config, PriorsRoundTrip) {
  const auto priors = CoalitionPriors::defaults();
  const auto back = priors_from_json(to_json(priors));
  EXPECT_EQ(back, priors);
  EXPECT_EQ(topics_from_json(to_json(default_topics())), default_topics());
}

TEST(Config, FileHelpers) {
  const fs::path dir = fs::temp_directory_path() / "polisim_test_config";
  fs::create_directories(dir);
  ExperimentConfig cfg;
  cfg.runs = 2;
  write_json_file(dir / "c.json", to_json(cfg));
  EXPECT_EQ(load_experiment_config(dir / "c.json"), cfg);
  EXPECT_THROW(load_experiment_config(dir / "missing.json"), IoError);
  fs::remove_all(dir);
}
