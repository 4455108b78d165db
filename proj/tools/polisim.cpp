// Command-line entry point: run, fj, analyze, compare.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "polisim/config.hpp"
#include "polisim/errors.hpp"
#include "polisim/experiment.hpp"

namespace fs = std::filesystem;
using namespace polisim;

namespace {

struct GlobalFlags {
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> jobs;
};

ExperimentConfig base_config(const GlobalFlags& g) {
  ExperimentConfig cfg;
  if (g.config) cfg = load_experiment_config(*g.config, cfg);
  if (g.seed) cfg.simulation.rng_seed = *g.seed;
  if (g.out) cfg.out_dir = *g.out;
  if (g.jobs) cfg.jobs = *g.jobs;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Agent-based microblog opinion simulator"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags g;
  app.add_option("--config", g.config, "Experiment config (JSON)");
  app.add_option("--seed", g.seed, "Base RNG seed");
  app.add_option("--out", g.out, "Output directory (compare: output CSV path)");
  app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::PositiveNumber);

  // run
  auto* run = app.add_subcommand("run", "Execute simulation runs");
  std::optional<std::string> driver, network_init, recommender, seeds, model, endpoint;
  std::optional<int> runs, days;
  std::optional<std::size_t> agents;
  bool matrix = false;
  run->add_option("--driver", driver, "stub | llm")->check(CLI::IsMember({"stub", "llm"}));
  run->add_option("--runs", runs, "Repetitions per condition (default 10)");
  run->add_option("--days", days, "Virtual days");
  run->add_option("--agents", agents, "Population size");
  run->add_option("--network-init", network_init, "empty | fully_connected");
  run->add_option("--recommender", recommender,
                  "reverse_chrono_followers_popularity | content_recsys");
  run->add_option("--seeds", seeds, "Seed-record JSON-lines file");
  run->add_option("--model", model, "Model name for the llm driver");
  run->add_option("--endpoint", endpoint, "Chat endpoint URL for the llm driver");
  run->add_flag("--matrix", matrix, "Run the 2x2 network-init x recommender matrix");

  // fj
  auto* fj = app.add_subcommand("fj", "Friedkin-Johnsen baseline over run snapshots");
  std::optional<std::string> runs_dir;
  std::optional<double> lambda, tolerance;
  std::optional<std::size_t> steps_per_day, max_iters;
  fj->add_option("--runs-dir", runs_dir, "Directory holding run_* directories (default --out)");
  fj->add_option("--lambda", lambda, "Uniform susceptibility")->check(CLI::Range(0.0, 1.0));
  fj->add_option("--tolerance", tolerance, "Per-day convergence tolerance");
  fj->add_option("--max-iters", max_iters, "Iteration cap per day");
  fj->add_option("--steps-per-day", steps_per_day, "Fixed steps per day (0 = converge)");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Interaction, toxicity and opinion analyses");
  AnalyzeOptions aopts;
  std::optional<std::string> reference, sidecar;
  std::vector<std::string> events;
  analyze->add_option("--events", events, "Event logs (events.jsonl inside run directories)")
      ->required()
      ->expected(1, -1);
  analyze->add_option("--reference", reference, "Reference data JSON");
  analyze->add_option("--toxicity-sidecar", sidecar, "Precomputed toxicity JSON-lines");

  // compare
  auto* compare = app.add_subcommand("compare", "Join LLM and FJ coalition trajectories");
  CompareOptions copts;
  std::string llm_path, fj_path;
  compare->add_option("--llm", llm_path, "trajectories.csv from analyze")->required();
  compare->add_option("--fj", fj_path, "fj_coalition_trajectories.csv from fj")->required();
  compare->add_flag("--display-scale", copts.display_scale, "Report on the [-2, 2] scale");

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig cfg = base_config(g);
    if (run->parsed()) {
      if (driver) cfg.simulation.driver.mode = parse_driver_mode(*driver);
      if (runs) cfg.runs = *runs;
      if (days) cfg.simulation.days = *days;
      if (agents) {
        cfg.simulation.population_size = *agents;
        cfg.population.population_size = *agents;
      }
      if (network_init) cfg.simulation.network_init = parse_network_init(*network_init);
      if (recommender) cfg.simulation.recommender.kind = parse_recommender(*recommender);
      if (seeds) cfg.seeds_path = *seeds;
      if (model) cfg.simulation.driver.model_name = *model;
      if (endpoint) cfg.simulation.driver.endpoint_url = *endpoint;
      if (matrix) cfg.matrix = true;
      cmd_run(cfg);
      std::cout << "wrote runs to " << cfg.out_dir << '\n';
    } else if (fj->parsed()) {
      if (lambda) cfg.fj.lambda = *lambda;
      if (tolerance) cfg.fj.tolerance = *tolerance;
      if (max_iters) cfg.fj.max_iters = *max_iters;
      if (steps_per_day) cfg.fj.steps_per_day = *steps_per_day;
      const fs::path root = runs_dir ? fs::path(*runs_dir) : fs::path(cfg.out_dir);
      cmd_fj(cfg, root);
      std::cout << "wrote FJ trajectories under " << root.string() << '\n';
    } else if (analyze->parsed()) {
      for (const std::string& e : events) aopts.events.emplace_back(e);
      if (reference) {
        aopts.reference = *reference;
      } else if (cfg.reference_path) {
        aopts.reference = *cfg.reference_path;
      }
      if (sidecar) aopts.toxicity_sidecar = *sidecar;
      aopts.out = g.out ? fs::path(*g.out) : fs::path(cfg.out_dir) / "analysis";
      aopts.topics = cfg.topics;
      aopts.jobs = cfg.jobs;
      cmd_analyze(aopts);
      std::cout << "wrote analysis to " << aopts.out.string() << '\n';
    } else if (compare->parsed()) {
      copts.llm = llm_path;
      copts.fj = fj_path;
      copts.out = g.out ? fs::path(*g.out) : fs::path(cfg.out_dir) / "compare.csv";
      cmd_compare(copts);
      std::cout << "wrote " << copts.out.string() << '\n';
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
