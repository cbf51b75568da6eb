// Command-line front end: gen, score, train, run-matrix, stats, verify-paper.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gradcur/config.hpp"
#include "gradcur/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitDependency = 3;
constexpr int kExitVerification = 4;

gradcur::ExperimentConfig resolve_config(const std::string& config_path) {
  std::string path = config_path;
  if (path.empty()) {
    if (const char* env = std::getenv("GRADCUR_CONFIG")) path = env;
  }
  if (path.empty()) return gradcur::ExperimentConfig{};
  return gradcur::load_config(path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gradient-based data valuation and curriculum training on synthetic scenarios"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("-c,--config", config_path,
                 "experiment config (JSON); defaults to $GRADCUR_CONFIG or built-ins");

  // gen
  auto* gen = app.add_subcommand("gen", "generate the synthetic dataset");
  int n_train = -1, n_val = -1, t_obs = -1, t_fut = -1;
  double hard_fraction = -1.0, dt = -1.0, noise_sigma = -1.0;
  std::int64_t gen_seed = -1;
  std::string dataset_path;
  gen->add_option("--n-train", n_train, "training scenarios");
  gen->add_option("--n-val", n_val, "validation scenarios");
  gen->add_option("--hard-fraction", hard_fraction, "crossing_conflict fraction per split");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--t-obs", t_obs, "observed steps");
  gen->add_option("--t-fut", t_fut, "future steps");
  gen->add_option("--dt", dt, "seconds per step");
  gen->add_option("--noise-sigma", noise_sigma, "position noise sigma [m]");
  gen->add_option("--dataset", dataset_path, "output path");

  // score
  auto* score = app.add_subcommand("score", "compute a score table for the training split");
  std::string method_name;
  score->add_option("--method", method_name, "one of meta|tracin|loss|hybrid")->required();

  // train
  auto* train = app.add_subcommand("train", "run one curriculum training run");
  std::string mode_name;
  std::uint64_t train_seed = 0;
  bool seed_given = false;
  train->add_option("--mode", mode_name,
                    "one of uniform|meta|tracin|loss_spl|hybrid|hard_select")
      ->required();
  train->add_option("--seed", train_seed, "training seed")->each([&](const std::string&) {
    seed_given = true;
  });
  int epochs = -1, batch_size = -1;
  double lr0 = -1.0, w_max = -1.0, top_k = -1.0;
  train->add_option("--epochs", epochs, "total epochs");
  train->add_option("--batch-size", batch_size, "mini-batch size");
  train->add_option("--lr0", lr0, "initial learning rate");
  train->add_option("--w-max", w_max, "maximum curriculum weight");
  train->add_option("--top-k", top_k, "hard_select fraction");

  // run-matrix
  auto* matrix = app.add_subcommand("run-matrix", "run every configured (mode, seed) pair");
  std::vector<std::string> matrix_modes;
  std::vector<std::uint64_t> matrix_seeds;
  matrix->add_option("--modes", matrix_modes, "override mode list")->delimiter(',');
  matrix->add_option("--seeds", matrix_seeds, "override seed list")->delimiter(',');

  // stats
  app.add_subcommand("stats", "summaries and paired t-tests over completed runs");

  // verify-paper
  app.add_subcommand("verify-paper",
                     "recompute the published result tables from embedded per-seed values");

  CLI11_PARSE(app, argc, argv);

  try {
    gradcur::ExperimentConfig cfg = resolve_config(config_path);

    if (gen->parsed()) {
      if (n_train >= 0) cfg.gen.n_train = n_train;
      if (n_val >= 0) cfg.gen.n_val = n_val;
      if (hard_fraction >= 0.0) cfg.gen.hard_fraction = hard_fraction;
      if (gen_seed >= 0) cfg.gen.seed = static_cast<std::uint64_t>(gen_seed);
      if (t_obs >= 0) cfg.gen.t_obs = t_obs;
      if (t_fut >= 0) cfg.gen.t_fut = t_fut;
      if (dt >= 0.0) cfg.gen.dt = dt;
      if (noise_sigma >= 0.0) cfg.gen.noise_sigma = noise_sigma;
      if (!dataset_path.empty()) cfg.paths.dataset = dataset_path;
      gradcur::cmd_gen(cfg);
    } else if (score->parsed()) {
      gradcur::cmd_score(cfg, gradcur::score_method_from_string(method_name));
    } else if (train->parsed()) {
      if (epochs >= 0) cfg.train.epochs = epochs;
      if (batch_size >= 0) cfg.train.batch_size = batch_size;
      if (lr0 >= 0.0) cfg.train.lr0 = lr0;
      if (w_max >= 0.0) cfg.curriculum.w_max = w_max;
      if (top_k >= 0.0) cfg.curriculum.top_k = top_k;
      const std::uint64_t seed = seed_given ? train_seed : cfg.train.seed;
      gradcur::cmd_train(cfg, gradcur::mode_from_string(mode_name), seed);
    } else if (matrix->parsed()) {
      if (!matrix_modes.empty()) {
        cfg.modes.clear();
        for (const std::string& m : matrix_modes) cfg.modes.push_back(gradcur::mode_from_string(m));
      }
      if (!matrix_seeds.empty()) cfg.seeds = matrix_seeds;
      gradcur::cmd_run_matrix(cfg);
    } else if (app.get_subcommand("stats")->parsed()) {
      gradcur::cmd_stats(cfg);
    } else if (app.get_subcommand("verify-paper")->parsed()) {
      if (!gradcur::cmd_verify_paper().ok) return kExitVerification;
    }
  } catch (const gradcur::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const gradcur::PreconditionError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const gradcur::DependencyError& e) {
    std::cerr << "dependency error: " << e.what() << "\n";
    return kExitDependency;
  } catch (const gradcur::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}
