#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "gradcur/curriculum.hpp"
#include "gradcur/errors.hpp"
#include "gradcur/io.hpp"
#include "gradcur/scenario.hpp"
#include "gradcur/toymodel.hpp"

namespace gradcur {

struct PathsConfig {
  std::string dataset = "out/dataset.jsonl";
  std::string scores_dir = "out/scores";
  std::string runs_dir = "out/runs";
  std::string report = "out/report";  // base name; .json and .txt are appended
  std::string phase0_checkpoint = "out/phase0.ckpt";

  std::string score_csv(ScoreMethod m) const {
    return scores_dir + "/" + to_string(m) + ".csv";
  }
  std::string features_csv() const { return scores_dir + "/features.csv"; }
  std::string run_json(Mode mode, std::uint64_t seed) const {
    return runs_dir + "/" + to_string(mode) + "_seed" + std::to_string(seed) + ".json";
  }
};

// Full experiment description. Every key is optional in the file; defaults
// reproduce the reference pipeline.
struct ExperimentConfig {
  PathsConfig paths;
  GenConfig gen;
  FeatureParams features;
  int hidden = 64;
  TrainConfig train;  // the seed field is overridden per run
  CurriculumConfig curriculum;
  int phase0_epochs = 5;
  std::uint64_t phase0_seed = 1234;
  std::vector<std::uint64_t> seeds{3407, 42, 2024};
  std::vector<Mode> modes{Mode::uniform, Mode::meta, Mode::tracin, Mode::loss_spl, Mode::hybrid};

  ModelDims model_dims() const { return ModelDims::make(gen.t_obs, gen.t_fut, hidden); }
};

inline void validate(const ExperimentConfig& cfg) {
  validate(cfg.gen);
  validate(cfg.train);
  CurriculumConfig c = cfg.curriculum;
  c.total_epochs = cfg.train.epochs;
  c.mode = Mode::hard_select;  // exercises the top_k bound too
  validate(c);
  if (cfg.hidden < 1) throw ConfigError("config: hidden must be >= 1");
  if (cfg.phase0_epochs < 1) throw ConfigError("config: phase0_epochs must be >= 1");
  if (cfg.seeds.empty()) throw ConfigError("config: seeds must be non-empty");
  if (std::set<std::uint64_t>(cfg.seeds.begin(), cfg.seeds.end()).size() != cfg.seeds.size())
    throw ConfigError("config: seeds must be distinct");
  if (cfg.modes.empty()) throw ConfigError("config: modes must be non-empty");
}

namespace detail {

template <typename T>
inline void maybe(const Json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace detail

inline ExperimentConfig config_from_json(const Json& j) {
  ExperimentConfig cfg;
  if (j.contains("paths")) {
    const Json& p = j.at("paths");
    detail::maybe(p, "dataset", cfg.paths.dataset);
    detail::maybe(p, "scores_dir", cfg.paths.scores_dir);
    detail::maybe(p, "runs_dir", cfg.paths.runs_dir);
    detail::maybe(p, "report", cfg.paths.report);
    detail::maybe(p, "phase0_checkpoint", cfg.paths.phase0_checkpoint);
  }
  if (j.contains("gen")) {
    const Json& g = j.at("gen");
    detail::maybe(g, "n_train", cfg.gen.n_train);
    detail::maybe(g, "n_val", cfg.gen.n_val);
    detail::maybe(g, "hard_fraction", cfg.gen.hard_fraction);
    detail::maybe(g, "seed", cfg.gen.seed);
    detail::maybe(g, "t_obs", cfg.gen.t_obs);
    detail::maybe(g, "t_fut", cfg.gen.t_fut);
    detail::maybe(g, "dt", cfg.gen.dt);
    detail::maybe(g, "noise_sigma", cfg.gen.noise_sigma);
  }
  if (j.contains("features")) {
    const Json& f = j.at("features");
    detail::maybe(f, "d_prox", cfg.features.d_prox);
    detail::maybe(f, "r_conflict", cfg.features.r_conflict);
    detail::maybe(f, "dt_conflict", cfg.features.dt_conflict);
    detail::maybe(f, "ttc_cap", cfg.features.ttc_cap);
    detail::maybe(f, "v_min", cfg.features.v_min);
  }
  detail::maybe(j, "hidden", cfg.hidden);
  if (j.contains("train")) {
    const Json& t = j.at("train");
    detail::maybe(t, "epochs", cfg.train.epochs);
    detail::maybe(t, "batch_size", cfg.train.batch_size);
    detail::maybe(t, "lr0", cfg.train.lr0);
    detail::maybe(t, "lr_decay", cfg.train.lr_decay);
    detail::maybe(t, "lr_step", cfg.train.lr_step);
    detail::maybe(t, "seed", cfg.train.seed);
  }
  if (j.contains("curriculum")) {
    const Json& c = j.at("curriculum");
    detail::maybe(c, "e_warm", cfg.curriculum.e_warm);
    detail::maybe(c, "e_ramp", cfg.curriculum.e_ramp);
    detail::maybe(c, "w_max", cfg.curriculum.w_max);
    detail::maybe(c, "top_k", cfg.curriculum.top_k);
    detail::maybe(c, "spl_tau0", cfg.curriculum.spl_tau0);
  }
  detail::maybe(j, "phase0_epochs", cfg.phase0_epochs);
  detail::maybe(j, "phase0_seed", cfg.phase0_seed);
  detail::maybe(j, "seeds", cfg.seeds);
  if (j.contains("modes")) {
    cfg.modes.clear();
    for (const Json& m : j.at("modes")) cfg.modes.push_back(mode_from_string(m.get<std::string>()));
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  ExperimentConfig cfg = config_from_json(j);
  validate(cfg);
  return cfg;
}

inline Json config_to_json(const ExperimentConfig& cfg) {
  Json j;
  j["paths"] = Json{{"dataset", cfg.paths.dataset},
                    {"scores_dir", cfg.paths.scores_dir},
                    {"runs_dir", cfg.paths.runs_dir},
                    {"report", cfg.paths.report},
                    {"phase0_checkpoint", cfg.paths.phase0_checkpoint}};
  j["gen"] = Json{{"n_train", cfg.gen.n_train},     {"n_val", cfg.gen.n_val},
                  {"hard_fraction", cfg.gen.hard_fraction}, {"seed", cfg.gen.seed},
                  {"t_obs", cfg.gen.t_obs},         {"t_fut", cfg.gen.t_fut},
                  {"dt", cfg.gen.dt},               {"noise_sigma", cfg.gen.noise_sigma}};
  j["features"] = Json{{"d_prox", cfg.features.d_prox},
                       {"r_conflict", cfg.features.r_conflict},
                       {"dt_conflict", cfg.features.dt_conflict},
                       {"ttc_cap", cfg.features.ttc_cap},
                       {"v_min", cfg.features.v_min}};
  j["hidden"] = cfg.hidden;
  j["train"] = Json{{"epochs", cfg.train.epochs},   {"batch_size", cfg.train.batch_size},
                    {"lr0", cfg.train.lr0},         {"lr_decay", cfg.train.lr_decay},
                    {"lr_step", cfg.train.lr_step}, {"seed", cfg.train.seed}};
  j["curriculum"] = Json{{"e_warm", cfg.curriculum.e_warm},
                         {"e_ramp", cfg.curriculum.e_ramp},
                         {"w_max", cfg.curriculum.w_max},
                         {"top_k", cfg.curriculum.top_k},
                         {"spl_tau0", cfg.curriculum.spl_tau0}};
  j["phase0_epochs"] = cfg.phase0_epochs;
  j["phase0_seed"] = cfg.phase0_seed;
  j["seeds"] = cfg.seeds;
  Json modes = Json::array();
  for (Mode m : cfg.modes) modes.push_back(to_string(m));
  j["modes"] = std::move(modes);
  return j;
}

}  // namespace gradcur
