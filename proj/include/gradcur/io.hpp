#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gradcur/curriculum.hpp"
#include "gradcur/errors.hpp"
#include "gradcur/scenario.hpp"
#include "gradcur/score_table.hpp"
#include "gradcur/stats.hpp"
#include "gradcur/toymodel.hpp"

namespace gradcur {

// Keys keep insertion order so serialized output is stable byte-for-byte.
using Json = nlohmann::ordered_json;

// Shortest exact representation for CSV cells; doubles round-trip.
inline std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
  }
  // Write to a sibling temp file first so concurrent readers and parallel
  // runs only ever observe complete files.
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write failed: " + path);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("rename failed: " + path);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// Dataset: JSON Lines, one scenario object per line.
// ---------------------------------------------------------------------------

inline Json scenario_to_json(const Scenario& s) {
  Json j;
  j["id"] = s.id;
  j["family"] = to_string(s.family);
  j["split"] = to_string(s.split);
  j["dt"] = s.ego.dt;
  Json ego = Json::array();
  for (const TrajSample& p : s.ego.samples) ego.push_back(Json::array({p.x, p.y, p.heading}));
  j["ego"] = std::move(ego);
  Json agents = Json::array();
  for (const AgentTrack& a : s.agents) {
    Json traj = Json::array();
    for (const TrajSample& p : a.traj.samples)
      traj.push_back(Json::array({p.x, p.y, p.heading}));
    Json present = Json::array();
    for (std::uint8_t m : a.present) present.push_back(m != 0);
    agents.push_back(Json{{"traj", std::move(traj)}, {"present", std::move(present)}});
  }
  j["agents"] = std::move(agents);
  return j;
}

inline Scenario scenario_from_json(const Json& j, int t_obs) {
  Scenario s;
  s.id = j.at("id").get<std::string>();
  s.family = family_from_string(j.at("family").get<std::string>());
  s.split = split_from_string(j.at("split").get<std::string>());
  s.ego.dt = j.at("dt").get<double>();
  for (const Json& p : j.at("ego"))
    s.ego.samples.push_back(TrajSample{p.at(0).get<double>(), p.at(1).get<double>(),
                                       p.at(2).get<double>()});
  for (const Json& a : j.at("agents")) {
    AgentTrack track;
    track.traj.dt = s.ego.dt;
    for (const Json& p : a.at("traj"))
      track.traj.samples.push_back(TrajSample{p.at(0).get<double>(), p.at(1).get<double>(),
                                              p.at(2).get<double>()});
    for (const Json& m : a.at("present")) track.present.push_back(m.get<bool>() ? 1 : 0);
    s.agents.push_back(std::move(track));
  }
  s.t_obs = t_obs;
  validate_scenario(s);
  return s;
}

inline std::string serialize_dataset(const std::vector<Scenario>& scenarios) {
  std::string out;
  for (const Scenario& s : scenarios) {
    out += scenario_to_json(s).dump();
    out += '\n';
  }
  return out;
}

inline void write_dataset(const std::string& path, const std::vector<Scenario>& scenarios) {
  write_file(path, serialize_dataset(scenarios));
}

// The observed-step count is not part of the wire format; it comes from the
// generation config.
inline std::vector<Scenario> read_dataset(const std::string& path, int t_obs) {
  std::istringstream in(read_file(path));
  std::vector<Scenario> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(scenario_from_json(Json::parse(line), t_obs));
  }
  if (out.empty()) throw DataError("dataset is empty: " + path);
  return out;
}

// ---------------------------------------------------------------------------
// Score and feature CSVs
// ---------------------------------------------------------------------------

inline std::string serialize_score_csv(const ScoreTable& table) {
  std::string out = "scenario_id,method,raw,normalized,percentile\n";
  for (const auto& [id, e] : table.entries) {
    out += id;
    out += ',';
    out += to_string(table.method);
    out += ',';
    out += fmt_double(e.raw);
    out += ',';
    out += fmt_double(e.normalized);
    out += ',';
    out += fmt_double(e.percentile);
    out += '\n';
  }
  return out;
}

inline void write_score_csv(const std::string& path, const ScoreTable& table) {
  write_file(path, serialize_score_csv(table));
}

inline ScoreTable read_score_csv(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line) || line != "scenario_id,method,raw,normalized,percentile")
    throw DataError("score csv has unexpected header: " + path);
  ScoreTable table;
  bool method_set = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string id, method, raw, normalized, percentile;
    if (!std::getline(row, id, ',') || !std::getline(row, method, ',') ||
        !std::getline(row, raw, ',') || !std::getline(row, normalized, ',') ||
        !std::getline(row, percentile, ','))
      throw DataError("malformed score csv row in " + path);
    if (!method_set) {
      table.method = score_method_from_string(method);
      method_set = true;
    }
    table.entries[id] = ScoreEntry{std::stod(raw), std::stod(normalized), std::stod(percentile)};
  }
  if (table.entries.empty()) throw DataError("score csv is empty: " + path);
  return table;
}

inline std::string serialize_features_csv(const std::vector<FeatureRow>& rows) {
  std::string out = "scenario_id,d_min,ttc_min,n_conflict,t_prox,dtheta_max,n_active,composite\n";
  for (const FeatureRow& r : rows) {
    out += r.id;
    out += ',';
    out += fmt_double(r.features.d_min);
    out += ',';
    out += fmt_double(r.features.ttc_min);
    out += ',';
    out += std::to_string(r.features.n_conflict);
    out += ',';
    out += fmt_double(r.features.t_prox);
    out += ',';
    out += fmt_double(r.features.dtheta_max);
    out += ',';
    out += std::to_string(r.features.n_active);
    out += ',';
    out += fmt_double(r.features.composite);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Run results
// ---------------------------------------------------------------------------

inline Json metrics_to_json(const PlanMetrics& m) {
  return Json{{"plan_ade", m.plan_ade}, {"plan_fde", m.plan_fde}, {"plan_ahe", m.plan_ahe},
              {"plan_fhe", m.plan_fhe}, {"pred_ade", m.pred_ade}, {"pred_fde", m.pred_fde}};
}

inline PlanMetrics metrics_from_json(const Json& j) {
  PlanMetrics m;
  m.plan_ade = j.at("plan_ade").get<double>();
  m.plan_fde = j.at("plan_fde").get<double>();
  m.plan_ahe = j.at("plan_ahe").get<double>();
  m.plan_fhe = j.at("plan_fhe").get<double>();
  m.pred_ade = j.at("pred_ade").get<double>();
  m.pred_fde = j.at("pred_fde").get<double>();
  return m;
}

inline std::string serialize_run_result(const RunResult& r) {
  Json j;
  j["mode"] = to_string(r.mode);
  j["seed"] = r.seed;
  j["config"] = Json{{"e_warm", r.curriculum.e_warm},
                     {"e_ramp", r.curriculum.e_ramp},
                     {"w_max", r.curriculum.w_max},
                     {"total_epochs", r.curriculum.total_epochs},
                     {"top_k", r.curriculum.top_k},
                     {"spl_tau0", r.curriculum.spl_tau0},
                     {"epochs", r.train.epochs},
                     {"batch_size", r.train.batch_size},
                     {"lr0", r.train.lr0},
                     {"lr_decay", r.train.lr_decay},
                     {"lr_step", r.train.lr_step}};
  Json epochs = Json::array();
  for (const EpochRecord& e : r.epochs)
    epochs.push_back(Json{{"epoch", e.epoch},
                          {"val_metrics", metrics_to_json(e.val_metrics)},
                          {"n_eff", e.n_eff}});
  j["epochs"] = std::move(epochs);
  j["final"] = metrics_to_json(r.final_metrics);
  Json best = metrics_to_json(r.best_val_metrics);
  best["epoch"] = r.best_epoch;
  j["best_val"] = std::move(best);
  return j.dump(2) + "\n";
}

// Parsed view of a stored run; enough for the stats command.
struct StoredRun {
  std::string mode;
  std::uint64_t seed = 0;
  PlanMetrics final_metrics;
  PlanMetrics best_val_metrics;
  std::vector<EpochRecord> epochs;
};

inline StoredRun read_run_result(const std::string& path) {
  const Json j = Json::parse(read_file(path));
  StoredRun r;
  r.mode = j.at("mode").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.final_metrics = metrics_from_json(j.at("final"));
  r.best_val_metrics = metrics_from_json(j.at("best_val"));
  for (const Json& e : j.at("epochs")) {
    EpochRecord record;
    record.epoch = e.at("epoch").get<int>();
    record.n_eff = e.at("n_eff").get<double>();
    record.val_metrics = metrics_from_json(e.at("val_metrics"));
    r.epochs.push_back(record);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Stats report
// ---------------------------------------------------------------------------

inline Json stats_report_to_json(const StatsReport& report) {
  Json j;
  Json methods = Json::array();
  for (const MethodSummary& m : report.methods) {
    Json metrics;
    for (const auto& [name, s] : m.metrics)
      metrics[name] = Json{{"mean", s.mean}, {"std", s.std_population}, {"cv_percent", s.cv_percent}};
    methods.push_back(Json{{"mode", m.mode}, {"n_runs", m.n_runs}, {"metrics", std::move(metrics)}});
  }
  j["methods"] = std::move(methods);
  Json pairs = Json::array();
  for (const PairwiseRow& p : report.pairs) {
    Json row{{"a", p.a}, {"b", p.b}};
    if (p.degenerate) {
      row["status"] = "degenerate";
    } else {
      row["status"] = "ok";
      row["delta_mean"] = p.test.delta_mean;
      row["t"] = p.test.t;
      row["p_two_tailed"] = p.test.p;
      row["cohens_dz"] = p.test.dz;
    }
    pairs.push_back(std::move(row));
  }
  j["pairs"] = std::move(pairs);
  return j;
}

// Aligned text tables: one summary block in the published column layout and
// one pairwise block.
inline std::string stats_report_to_text(const StatsReport& report) {
  char buf[256];
  std::string out;
  out += "Multi-seed results (mean +/- population std over final val metrics)\n";
  std::snprintf(buf, sizeof(buf), "%-12s %-16s %-16s %-16s %-16s %8s\n", "method", "planADE",
                "planFDE", "planAHE", "predADE", "CV");
  out += buf;
  for (const MethodSummary& m : report.methods) {
    const auto cell = [&](const char* key) {
      const Summary& s = m.metrics.at(key);
      char c[64];
      std::snprintf(c, sizeof(c), "%.3f +/- %.3f", s.mean, s.std_population);
      return std::string(c);
    };
    std::snprintf(buf, sizeof(buf), "%-12s %-16s %-16s %-16s %-16s %7.1f%%\n", m.mode.c_str(),
                  cell("plan_ade").c_str(), cell("plan_fde").c_str(), cell("plan_ahe").c_str(),
                  cell("pred_ade").c_str(), m.metrics.at("plan_ade").cv_percent);
    out += buf;
  }
  out += "\nPaired t-tests (planning ADE). * marks p < 0.05\n";
  std::snprintf(buf, sizeof(buf), "%-24s %10s %10s %8s\n", "comparison", "delta_ADE", "p", "dz");
  out += buf;
  for (const PairwiseRow& p : report.pairs) {
    const std::string name = p.a + " vs " + p.b;
    if (p.degenerate) {
      std::snprintf(buf, sizeof(buf), "%-24s %10s %10s %8s\n", name.c_str(), "-", "degenerate",
                    "-");
    } else {
      std::snprintf(buf, sizeof(buf), "%-24s %+10.3f %9.3f%s %8.2f\n", name.c_str(),
                    p.test.delta_mean, p.test.p, p.test.p < 0.05 ? "*" : " ", p.test.dz);
    }
    out += buf;
  }
  return out;
}

}  // namespace gradcur
