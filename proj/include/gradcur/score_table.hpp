#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "gradcur/errors.hpp"
#include "gradcur/ranking.hpp"

namespace gradcur {

enum class ScoreMethod { tracin, meta, loss, hybrid };

inline const char* to_string(ScoreMethod m) {
  switch (m) {
    case ScoreMethod::tracin: return "tracin";
    case ScoreMethod::meta: return "meta";
    case ScoreMethod::loss: return "loss";
    case ScoreMethod::hybrid: return "hybrid";
  }
  return "?";
}

inline ScoreMethod score_method_from_string(const std::string& s) {
  if (s == "tracin") return ScoreMethod::tracin;
  if (s == "meta") return ScoreMethod::meta;
  if (s == "loss") return ScoreMethod::loss;
  if (s == "hybrid") return ScoreMethod::hybrid;
  throw ConfigError("unknown score method: " + s);
}

struct ScoreEntry {
  double raw = 0.0;
  double normalized = 0.0;  // min-max of raw, in [0, 1]
  double percentile = 0.0;  // (rank - 1) / (n - 1), average ranks on ties
};

// Per-scenario scores under one method. std::map keeps iteration in id
// order; every reduction over a table walks that order, which is what makes
// scores bit-reproducible.
struct ScoreTable {
  ScoreMethod method = ScoreMethod::meta;
  std::map<std::string, ScoreEntry> entries;

  std::vector<std::string> ids() const {
    std::vector<std::string> out;
    out.reserve(entries.size());
    for (const auto& [id, entry] : entries) out.push_back(id);
    return out;
  }
};

// Builds a table from raw values: normalized via min-max (constant input maps
// to 0.5), percentile via average ranks.
inline ScoreTable build_score_table(ScoreMethod method,
                                    const std::vector<std::pair<std::string, double>>& raw) {
  if (raw.empty()) throw PreconditionError("build_score_table: empty score list");
  std::map<std::string, double> by_id;
  for (const auto& [id, value] : raw) {
    if (!by_id.emplace(id, value).second)
      throw PreconditionError("build_score_table: duplicate scenario id " + id);
  }
  std::vector<double> values;
  values.reserve(by_id.size());
  for (const auto& [id, value] : by_id) values.push_back(value);

  const std::vector<double> normalized = minmax_normalize(values);
  const std::vector<double> percentile = percentile_ranks(values);

  ScoreTable table;
  table.method = method;
  std::size_t i = 0;
  for (const auto& [id, value] : by_id) {
    table.entries[id] = ScoreEntry{value, normalized[i], percentile[i]};
    ++i;
  }
  return table;
}

}  // namespace gradcur
