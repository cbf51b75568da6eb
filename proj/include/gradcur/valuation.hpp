#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "gradcur/errors.hpp"
#include "gradcur/scenario.hpp"
#include "gradcur/score_table.hpp"
#include "gradcur/stats.hpp"
#include "gradcur/toymodel.hpp"

namespace gradcur {

namespace detail {

inline std::vector<const Scenario*> sorted_by_id(const std::vector<Scenario>& scenarios) {
  std::vector<const Scenario*> out;
  out.reserve(scenarios.size());
  for (const Scenario& s : scenarios) out.push_back(&s);
  std::sort(out.begin(), out.end(),
            [](const Scenario* a, const Scenario* b) { return a->id < b->id; });
  return out;
}

}  // namespace detail

inline double dot(const GradientVector& a, const GradientVector& b) {
  if (a.values.size() != b.values.size())
    throw ShapeError("gradient dot product: length mismatch");
  double acc = 0.0;  // plain left-to-right accumulation; scores are bit-reproducible
  for (std::size_t i = 0; i < a.values.size(); ++i) acc += a.values[i] * b.values[i];
  return acc;
}

// Arithmetic mean of per-sample gradients, accumulated in scenario-id order
// so the result does not depend on how the validation list happens to be
// ordered.
inline GradientVector mean_val_gradient(const ParamVector& theta0,
                                        const std::vector<Scenario>& val) {
  if (val.empty()) throw PreconditionError("mean_val_gradient: empty validation set");
  GradientVector acc;
  acc.values.assign(theta0.layout.total, 0.0);
  for (const Scenario* s : detail::sorted_by_id(val)) {
    const GradientVector g = gradient(theta0, *s);
    for (std::size_t i = 0; i < acc.values.size(); ++i) acc.values[i] += g.values[i];
  }
  const double inv = 1.0 / static_cast<double>(val.size());
  for (double& v : acc.values) v *= inv;
  return acc;
}

// Single-checkpoint gradient-similarity score: raw = g_i . g_val, so positive
// means the sample's gradient is aligned with validation-loss reduction.
// Normalized to [0, 1] via min-max.
inline ScoreTable tracin_scores(const ParamVector& theta0, const std::vector<Scenario>& train,
                                const GradientVector& g_val) {
  if (g_val.values.size() != theta0.layout.total)
    throw ShapeError("tracin_scores: validation gradient length mismatch");
  std::vector<std::pair<std::string, double>> raw;
  raw.reserve(train.size());
  for (const Scenario* s : detail::sorted_by_id(train))
    raw.emplace_back(s->id, dot(gradient(theta0, *s), g_val));
  return build_score_table(ScoreMethod::tracin, raw);
}

// Per-sample training loss at the given parameters, min-max normalized.
inline ScoreTable loss_scores(const ParamVector& theta, const std::vector<Scenario>& train) {
  std::vector<std::pair<std::string, double>> raw;
  raw.reserve(train.size());
  for (const Scenario* s : detail::sorted_by_id(train))
    raw.emplace_back(s->id, forward_loss(theta, *s).loss);
  return build_score_table(ScoreMethod::loss, raw);
}

// Equal-weight average of the two tables' percentile ranks. The result is
// already in [0, 1]; normalized is the raw value itself.
inline ScoreTable hybrid_scores(const ScoreTable& a, const ScoreTable& b) {
  if (a.entries.size() != b.entries.size() ||
      !std::equal(a.entries.begin(), a.entries.end(), b.entries.begin(),
                  [](const auto& x, const auto& y) { return x.first == y.first; })) {
    std::string diff;
    int shown = 0;
    for (const auto& [id, e] : a.entries)
      if (!b.entries.count(id) && shown++ < 5) diff += " " + id;
    for (const auto& [id, e] : b.entries)
      if (!a.entries.count(id) && shown++ < 5) diff += " " + id;
    throw PreconditionError("hybrid_scores: id sets differ;" + diff);
  }

  ScoreTable out;
  out.method = ScoreMethod::hybrid;
  std::vector<double> raws;
  raws.reserve(a.entries.size());
  for (const auto& [id, ea] : a.entries) {
    const double raw = 0.5 * (ea.percentile + b.entries.at(id).percentile);
    out.entries[id] = ScoreEntry{raw, raw, 0.0};
    raws.push_back(raw);
  }
  const std::vector<double> pct = percentile_ranks(raws);
  std::size_t i = 0;
  for (auto& [id, entry] : out.entries) entry.percentile = pct[i++];
  return out;
}

}  // namespace gradcur
