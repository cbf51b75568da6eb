#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "gradcur/errors.hpp"
#include "gradcur/ranking.hpp"
#include "gradcur/rng.hpp"
#include "gradcur/scenario.hpp"
#include "gradcur/score_table.hpp"
#include "gradcur/toymodel.hpp"
#include "gradcur/valuation.hpp"

namespace gradcur {

enum class Mode { uniform, meta, tracin, loss_spl, hybrid, hard_select };

inline const char* to_string(Mode m) {
  switch (m) {
    case Mode::uniform: return "uniform";
    case Mode::meta: return "meta";
    case Mode::tracin: return "tracin";
    case Mode::loss_spl: return "loss_spl";
    case Mode::hybrid: return "hybrid";
    case Mode::hard_select: return "hard_select";
  }
  return "?";
}

inline Mode mode_from_string(const std::string& s) {
  if (s == "uniform") return Mode::uniform;
  if (s == "meta") return Mode::meta;
  if (s == "tracin") return Mode::tracin;
  if (s == "loss_spl") return Mode::loss_spl;
  if (s == "hybrid") return Mode::hybrid;
  if (s == "hard_select") return Mode::hard_select;
  throw ConfigError("unknown mode: " + s);
}

struct CurriculumConfig {
  int e_warm = 3;
  int e_ramp = 8;
  double w_max = 3.0;
  int total_epochs = 20;  // E
  Mode mode = Mode::uniform;
  double top_k = 0.2;     // hard_select: fraction of top-ranked scenarios kept
  double spl_tau0 = 0.3;  // loss_spl: initial inclusion percentile
};

inline void validate(const CurriculumConfig& cfg) {
  if (cfg.e_warm < 0 || cfg.e_warm >= cfg.e_ramp || cfg.e_ramp > cfg.total_epochs)
    throw ConfigError("curriculum config: need 0 <= e_warm < e_ramp <= total_epochs");
  if (cfg.w_max < 1.0) throw ConfigError("curriculum config: w_max must be >= 1");
  if (cfg.mode == Mode::hard_select && (cfg.top_k <= 0.0 || cfg.top_k > 1.0))
    throw ConfigError("curriculum config: top_k must be in (0, 1]");
  if (cfg.mode == Mode::loss_spl && (cfg.spl_tau0 <= 0.0 || cfg.spl_tau0 > 1.0))
    throw ConfigError("curriculum config: spl_tau0 must be in (0, 1]");
}

// Three-phase weight schedule: uniform through the warm-up epochs, linear
// ramp toward full differentiation, then a constant focus phase where the
// top score receives w_max. Continuous at both phase boundaries.
inline double curriculum_weight(double score, int epoch, const CurriculumConfig& cfg) {
  if (score < 0.0 || score > 1.0)
    throw PreconditionError("curriculum_weight: score must be in [0, 1]");
  if (epoch < 1 || epoch > cfg.total_epochs)
    throw PreconditionError("curriculum_weight: epoch out of range");
  if (epoch <= cfg.e_warm) return 1.0;
  if (epoch <= cfg.e_ramp) {
    const double ramp = static_cast<double>(epoch - cfg.e_warm) /
                        static_cast<double>(cfg.e_ramp - cfg.e_warm);
    return 1.0 + (cfg.w_max - 1.0) * ramp * score;
  }
  return 1.0 + (cfg.w_max - 1.0) * score;
}

// (sum w)^2 / sum w^2: equivalent count of equally weighted samples.
inline double effective_sample_size(const std::vector<double>& weights) {
  double sum = 0.0, sum_sq = 0.0;
  for (double w : weights) {
    sum += w;
    sum_sq += w * w;
  }
  if (sum_sq == 0.0) throw PreconditionError("effective_sample_size: all-zero weights");
  return sum * sum / sum_sq;
}

struct EpochRecord {
  int epoch = 0;
  PlanMetrics val_metrics;
  double n_eff = 0.0;
};

struct RunResult {
  Mode mode = Mode::uniform;
  std::uint64_t seed = 0;
  CurriculumConfig curriculum;
  TrainConfig train;
  std::vector<EpochRecord> epochs;
  PlanMetrics final_metrics;
  PlanMetrics best_val_metrics;  // epoch with the lowest validation plan ADE
  int best_epoch = 0;
  ParamVector final_params;  // in-memory only, not persisted
};

namespace detail {

// Shared weighted-SGD engine. `epoch_plan` returns, for a given epoch and
// current parameters, the index pool to sample from and the per-index weight
// used both inside batch updates and for the n_eff trace (excluded samples
// carry weight zero there).
template <typename EpochPlan>
inline RunResult run_weighted_training(const std::vector<Scenario>& train,
                                       const std::vector<Scenario>& val, const ModelDims& dims,
                                       const CurriculumConfig& ccfg, const TrainConfig& tcfg,
                                       EpochPlan&& epoch_plan) {
  validate(ccfg);
  validate(tcfg);
  if (train.empty() || val.empty())
    throw PreconditionError("training requires non-empty train and validation sets");

  RunResult result;
  result.mode = ccfg.mode;
  result.seed = tcfg.seed;
  result.curriculum = ccfg;
  result.train = tcfg;

  ParamVector theta = init_params(dims, tcfg.seed);
  // The shuffle stream is derived from the seed so that it is independent of
  // the init draws yet still fully determined by (seed, epoch order).
  Rng shuffle_rng(derive_seed(tcfg.seed, 0x5348'5546));

  GradientVector acc;
  acc.values.assign(theta.layout.total, 0.0);

  double best_ade = std::numeric_limits<double>::infinity();
  for (int epoch = 1; epoch <= tcfg.epochs; ++epoch) {
    std::vector<std::size_t> pool;
    std::vector<double> weights;  // per train index, zero = excluded this epoch
    epoch_plan(epoch, theta, pool, weights);
    if (pool.empty()) throw PreconditionError("training: empty sample pool at epoch " +
                                              std::to_string(epoch));

    shuffle_rng.shuffle(pool);
    const double lr = learning_rate(tcfg, epoch);

    for (std::size_t at = 0; at < pool.size(); at += tcfg.batch_size) {
      const std::size_t batch_end = std::min(pool.size(), at + tcfg.batch_size);
      std::fill(acc.values.begin(), acc.values.end(), 0.0);
      for (std::size_t b = at; b < batch_end; ++b) {
        const std::size_t idx = pool[b];
        const GradientVector g = gradient(theta, train[idx]);
        const double w = weights[idx];
        for (std::size_t i = 0; i < acc.values.size(); ++i) acc.values[i] += w * g.values[i];
      }
      // Raw weights inside the batch mean, no renormalization.
      const double scale = lr / static_cast<double>(batch_end - at);
      for (std::size_t i = 0; i < theta.values.size(); ++i)
        theta.values[i] -= scale * acc.values[i];
    }

    EpochRecord record;
    record.epoch = epoch;
    record.n_eff = effective_sample_size(weights);
    record.val_metrics = evaluate(theta, val);
    if (record.val_metrics.plan_ade < best_ade) {
      best_ade = record.val_metrics.plan_ade;
      result.best_val_metrics = record.val_metrics;
      result.best_epoch = epoch;
    }
    result.epochs.push_back(record);
  }

  result.final_metrics = result.epochs.back().val_metrics;
  result.final_params = std::move(theta);
  return result;
}

inline std::vector<double> lookup_scores(const std::vector<Scenario>& train,
                                         const ScoreTable& table) {
  std::vector<double> scores(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    const auto it = table.entries.find(train[i].id);
    if (it == table.entries.end())
      throw PreconditionError("score table is missing scenario id " + train[i].id);
    scores[i] = it->second.normalized;
  }
  return scores;
}

}  // namespace detail

// Score-weighted training (Phase 1-3): every sample stays in every epoch,
// only its weight changes. Mode uniform needs no score table.
inline RunResult train_curriculum(const std::vector<Scenario>& train,
                                  const std::vector<Scenario>& val, const ModelDims& dims,
                                  const ScoreTable* scores, const CurriculumConfig& ccfg,
                                  const TrainConfig& tcfg) {
  if (ccfg.mode != Mode::uniform && ccfg.mode != Mode::meta && ccfg.mode != Mode::tracin &&
      ccfg.mode != Mode::hybrid)
    throw PreconditionError("train_curriculum: unsupported mode " +
                            std::string(to_string(ccfg.mode)));
  std::vector<double> sample_scores;
  if (ccfg.mode == Mode::uniform) {
    sample_scores.assign(train.size(), 0.0);  // weight 1 in every phase
  } else {
    if (scores == nullptr) throw PreconditionError("train_curriculum: score table required");
    sample_scores = detail::lookup_scores(train, *scores);
  }

  std::vector<std::size_t> all(train.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;

  return detail::run_weighted_training(
      train, val, dims, ccfg, tcfg,
      [&](int epoch, const ParamVector&, std::vector<std::size_t>& pool,
          std::vector<double>& weights) {
        pool = all;
        weights.resize(train.size());
        for (std::size_t i = 0; i < train.size(); ++i)
          weights[i] = curriculum_weight(sample_scores[i], epoch, ccfg);
      });
}

// Self-paced inclusion threshold: tau ramps linearly from tau0 at epoch 1 to
// 1.0 at e_ramp and stays there.
inline double spl_threshold(int epoch, const CurriculumConfig& cfg) {
  if (epoch >= cfg.e_ramp || cfg.e_ramp <= 1) return 1.0;
  return cfg.spl_tau0 +
         (1.0 - cfg.spl_tau0) * static_cast<double>(epoch - 1) / (cfg.e_ramp - 1);
}

// Loss-based self-paced baseline: at each epoch start the training losses are
// recomputed at the current parameters and only samples at or below the
// epoch's loss percentile threshold are included, all with weight 1.
inline RunResult train_spl(const std::vector<Scenario>& train, const std::vector<Scenario>& val,
                           const ModelDims& dims, const CurriculumConfig& ccfg,
                           const TrainConfig& tcfg) {
  if (ccfg.mode != Mode::loss_spl) throw PreconditionError("train_spl: mode must be loss_spl");
  return detail::run_weighted_training(
      train, val, dims, ccfg, tcfg,
      [&](int epoch, const ParamVector& theta, std::vector<std::size_t>& pool,
          std::vector<double>& weights) {
        std::vector<double> losses(train.size());
        for (std::size_t i = 0; i < train.size(); ++i)
          losses[i] = forward_loss(theta, train[i]).loss;
        const std::vector<double> pct = percentile_ranks(losses);
        const double tau = spl_threshold(epoch, ccfg);
        weights.assign(train.size(), 0.0);
        pool.clear();
        for (std::size_t i = 0; i < train.size(); ++i)
          if (pct[i] <= tau) {
            pool.push_back(i);
            weights[i] = 1.0;
          }
      });
}

// Hard selection: trains uniformly on the top ceil(top_k * n) scenarios by
// score; the remainder is never sampled.
inline RunResult train_hard_select(const std::vector<Scenario>& train,
                                   const std::vector<Scenario>& val, const ModelDims& dims,
                                   const ScoreTable& scores, const CurriculumConfig& ccfg,
                                   const TrainConfig& tcfg) {
  if (ccfg.mode != Mode::hard_select)
    throw PreconditionError("train_hard_select: mode must be hard_select");
  validate(ccfg);
  const std::vector<double> normalized = detail::lookup_scores(train, scores);
  const std::size_t keep =
      static_cast<std::size_t>(ceil_fraction(ccfg.top_k * static_cast<double>(train.size())));
  if (keep == 0) throw PreconditionError("train_hard_select: empty selection");

  std::vector<std::size_t> order(train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (normalized[a] != normalized[b]) return normalized[a] > normalized[b];
    return train[a].id < train[b].id;  // deterministic tie-break
  });
  std::vector<std::size_t> selected(order.begin(), order.begin() + keep);
  // Index order, so that top_k = 1 shuffles exactly like the uniform run.
  std::sort(selected.begin(), selected.end());

  std::vector<double> weights(train.size(), 0.0);
  for (std::size_t idx : selected) weights[idx] = 1.0;

  return detail::run_weighted_training(
      train, val, dims, ccfg, tcfg,
      [&](int, const ParamVector&, std::vector<std::size_t>& pool, std::vector<double>& w) {
        pool = selected;
        w = weights;
      });
}

// Convenience index of the top-k selected scenarios, used for support checks.
inline std::vector<const Scenario*> hard_selection(const std::vector<Scenario>& train,
                                                   const ScoreTable& scores, double top_k) {
  if (top_k <= 0.0 || top_k > 1.0)
    throw PreconditionError("hard_selection: top_k must be in (0, 1]");
  const std::vector<double> normalized = detail::lookup_scores(train, scores);
  const std::size_t keep =
      static_cast<std::size_t>(ceil_fraction(top_k * static_cast<double>(train.size())));
  std::vector<std::size_t> order(train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (normalized[a] != normalized[b]) return normalized[a] > normalized[b];
    return train[a].id < train[b].id;
  });
  std::vector<const Scenario*> out;
  for (std::size_t i = 0; i < keep; ++i) out.push_back(&train[order[i]]);
  return out;
}

namespace detail {

inline std::array<double, 4> family_distribution(const std::vector<const Scenario*>& scenarios,
                                                 const std::vector<double>* weights) {
  std::array<double, 4> mass{0.0, 0.0, 0.0, 0.0};
  double total = 0.0;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const double w = weights ? (*weights)[i] : 1.0;
    mass[static_cast<int>(scenarios[i]->family)] += w;
    total += w;
  }
  if (total > 0.0)
    for (double& m : mass) m /= total;
  return mass;
}

inline double kl_divergence(const std::array<double, 4>& p, const std::array<double, 4>& q) {
  double kl = 0.0;
  for (int f = 0; f < 4; ++f) {
    if (p[f] == 0.0) continue;  // 0 log(0/q) = 0
    if (q[f] == 0.0) return std::numeric_limits<double>::infinity();
    kl += p[f] * std::log(p[f] / q[f]);
  }
  return kl;
}

inline std::vector<const Scenario*> pointers(const std::vector<Scenario>& v) {
  std::vector<const Scenario*> out;
  out.reserve(v.size());
  for (const Scenario& s : v) out.push_back(&s);
  return out;
}

}  // namespace detail

// KL(p_val || p_selected) over the empirical family distributions. Returns
// +inf when the selection assigns zero mass to a family the validation set
// contains.
inline double support_kl(const std::vector<Scenario>& train_subset,
                         const std::vector<Scenario>& val) {
  if (train_subset.empty() || val.empty())
    throw PreconditionError("support_kl: empty input");
  return detail::kl_divergence(detail::family_distribution(detail::pointers(val), nullptr),
                               detail::family_distribution(detail::pointers(train_subset), nullptr));
}

inline double support_kl(const std::vector<const Scenario*>& train_subset,
                         const std::vector<Scenario>& val) {
  if (train_subset.empty() || val.empty())
    throw PreconditionError("support_kl: empty input");
  return detail::kl_divergence(detail::family_distribution(detail::pointers(val), nullptr),
                               detail::family_distribution(train_subset, nullptr));
}

// Weighted variant: the training distribution places mass proportional to
// w_z on each sample.
inline double support_kl_weighted(const std::vector<Scenario>& train,
                                  const std::vector<double>& weights,
                                  const std::vector<Scenario>& val) {
  if (train.empty() || val.empty()) throw PreconditionError("support_kl: empty input");
  if (weights.size() != train.size())
    throw PreconditionError("support_kl: weight count mismatch");
  return detail::kl_divergence(detail::family_distribution(detail::pointers(val), nullptr),
                               detail::family_distribution(detail::pointers(train), &weights));
}

}  // namespace gradcur
