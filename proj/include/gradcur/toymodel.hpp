#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "gradcur/errors.hpp"
#include "gradcur/geometry.hpp"
#include "gradcur/rng.hpp"
#include "gradcur/scenario.hpp"

namespace gradcur {

// Observed positions are expressed in the ego frame and scaled before
// entering the network; tanh saturates otherwise.
inline constexpr double kPositionScale = 0.1;

struct ModelDims {
  int input = 0;
  int hidden = 64;
  int t_obs = 0;
  int t_fut = 0;
  int n_max = kMaxAgents;

  static ModelDims make(int t_obs, int t_fut, int hidden = 64, int n_max = kMaxAgents) {
    if (t_obs < 1 || t_fut < 1 || hidden < 1 || n_max < 0)
      throw ConfigError("model dims: t_obs, t_fut, hidden must be positive");
    ModelDims d;
    d.t_obs = t_obs;
    d.t_fut = t_fut;
    d.hidden = hidden;
    d.n_max = n_max;
    d.input = 3 * t_obs + 4 * n_max * t_obs;  // ego (x, y, heading) + agents (x, y, heading, mask)
    return d;
  }

  int plan_out() const { return 3 * t_fut; }
  int pred_out() const { return 2 * n_max * t_fut; }
};

struct BlockSpan {
  std::size_t offset = 0;
  std::size_t size = 0;
};

// Flat parameter layout: [W1 | b1 | W_plan | b_plan | W_pred | b_pred], all
// matrices row-major with rows indexing the output unit.
struct ParamLayout {
  ModelDims dims;
  BlockSpan w1, b1, w_plan, b_plan, w_pred, b_pred;
  std::size_t total = 0;
};

inline ParamLayout make_layout(const ModelDims& d) {
  ParamLayout l;
  l.dims = d;
  std::size_t at = 0;
  const auto block = [&](std::size_t size) {
    BlockSpan b{at, size};
    at += size;
    return b;
  };
  l.w1 = block(static_cast<std::size_t>(d.hidden) * d.input);
  l.b1 = block(d.hidden);
  l.w_plan = block(static_cast<std::size_t>(d.plan_out()) * d.hidden);
  l.b_plan = block(d.plan_out());
  l.w_pred = block(static_cast<std::size_t>(d.pred_out()) * d.hidden);
  l.b_pred = block(d.pred_out());
  l.total = at;
  return l;
}

struct ParamVector {
  ParamLayout layout;
  std::vector<double> values;
};

struct GradientVector {
  std::vector<double> values;
};

struct TrainConfig {
  int epochs = 20;
  int batch_size = 32;
  double lr0 = 0.2;
  double lr_decay = 0.5;
  int lr_step = 5;  // epochs between decays
  std::uint64_t seed = 3407;
};

inline void validate(const TrainConfig& cfg) {
  if (cfg.epochs < 1) throw ConfigError("train config: epochs must be >= 1");
  if (cfg.batch_size < 1) throw ConfigError("train config: batch_size must be >= 1");
  if (cfg.lr0 <= 0.0) throw ConfigError("train config: lr0 must be positive");
  if (cfg.lr_decay <= 0.0 || cfg.lr_decay > 1.0)
    throw ConfigError("train config: lr_decay must be in (0, 1]");
  if (cfg.lr_step < 1) throw ConfigError("train config: lr_step must be >= 1");
}

inline double learning_rate(const TrainConfig& cfg, int epoch) {
  return cfg.lr0 * std::pow(cfg.lr_decay, (epoch - 1) / cfg.lr_step);
}

struct PlanMetrics {
  double plan_ade = 0.0;  // [m]
  double plan_fde = 0.0;  // [m]
  double plan_ahe = 0.0;  // [rad]
  double plan_fhe = 0.0;  // [rad]
  double pred_ade = 0.0;  // [m]
  double pred_fde = 0.0;  // [m]
};

// Uniform(-sqrt(6 / fan_in), +sqrt(6 / fan_in)) weights, zero biases.
inline ParamVector init_params(const ModelDims& dims, std::uint64_t seed) {
  ParamVector p;
  p.layout = make_layout(dims);
  p.values.assign(p.layout.total, 0.0);
  Rng rng(seed);
  const auto fill = [&](const BlockSpan& b, int fan_in) {
    const double bound = std::sqrt(6.0 / fan_in);
    for (std::size_t i = 0; i < b.size; ++i)
      p.values[b.offset + i] = rng.uniform(-bound, bound);
  };
  fill(p.layout.w1, dims.input);
  fill(p.layout.w_plan, dims.hidden);
  fill(p.layout.w_pred, dims.hidden);
  return p;
}

namespace detail {

// Ego frame anchored at the last observed ego pose: positions translate to
// the ego and rotate so the ego heading points along +x. Rotation makes the
// maneuver residuals canonical instead of heading-dependent.
struct Frame {
  Vec2 center;
  double heading = 0.0;
  double cos_h = 1.0;
  double sin_h = 0.0;

  Vec2 to_frame(Vec2 p) const {
    const Vec2 d = p - center;
    return {cos_h * d.x + sin_h * d.y, -sin_h * d.x + cos_h * d.y};
  }
  Vec2 from_frame(Vec2 p) const {
    return {center.x + cos_h * p.x - sin_h * p.y, center.y + sin_h * p.x + cos_h * p.y};
  }
  double heading_to_frame(double h) const { return wrap_angle(h - heading); }
  double heading_from_frame(double h) const { return wrap_angle(h + heading); }
};

inline Frame frame_of(const Scenario& s) {
  Frame f;
  const TrajSample& anchor = s.ego.samples[s.t_obs - 1];
  f.center = anchor.pos();
  f.heading = anchor.heading;
  f.cos_h = std::cos(anchor.heading);
  f.sin_h = std::sin(anchor.heading);
  return f;
}

// Everything the forward pass computes, kept for backprop.
struct Activations {
  std::vector<double> input;     // u
  std::vector<double> hidden;    // h = tanh(W1 u + b1)
  std::vector<double> plan;      // predicted ego future, ego frame, (x, y, heading) per step
  std::vector<double> plan_tgt;  // targets, ego frame
  std::vector<double> pred;      // predicted agent futures, ego frame, (x, y) per (agent, step)
  std::vector<double> pred_tgt;
  std::vector<std::uint8_t> pred_mask;  // presence per (agent, step)
  int present_count = 0;
  Frame frame;
};

inline void check_shapes(const ParamVector& theta, const Scenario& s) {
  const ModelDims& d = theta.layout.dims;
  if (theta.values.size() != theta.layout.total)
    throw ShapeError("parameter vector length does not match layout");
  if (s.t_obs != d.t_obs || s.length() != d.t_obs + d.t_fut)
    throw ShapeError("input: scenario steps do not match model dims for scenario " + s.id);
  if (static_cast<int>(s.agents.size()) > d.n_max)
    throw ShapeError("input: scenario has more agents than model slots for scenario " + s.id);
}

// Constant-velocity extrapolation of a track from its last observed present
// step; the heads predict residuals against this baseline.
struct CvBaseline {
  Vec2 pos;      // ego frame, at the anchor step
  Vec2 vel;      // ego frame, per second
  double heading = 0.0;  // ego frame
  int anchor = -1;  // step index of the anchor, -1 when never present
};

inline CvBaseline ego_baseline(const Scenario& s, const Frame& frame) {
  CvBaseline b;
  b.anchor = s.t_obs - 1;
  b.pos = frame.to_frame(s.ego.samples[b.anchor].pos());
  b.heading = frame.heading_to_frame(s.ego.samples[b.anchor].heading);
  if (s.t_obs >= 2)
    b.vel = (b.pos - frame.to_frame(s.ego.samples[b.anchor - 1].pos())) * (1.0 / s.dt());
  return b;
}

inline CvBaseline agent_baseline(const Scenario& s, const AgentTrack& a, const Frame& frame) {
  CvBaseline b;
  for (int t = s.t_obs - 1; t >= 0; --t)
    if (a.present[t]) {
      b.anchor = t;
      break;
    }
  if (b.anchor < 0) return b;  // never observed: extrapolate from the origin at rest
  b.pos = frame.to_frame(a.traj.samples[b.anchor].pos());
  b.heading = frame.heading_to_frame(a.traj.samples[b.anchor].heading);
  if (b.anchor >= 1 && a.present[b.anchor - 1])
    b.vel = (b.pos - frame.to_frame(a.traj.samples[b.anchor - 1].pos())) * (1.0 / s.dt());
  return b;
}

inline Vec2 extrapolate(const CvBaseline& b, const Scenario& s, int future_step) {
  if (b.anchor < 0) return {0.0, 0.0};
  const double gap = (s.t_obs + future_step - b.anchor) * s.dt();
  return b.pos + b.vel * gap;
}

inline Activations forward(const ParamVector& theta, const Scenario& s) {
  validate_scenario(s);
  check_shapes(theta, s);
  const ModelDims& d = theta.layout.dims;
  const ParamLayout& l = theta.layout;
  const std::vector<double>& v = theta.values;

  Activations act;
  act.frame = frame_of(s);

  // Input: observed ego then one 4-feature slot per agent, all in the ego
  // frame; absent entries stay zero.
  act.input.assign(d.input, 0.0);
  for (int t = 0; t < d.t_obs; ++t) {
    const TrajSample& e = s.ego.samples[t];
    const Vec2 p = act.frame.to_frame(e.pos());
    act.input[3 * t + 0] = p.x * kPositionScale;
    act.input[3 * t + 1] = p.y * kPositionScale;
    act.input[3 * t + 2] = act.frame.heading_to_frame(e.heading);
  }
  for (int a = 0; a < static_cast<int>(s.agents.size()); ++a) {
    const AgentTrack& agent = s.agents[a];
    const std::size_t base = 3 * d.t_obs + static_cast<std::size_t>(a) * 4 * d.t_obs;
    for (int t = 0; t < d.t_obs; ++t) {
      if (!agent.present[t]) continue;
      const TrajSample& sample = agent.traj.samples[t];
      const Vec2 p = act.frame.to_frame(sample.pos());
      act.input[base + 4 * t + 0] = p.x * kPositionScale;
      act.input[base + 4 * t + 1] = p.y * kPositionScale;
      act.input[base + 4 * t + 2] = act.frame.heading_to_frame(sample.heading);
      act.input[base + 4 * t + 3] = 1.0;
    }
  }

  act.hidden.assign(d.hidden, 0.0);
  for (int i = 0; i < d.hidden; ++i) {
    double z = v[l.b1.offset + i];
    const std::size_t row = l.w1.offset + static_cast<std::size_t>(i) * d.input;
    for (int j = 0; j < d.input; ++j) z += v[row + j] * act.input[j];
    act.hidden[i] = std::tanh(z);
  }

  const auto head = [&](const BlockSpan& w, const BlockSpan& b, int out, std::vector<double>& dst) {
    dst.assign(out, 0.0);
    for (int k = 0; k < out; ++k) {
      double z = v[b.offset + k];
      const std::size_t row = w.offset + static_cast<std::size_t>(k) * d.hidden;
      for (int i = 0; i < d.hidden; ++i) z += v[row + i] * act.hidden[i];
      dst[k] = z;
    }
  };

  std::vector<double> plan_res, pred_res;
  head(l.w_plan, l.b_plan, d.plan_out(), plan_res);
  head(l.w_pred, l.b_pred, d.pred_out(), pred_res);

  // Plan head: constant-velocity baseline plus residual, ego frame.
  const CvBaseline ego_cv = ego_baseline(s, act.frame);
  act.plan.assign(d.plan_out(), 0.0);
  act.plan_tgt.assign(d.plan_out(), 0.0);
  for (int t = 0; t < d.t_fut; ++t) {
    const Vec2 base = extrapolate(ego_cv, s, t);
    act.plan[3 * t + 0] = base.x + plan_res[3 * t + 0];
    act.plan[3 * t + 1] = base.y + plan_res[3 * t + 1];
    act.plan[3 * t + 2] = ego_cv.heading + plan_res[3 * t + 2];
    const TrajSample& tgt = s.ego.samples[s.t_obs + t];
    const Vec2 p = act.frame.to_frame(tgt.pos());
    act.plan_tgt[3 * t + 0] = p.x;
    act.plan_tgt[3 * t + 1] = p.y;
    act.plan_tgt[3 * t + 2] = act.frame.heading_to_frame(tgt.heading);
  }

  // Prediction head, one (x, y) track per agent slot; only present future
  // steps of real agents enter the loss.
  act.pred.assign(d.pred_out(), 0.0);
  act.pred_tgt.assign(d.pred_out(), 0.0);
  act.pred_mask.assign(static_cast<std::size_t>(d.n_max) * d.t_fut, 0);
  for (int a = 0; a < static_cast<int>(s.agents.size()); ++a) {
    const AgentTrack& agent = s.agents[a];
    const CvBaseline cv = agent_baseline(s, agent, act.frame);
    for (int t = 0; t < d.t_fut; ++t) {
      const std::size_t k = static_cast<std::size_t>(a) * d.t_fut + t;
      const Vec2 base = extrapolate(cv, s, t);
      act.pred[2 * k + 0] = base.x + pred_res[2 * k + 0];
      act.pred[2 * k + 1] = base.y + pred_res[2 * k + 1];
      if (!agent.present[s.t_obs + t]) continue;
      act.pred_mask[k] = 1;
      ++act.present_count;
      const Vec2 p = act.frame.to_frame(agent.traj.samples[s.t_obs + t].pos());
      act.pred_tgt[2 * k + 0] = p.x;
      act.pred_tgt[2 * k + 1] = p.y;
    }
  }
  return act;
}

}  // namespace detail

struct LossBreakdown {
  double loss = 0.0;
  double plan_l2 = 0.0;
  double pred_l2 = 0.0;
};

// Mean squared error of the plan head over positions and heading (equal
// weight), plus presence-masked mean squared error of the prediction head.
inline LossBreakdown forward_loss(const ParamVector& theta, const Scenario& s) {
  const detail::Activations act = detail::forward(theta, s);
  const ModelDims& d = theta.layout.dims;

  LossBreakdown out;
  for (int k = 0; k < d.plan_out(); ++k) {
    const double e = act.plan[k] - act.plan_tgt[k];
    out.plan_l2 += e * e;
  }
  out.plan_l2 /= d.plan_out();

  if (act.present_count > 0) {
    for (int a = 0; a < d.n_max; ++a)
      for (int t = 0; t < d.t_fut; ++t) {
        const std::size_t k = static_cast<std::size_t>(a) * d.t_fut + t;
        if (!act.pred_mask[k]) continue;
        const double ex = act.pred[2 * k + 0] - act.pred_tgt[2 * k + 0];
        const double ey = act.pred[2 * k + 1] - act.pred_tgt[2 * k + 1];
        out.pred_l2 += ex * ex + ey * ey;
      }
    out.pred_l2 /= 2.0 * act.present_count;
  }
  out.loss = out.plan_l2 + out.pred_l2;
  return out;
}

// Analytic gradient of forward_loss; matches central finite differences to
// relative 1e-4 (checked property).
inline GradientVector gradient(const ParamVector& theta, const Scenario& s) {
  const detail::Activations act = detail::forward(theta, s);
  const ModelDims& d = theta.layout.dims;
  const ParamLayout& l = theta.layout;
  const std::vector<double>& v = theta.values;

  GradientVector g;
  g.values.assign(l.total, 0.0);

  std::vector<double> d_plan(d.plan_out());
  for (int k = 0; k < d.plan_out(); ++k)
    d_plan[k] = 2.0 * (act.plan[k] - act.plan_tgt[k]) / d.plan_out();

  std::vector<double> d_pred(d.pred_out(), 0.0);
  if (act.present_count > 0) {
    const double scale = 1.0 / act.present_count;  // 2/(2 * present_count)
    for (int a = 0; a < d.n_max; ++a)
      for (int t = 0; t < d.t_fut; ++t) {
        const std::size_t k = static_cast<std::size_t>(a) * d.t_fut + t;
        if (!act.pred_mask[k]) continue;
        d_pred[2 * k + 0] = scale * (act.pred[2 * k + 0] - act.pred_tgt[2 * k + 0]);
        d_pred[2 * k + 1] = scale * (act.pred[2 * k + 1] - act.pred_tgt[2 * k + 1]);
      }
  }

  std::vector<double> d_hidden(d.hidden, 0.0);
  const auto head_backward = [&](const BlockSpan& w, const BlockSpan& b, int out,
                                 const std::vector<double>& d_out) {
    for (int k = 0; k < out; ++k) {
      const double dk = d_out[k];
      if (dk == 0.0) continue;
      const std::size_t row = w.offset + static_cast<std::size_t>(k) * d.hidden;
      for (int i = 0; i < d.hidden; ++i) {
        g.values[row + i] += dk * act.hidden[i];
        d_hidden[i] += dk * v[row + i];
      }
      g.values[b.offset + k] += dk;
    }
  };
  head_backward(l.w_plan, l.b_plan, d.plan_out(), d_plan);
  head_backward(l.w_pred, l.b_pred, d.pred_out(), d_pred);

  for (int i = 0; i < d.hidden; ++i) {
    const double dz = (1.0 - act.hidden[i] * act.hidden[i]) * d_hidden[i];
    if (dz == 0.0) continue;
    const std::size_t row = l.w1.offset + static_cast<std::size_t>(i) * d.input;
    for (int j = 0; j < d.input; ++j) g.values[row + j] += dz * act.input[j];
    g.values[l.b1.offset + i] += dz;
  }
  return g;
}

// Predicted futures in the global frame.
struct Prediction {
  std::vector<TrajSample> plan;       // t_fut samples
  std::vector<Vec2> pred;             // n_max * t_fut positions, agent-major
};

inline Prediction predict(const ParamVector& theta, const Scenario& s) {
  const detail::Activations act = detail::forward(theta, s);
  const ModelDims& d = theta.layout.dims;
  Prediction p;
  p.plan.resize(d.t_fut);
  for (int t = 0; t < d.t_fut; ++t) {
    const Vec2 pos = act.frame.from_frame({act.plan[3 * t + 0], act.plan[3 * t + 1]});
    p.plan[t].x = pos.x;
    p.plan[t].y = pos.y;
    p.plan[t].heading = act.frame.heading_from_frame(act.plan[3 * t + 2]);
  }
  p.pred.resize(static_cast<std::size_t>(d.n_max) * d.t_fut);
  for (std::size_t k = 0; k < p.pred.size(); ++k)
    p.pred[k] = act.frame.from_frame({act.pred[2 * k], act.pred[2 * k + 1]});
  return p;
}

// Pooled displacement and heading errors over a scenario list. Plan metrics
// average over every (scenario, future step); prediction metrics average
// over present (scenario, agent, step) triples.
inline PlanMetrics evaluate(const ParamVector& theta, const std::vector<Scenario>& scenarios) {
  if (scenarios.empty()) throw PreconditionError("evaluate: empty scenario list");
  const ModelDims& d = theta.layout.dims;

  double ade = 0.0, fde = 0.0, ahe = 0.0, fhe = 0.0;
  double pred_ade = 0.0, pred_fde = 0.0;
  long long plan_steps = 0, plan_finals = 0;
  long long pred_steps = 0, pred_finals = 0;

  for (const Scenario& s : scenarios) {
    const Prediction p = predict(theta, s);
    for (int t = 0; t < d.t_fut; ++t) {
      const TrajSample& tgt = s.ego.samples[s.t_obs + t];
      const double err = distance(p.plan[t].pos(), tgt.pos());
      const double herr = heading_distance(p.plan[t].heading, tgt.heading);
      ade += err;
      ahe += herr;
      ++plan_steps;
      if (t == d.t_fut - 1) {
        fde += err;
        fhe += herr;
        ++plan_finals;
      }
    }
    for (int a = 0; a < static_cast<int>(s.agents.size()); ++a) {
      const AgentTrack& agent = s.agents[a];
      for (int t = 0; t < d.t_fut; ++t) {
        if (!agent.present[s.t_obs + t]) continue;
        const std::size_t k = static_cast<std::size_t>(a) * d.t_fut + t;
        const double err = distance(p.pred[k], agent.traj.samples[s.t_obs + t].pos());
        pred_ade += err;
        ++pred_steps;
        if (t == d.t_fut - 1) {
          pred_fde += err;
          ++pred_finals;
        }
      }
    }
  }

  PlanMetrics m;
  m.plan_ade = ade / plan_steps;
  m.plan_fde = fde / plan_finals;
  m.plan_ahe = ahe / plan_steps;
  m.plan_fhe = fhe / plan_finals;
  m.pred_ade = pred_steps > 0 ? pred_ade / pred_steps : 0.0;
  m.pred_fde = pred_finals > 0 ? pred_fde / pred_finals : 0.0;
  return m;
}

// ---------------------------------------------------------------------------
// Checkpoint format: little-endian header + flat f64 array.
// ---------------------------------------------------------------------------

namespace detail {

inline constexpr std::uint32_t kCheckpointMagic = 0x4B43'4347;  // "GCCK"
inline constexpr std::uint32_t kCheckpointVersion = 1;

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
inline void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
inline void put_f64(std::string& out, double d) {
  std::uint64_t bits;
  static_assert(sizeof(bits) == sizeof(d));
  std::memcpy(&bits, &d, sizeof(bits));
  put_u64(out, bits);
}

struct ByteReader {
  const std::string& data;
  std::size_t at = 0;

  std::uint32_t u32() {
    if (at + 4 > data.size()) throw DataError("checkpoint truncated");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data[at++])) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    if (at + 8 > data.size()) throw DataError("checkpoint truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data[at++])) << (8 * i);
    return v;
  }
  double f64() {
    const std::uint64_t bits = u64();
    double d;
    std::memcpy(&d, &bits, sizeof(d));
    return d;
  }
};

}  // namespace detail

struct Checkpoint {
  ParamVector params;
  std::uint64_t seed = 0;
  std::uint32_t epoch = 0;
};

inline std::string serialize_checkpoint(const ParamVector& params, std::uint64_t seed,
                                        std::uint32_t epoch) {
  const ModelDims& d = params.layout.dims;
  std::string out;
  out.reserve(64 + params.values.size() * 8);
  detail::put_u32(out, detail::kCheckpointMagic);
  detail::put_u32(out, detail::kCheckpointVersion);
  detail::put_u64(out, seed);
  detail::put_u32(out, epoch);
  detail::put_u32(out, static_cast<std::uint32_t>(d.input));
  detail::put_u32(out, static_cast<std::uint32_t>(d.hidden));
  detail::put_u32(out, static_cast<std::uint32_t>(d.t_obs));
  detail::put_u32(out, static_cast<std::uint32_t>(d.t_fut));
  detail::put_u32(out, static_cast<std::uint32_t>(d.n_max));
  detail::put_u64(out, params.values.size());
  for (double v : params.values) detail::put_f64(out, v);
  return out;
}

inline Checkpoint parse_checkpoint(const std::string& bytes) {
  detail::ByteReader r{bytes};
  if (r.u32() != detail::kCheckpointMagic) throw DataError("checkpoint: bad magic");
  if (r.u32() != detail::kCheckpointVersion) throw DataError("checkpoint: unsupported version");
  Checkpoint ck;
  ck.seed = r.u64();
  ck.epoch = r.u32();
  ModelDims d;
  d.input = static_cast<int>(r.u32());
  d.hidden = static_cast<int>(r.u32());
  d.t_obs = static_cast<int>(r.u32());
  d.t_fut = static_cast<int>(r.u32());
  d.n_max = static_cast<int>(r.u32());
  ck.params.layout = make_layout(d);
  const std::uint64_t total = r.u64();
  if (total != ck.params.layout.total) throw DataError("checkpoint: value count does not match layout");
  ck.params.values.resize(total);
  for (std::uint64_t i = 0; i < total; ++i) ck.params.values[i] = r.f64();
  return ck;
}

inline void save_checkpoint(const std::string& path, const ParamVector& params,
                            std::uint64_t seed, std::uint32_t epoch) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  const std::string bytes = serialize_checkpoint(params, seed, epoch);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path);
}

inline Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_checkpoint(bytes);
}

}  // namespace gradcur
