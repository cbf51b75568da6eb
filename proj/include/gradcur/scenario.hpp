#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "gradcur/errors.hpp"
#include "gradcur/geometry.hpp"
#include "gradcur/ranking.hpp"
#include "gradcur/rng.hpp"
#include "gradcur/score_table.hpp"

namespace gradcur {

inline constexpr int kMaxAgents = 8;

enum class Family { cruise, lane_change, turn, crossing_conflict };
enum class Split { train, val };

inline const char* to_string(Family f) {
  switch (f) {
    case Family::cruise: return "cruise";
    case Family::lane_change: return "lane_change";
    case Family::turn: return "turn";
    case Family::crossing_conflict: return "crossing_conflict";
  }
  return "?";
}

inline Family family_from_string(const std::string& s) {
  if (s == "cruise") return Family::cruise;
  if (s == "lane_change") return Family::lane_change;
  if (s == "turn") return Family::turn;
  if (s == "crossing_conflict") return Family::crossing_conflict;
  throw DataError("unknown family: " + s);
}

inline const char* to_string(Split s) { return s == Split::train ? "train" : "val"; }

inline Split split_from_string(const std::string& s) {
  if (s == "train") return Split::train;
  if (s == "val") return Split::val;
  throw DataError("unknown split: " + s);
}

struct TrajSample {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;  // wrapped to (-pi, pi]

  Vec2 pos() const { return {x, y}; }
};

struct Trajectory {
  std::vector<TrajSample> samples;
  double dt = 0.1;
};

struct AgentTrack {
  Trajectory traj;
  std::vector<std::uint8_t> present;  // per-step presence mask
};

// One multi-agent record: the unit of scoring and training. The first t_obs
// samples of every trajectory are observed history, the rest are future.
struct Scenario {
  std::string id;
  Family family = Family::cruise;
  Split split = Split::train;
  Trajectory ego;
  std::vector<AgentTrack> agents;  // size <= kMaxAgents
  int t_obs = 0;

  int length() const { return static_cast<int>(ego.samples.size()); }
  int t_fut() const { return length() - t_obs; }
  double dt() const { return ego.dt; }
};

inline void validate_scenario(const Scenario& s) {
  if (s.ego.samples.empty()) throw DataError("zero-length trajectory in scenario " + s.id);
  if (s.ego.dt <= 0.0) throw DataError("non-positive dt in scenario " + s.id);
  if (s.t_obs < 1 || s.t_obs > s.length())
    throw DataError("observed-step count out of range in scenario " + s.id);
  if (static_cast<int>(s.agents.size()) > kMaxAgents)
    throw DataError("agent count exceeds limit in scenario " + s.id);
  for (const AgentTrack& a : s.agents) {
    if (a.traj.samples.size() != s.ego.samples.size() ||
        a.present.size() != s.ego.samples.size() || a.traj.dt != s.ego.dt)
      throw DataError("agent trajectory shape mismatch in scenario " + s.id);
  }
}

// ---------------------------------------------------------------------------
// Metadata interaction-difficulty features
// ---------------------------------------------------------------------------

struct FeatureParams {
  double d_prox = 10.0;      // [m] proximity threshold for t_prox / dtheta_max
  double r_conflict = 3.0;   // [m] path-conflict radius
  double dt_conflict = 2.0;  // [s] path-conflict time window
  double ttc_cap = 20.0;     // [s] time-to-collision cap
  double v_min = 0.5;        // [m/s] activity threshold
};

struct MetaFeatures {
  double d_min = 0.0;       // [m]   min ego-agent distance; +inf when no agent step
  double ttc_min = 0.0;     // [s]   min time-to-collision, capped at ttc_cap
  int n_conflict = 0;       //       agents whose path conflicts with ego's
  double t_prox = 0.0;      // [s]   cumulative agent time within d_prox
  double dtheta_max = 0.0;  // [rad] max heading difference while within d_prox
  int n_active = 0;         //       agents with mean speed above v_min
  double composite = 0.0;   //       dataset-normalized difficulty, in [0, 1]
};

// Computes the six raw features for one scenario. Pure; the composite field
// is filled later by composite_meta_score once dataset-level normalization
// statistics exist.
inline MetaFeatures compute_meta_features(const Scenario& s, const FeatureParams& params) {
  validate_scenario(s);
  const int total = s.length();
  const double dt = s.dt();
  const double inf = std::numeric_limits<double>::infinity();

  MetaFeatures f;
  f.d_min = inf;
  f.ttc_min = inf;

  for (const AgentTrack& agent : s.agents) {
    bool conflict = false;
    double path_len = 0.0;
    int motion_segments = 0;

    for (int t = 0; t < total; ++t) {
      if (!agent.present[t]) continue;
      const Vec2 rel = agent.traj.samples[t].pos() - s.ego.samples[t].pos();
      const double dist = norm(rel);
      f.d_min = std::min(f.d_min, dist);

      if (dist <= params.d_prox) {
        f.t_prox += dt;
        f.dtheta_max = std::max(
            f.dtheta_max,
            heading_distance(s.ego.samples[t].heading, agent.traj.samples[t].heading));
      }

      // Relative velocity by forward difference; the last step has none.
      if (t + 1 < total && agent.present[t + 1] && dist > 1e-12) {
        const Vec2 rel_next = agent.traj.samples[t + 1].pos() - s.ego.samples[t + 1].pos();
        const Vec2 rel_vel = (rel_next - rel) * (1.0 / dt);
        const double closing = -dot(rel, rel_vel) / dist;
        if (closing > 1e-6) f.ttc_min = std::min(f.ttc_min, dist / closing);
      }

      // Mean speed over consecutive present pairs.
      if (t + 1 < total && agent.present[t + 1]) {
        path_len += distance(agent.traj.samples[t + 1].pos(), agent.traj.samples[t].pos());
        ++motion_segments;
      }
    }

    // Path conflict: some future ego position and future agent position come
    // within r_conflict of each other inside the dt_conflict time window.
    for (int t1 = s.t_obs; t1 < total && !conflict; ++t1) {
      for (int t2 = s.t_obs; t2 < total; ++t2) {
        if (!agent.present[t2]) continue;
        if (std::abs(t1 - t2) * dt > params.dt_conflict + 1e-12) continue;
        if (distance(s.ego.samples[t1].pos(), agent.traj.samples[t2].pos()) <=
            params.r_conflict) {
          conflict = true;
          break;
        }
      }
    }
    if (conflict) ++f.n_conflict;

    if (motion_segments > 0 && path_len / (motion_segments * dt) > params.v_min) ++f.n_active;
  }

  f.ttc_min = std::min(f.ttc_min, params.ttc_cap);
  return f;
}

struct FeatureRow {
  std::string id;
  MetaFeatures features;
};

// Min-max normalizes each feature across the dataset, inverts d_min and
// ttc_min so that higher always means harder, and averages the six
// normalized values into the composite. Infinite d_min sentinels are clamped
// to the largest finite value in the column before normalization. Also fills
// the composite field of every row.
inline ScoreTable composite_meta_score(std::vector<FeatureRow>& rows) {
  if (rows.empty()) throw PreconditionError("composite_meta_score: empty feature list");
  const std::size_t n = rows.size();

  auto column = [&](auto getter) {
    std::vector<double> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = getter(rows[i].features);
    // Clamp infinities to the finite extremes of the column.
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double v : col)
      if (std::isfinite(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    if (!std::isfinite(lo)) {  // the whole column is infinite
      lo = 0.0;
      hi = 0.0;
    }
    for (double& v : col) v = std::isfinite(v) ? v : (v > 0 ? hi : lo);
    return minmax_normalize(col);
  };

  const std::vector<double> d_min = column([](const MetaFeatures& f) { return f.d_min; });
  const std::vector<double> ttc = column([](const MetaFeatures& f) { return f.ttc_min; });
  const std::vector<double> conf =
      column([](const MetaFeatures& f) { return static_cast<double>(f.n_conflict); });
  const std::vector<double> prox = column([](const MetaFeatures& f) { return f.t_prox; });
  const std::vector<double> dtheta = column([](const MetaFeatures& f) { return f.dtheta_max; });
  const std::vector<double> active =
      column([](const MetaFeatures& f) { return static_cast<double>(f.n_active); });

  std::vector<std::pair<std::string, double>> raw;
  raw.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Larger distance and larger TTC mean easier, so those two contribute
    // inverted.
    const double composite = ((1.0 - d_min[i]) + (1.0 - ttc[i]) + conf[i] + prox[i] +
                              dtheta[i] + active[i]) /
                             6.0;
    rows[i].features.composite = composite;
    raw.emplace_back(rows[i].id, composite);
  }
  return build_score_table(ScoreMethod::meta, raw);
}

// ---------------------------------------------------------------------------
// Synthetic dataset generator
// ---------------------------------------------------------------------------

struct GenConfig {
  int n_train = 500;
  int n_val = 150;
  double hard_fraction = 0.1;  // fraction of crossing_conflict scenarios per split
  std::uint64_t seed = 7;
  int t_obs = 4;
  int t_fut = 16;
  double dt = 0.5;
  double noise_sigma = 0.05;  // [m] Gaussian position noise
};

inline void validate(const GenConfig& cfg) {
  if (cfg.n_train < 1) throw ConfigError("gen config: n_train must be >= 1");
  if (cfg.n_val < 1) throw ConfigError("gen config: n_val must be >= 1");
  if (cfg.hard_fraction < 0.0 || cfg.hard_fraction > 1.0)
    throw ConfigError("gen config: hard_fraction must be in [0, 1]");
  if (cfg.dt <= 0.0) throw ConfigError("gen config: dt must be positive");
  if (cfg.t_obs < 2) throw ConfigError("gen config: t_obs must be >= 2");
  if (cfg.t_fut < 1) throw ConfigError("gen config: t_fut must be >= 1");
  if (cfg.noise_sigma < 0.0) throw ConfigError("gen config: noise_sigma must be >= 0");
}

namespace detail {

// Piecewise speed / turn-rate profile sampled at step granularity. Families
// are built from constant-velocity and constant-turn-rate segments only.
struct MotionProfile {
  std::vector<double> speed;      // per step
  std::vector<double> turn_rate;  // per step
};

inline Trajectory roll_out(Vec2 start, double heading, const MotionProfile& profile, double dt,
                           Rng& rng, double noise_sigma) {
  Trajectory traj;
  traj.dt = dt;
  traj.samples.resize(profile.speed.size());
  double x = start.x, y = start.y, psi = heading;
  for (std::size_t t = 0; t < profile.speed.size(); ++t) {
    traj.samples[t].x = x + rng.normal(0.0, noise_sigma);
    traj.samples[t].y = y + rng.normal(0.0, noise_sigma);
    traj.samples[t].heading = wrap_angle(psi);
    x += profile.speed[t] * std::cos(psi) * dt;
    y += profile.speed[t] * std::sin(psi) * dt;
    psi += profile.turn_rate[t] * dt;
  }
  return traj;
}

inline MotionProfile constant_profile(int steps, double speed, double turn_rate = 0.0) {
  MotionProfile p;
  p.speed.assign(steps, speed);
  p.turn_rate.assign(steps, turn_rate);
  return p;
}

inline AgentTrack make_agent(const Trajectory& traj) {
  AgentTrack a;
  a.traj = traj;
  a.present.assign(traj.samples.size(), 1);
  return a;
}

// Places a constant-velocity agent in the ego's starting frame: `lateral`
// meters to the left, `ahead` meters forward, moving along `heading_offset`
// relative to the ego heading.
inline AgentTrack relative_agent(Vec2 ego_start, double ego_heading, double lateral, double ahead,
                                 double heading_offset, double speed, int steps, double dt,
                                 Rng& rng, double noise_sigma) {
  const double c = std::cos(ego_heading), s = std::sin(ego_heading);
  const Vec2 start{ego_start.x + ahead * c - lateral * s, ego_start.y + ahead * s + lateral * c};
  return make_agent(roll_out(start, wrap_angle(ego_heading + heading_offset),
                             constant_profile(steps, speed), dt, rng, noise_sigma));
}

inline Scenario generate_one(Family family, const GenConfig& cfg, Rng& rng) {
  const int steps = cfg.t_obs + cfg.t_fut;
  const double dt = cfg.dt;

  Scenario s;
  s.family = family;
  s.t_obs = cfg.t_obs;

  const Vec2 ego_start{rng.uniform(-20.0, 20.0), rng.uniform(-20.0, 20.0)};
  const double ego_heading = rng.uniform(-std::numbers::pi, std::numbers::pi);
  const double ego_speed = rng.uniform(8.0, 14.0);

  MotionProfile ego = constant_profile(steps, ego_speed);

  switch (family) {
    case Family::cruise: {
      const int n_agents = 2 + static_cast<int>(rng.below(4));  // 2..5
      for (int a = 0; a < n_agents; ++a) {
        const double lateral = (rng.below(2) ? 1.0 : -1.0) * rng.uniform(3.0, 8.0);
        s.agents.push_back(relative_agent(ego_start, ego_heading, lateral,
                                          rng.uniform(-30.0, 40.0), rng.uniform(-0.05, 0.05),
                                          ego_speed * rng.uniform(0.85, 1.15), steps, dt, rng,
                                          cfg.noise_sigma));
      }
      if (rng.below(4) == 0)  // occasional parked vehicle
        s.agents.push_back(relative_agent(ego_start, ego_heading,
                                          (rng.below(2) ? 1.0 : -1.0) * rng.uniform(8.0, 12.0),
                                          rng.uniform(5.0, 35.0), 0.0, 0.0, steps, dt, rng,
                                          cfg.noise_sigma));
      break;
    }
    case Family::lane_change: {
      // Ego shifts one lane over via two opposed constant-turn-rate arcs.
      // The maneuver starts inside the observed window so the future arc is
      // predictable from history.
      const double lateral_shift = (rng.below(2) ? 1.0 : -1.0) * 3.5;
      const double arc_seconds = 2.0;
      const int arc_steps = std::max(1, static_cast<int>(std::lround(arc_seconds / dt)));
      const double omega = lateral_shift / (ego_speed * arc_seconds * arc_seconds);
      const int latest_start = std::max(0, cfg.t_obs - 2);
      const int start = static_cast<int>(rng.below(static_cast<std::uint64_t>(latest_start + 1)));
      for (int t = 0; t < steps; ++t) {
        if (t >= start && t < start + arc_steps)
          ego.turn_rate[t] = omega;
        else if (t >= start + arc_steps && t < start + 2 * arc_steps)
          ego.turn_rate[t] = -omega;
      }
      const int n_agents = 2 + static_cast<int>(rng.below(3));  // 2..4
      for (int a = 0; a < n_agents; ++a) {
        const double lateral = (rng.below(2) ? 1.0 : -1.0) * rng.uniform(3.0, 7.5);
        s.agents.push_back(relative_agent(ego_start, ego_heading, lateral,
                                          rng.uniform(-35.0, 35.0), rng.uniform(-0.05, 0.05),
                                          ego_speed * rng.uniform(0.8, 1.1), steps, dt, rng,
                                          cfg.noise_sigma));
      }
      break;
    }
    case Family::turn: {
      double omega = (rng.below(2) ? 1.0 : -1.0) * rng.uniform(0.06, 0.15);
      // Keep the heading sweep inside (-pi, pi] so stored headings never jump
      // across the wrap boundary: turn toward zero if the sweep could cross.
      if (std::fabs(ego_heading + omega * steps * dt) > std::numbers::pi - 0.05)
        omega = -std::copysign(std::fabs(omega), ego_heading);
      for (int t = 0; t < steps; ++t) ego.turn_rate[t] = omega;
      const int n_agents = 1 + static_cast<int>(rng.below(4));  // 1..4
      for (int a = 0; a < n_agents; ++a) {
        const double lateral = (rng.below(2) ? 1.0 : -1.0) * rng.uniform(4.0, 9.0);
        s.agents.push_back(relative_agent(ego_start, ego_heading, lateral,
                                          rng.uniform(-25.0, 30.0), rng.uniform(-0.2, 0.2),
                                          rng.uniform(5.0, 12.0), steps, dt, rng,
                                          cfg.noise_sigma));
      }
      break;
    }
    case Family::crossing_conflict: {
      // A crossing agent reaches the ego's projected path t_cross seconds
      // into the future; the ego yields, dropping to a fraction of its speed
      // shortly before the agent arrives. The observed window shows only the
      // approach, so the slowdown must be inferred from the crossing agent.
      const double t_cross = rng.uniform(2.5, 5.5);                        // [s] into future
      const double t_brake = std::max(0.5, t_cross - rng.uniform(1.2, 1.8));
      const double yield_speed = ego_speed * rng.uniform(0.25, 0.45);
      const double decel = 2.5;
      const int brake_step = cfg.t_obs + static_cast<int>(std::lround(t_brake / dt));
      double v = ego_speed;
      for (int t = 0; t < steps; ++t) {
        if (t >= brake_step) v = std::max(yield_speed, v - decel * dt);
        ego.speed[t] = v;
      }

      // Conflict point: the unbraked ego position at t_cross.
      const double along = ego_speed * (cfg.t_obs * dt + t_cross);
      const double cross_side = rng.below(2) ? 1.0 : -1.0;
      const double agent_speed = rng.uniform(6.0, 12.0);
      const double heading_offset =
          cross_side * std::numbers::pi / 2.0 + rng.uniform(-0.25, 0.25);
      // Start the agent so that constant speed brings it to the conflict
      // point at the trajectory time of t_cross.
      const double travel = agent_speed * (cfg.t_obs * dt + t_cross);
      const double c = std::cos(ego_heading), sn = std::sin(ego_heading);
      const Vec2 conflict{ego_start.x + along * c, ego_start.y + along * sn};
      const double agent_heading = wrap_angle(ego_heading + heading_offset);
      const Vec2 agent_start{conflict.x - travel * std::cos(agent_heading),
                             conflict.y - travel * std::sin(agent_heading)};
      s.agents.push_back(make_agent(roll_out(agent_start, agent_heading,
                                             constant_profile(steps, agent_speed), dt, rng,
                                             cfg.noise_sigma)));
      const int extra = static_cast<int>(rng.below(3));  // 0..2 bystanders
      for (int a = 0; a < extra; ++a) {
        const double lateral = (rng.below(2) ? 1.0 : -1.0) * rng.uniform(4.0, 9.0);
        s.agents.push_back(relative_agent(ego_start, ego_heading, lateral,
                                          rng.uniform(-30.0, 20.0), rng.uniform(-0.1, 0.1),
                                          rng.uniform(6.0, 12.0), steps, dt, rng,
                                          cfg.noise_sigma));
      }
      break;
    }
  }

  s.ego = roll_out(ego_start, ego_heading, ego, dt, rng, cfg.noise_sigma);
  return s;
}

inline std::vector<Family> split_families(int n, double hard_fraction, Rng& rng) {
  const int n_hard = static_cast<int>(ceil_fraction(hard_fraction * n));
  const int rest = n - n_hard;
  const Family easy[3] = {Family::cruise, Family::lane_change, Family::turn};
  std::vector<Family> families;
  families.reserve(n);
  for (int i = 0; i < n_hard; ++i) families.push_back(Family::crossing_conflict);
  for (int i = 0; i < rest; ++i) families.push_back(easy[i % 3]);
  rng.shuffle(families);
  return families;
}

}  // namespace detail

// Deterministic given the seed: all draws come from a single sequential
// stream. Exactly ceil(hard_fraction * n) scenarios per split are
// crossing_conflict; the remainder splits as evenly as possible across the
// other three families.
inline std::vector<Scenario> generate_dataset(const GenConfig& cfg) {
  validate(cfg);
  Rng rng(cfg.seed);
  std::vector<Scenario> out;
  out.reserve(cfg.n_train + cfg.n_val);

  const auto run_split = [&](Split split, int n) {
    const std::vector<Family> families = detail::split_families(n, cfg.hard_fraction, rng);
    for (int i = 0; i < n; ++i) {
      Scenario s = detail::generate_one(families[i], cfg, rng);
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%s_%05d", to_string(split), i);
      s.id = buf;
      s.split = split;
      validate_scenario(s);
      out.push_back(std::move(s));
    }
  };
  run_split(Split::train, cfg.n_train);
  run_split(Split::val, cfg.n_val);
  return out;
}

inline std::vector<Scenario> filter_split(const std::vector<Scenario>& all, Split split) {
  std::vector<Scenario> out;
  for (const Scenario& s : all)
    if (s.split == split) out.push_back(s);
  return out;
}

}  // namespace gradcur
