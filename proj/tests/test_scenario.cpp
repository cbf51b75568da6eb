#include <catch2/catch.hpp>

#include <cmath>
#include <limits>
#include <map>

#include "gradcur/io.hpp"
#include "gradcur/scenario.hpp"

using namespace gradcur;

namespace {

// Hand-built scenario: trajectories listed sample by sample.
Scenario make_scenario(std::vector<TrajSample> ego, int t_obs, double dt,
                       std::vector<std::pair<std::vector<TrajSample>, std::vector<std::uint8_t>>>
                           agents = {}) {
  Scenario s;
  s.id = "hand_0";
  s.t_obs = t_obs;
  s.ego.dt = dt;
  s.ego.samples = std::move(ego);
  for (auto& [samples, present] : agents) {
    AgentTrack a;
    a.traj.dt = dt;
    a.traj.samples = std::move(samples);
    a.present = std::move(present);
    s.agents.push_back(std::move(a));
  }
  return s;
}

std::map<std::string, int> histogram(const std::vector<Scenario>& all, Split split) {
  std::map<std::string, int> h;
  for (const Scenario& s : all)
    if (s.split == split) ++h[to_string(s.family)];
  return h;
}

bool features_equal(const MetaFeatures& a, const MetaFeatures& b) {
  return a.d_min == b.d_min && a.ttc_min == b.ttc_min && a.n_conflict == b.n_conflict &&
         a.t_prox == b.t_prox && a.dtheta_max == b.dtheta_max && a.n_active == b.n_active;
}

}  // namespace

TEST_CASE("generator honors the hard-fraction rounding rule", "[scenario]") {
  GenConfig cfg;
  cfg.n_train = 100;
  cfg.n_val = 30;
  cfg.hard_fraction = 0.1;
  cfg.seed = 7;
  const std::vector<Scenario> all = generate_dataset(cfg);
  CHECK(histogram(all, Split::train)["crossing_conflict"] == 10);
  CHECK(histogram(all, Split::val)["crossing_conflict"] == 3);
}

TEST_CASE("generator is deterministic given the seed", "[scenario]") {
  GenConfig cfg;
  cfg.n_train = 40;
  cfg.n_val = 10;
  cfg.seed = 21;
  const std::string once = serialize_dataset(generate_dataset(cfg));
  const std::string twice = serialize_dataset(generate_dataset(cfg));
  CHECK(once == twice);
}

TEST_CASE("family histogram matches the configured mixture exactly", "[scenario]") {
  GenConfig cfg;
  cfg.n_train = 500;
  cfg.n_val = 150;
  cfg.hard_fraction = 0.1;
  cfg.seed = 3;
  const std::vector<Scenario> all = generate_dataset(cfg);
  const std::map<std::string, int> train = histogram(all, Split::train);
  CHECK(train.at("crossing_conflict") == 50);
  CHECK(train.at("cruise") == 150);
  CHECK(train.at("lane_change") == 150);
  CHECK(train.at("turn") == 150);
}

TEST_CASE("generator rejects invalid configs with the field name", "[scenario]") {
  GenConfig cfg;
  cfg.n_train = 0;
  CHECK_THROWS_MATCHES(generate_dataset(cfg), ConfigError,
                       Catch::Matchers::Message("gen config: n_train must be >= 1"));
  cfg.n_train = 10;
  cfg.hard_fraction = 1.5;
  CHECK_THROWS_WITH(generate_dataset(cfg), Catch::Contains("hard_fraction"));
  cfg.hard_fraction = 0.1;
  cfg.dt = 0.0;
  CHECK_THROWS_WITH(generate_dataset(cfg), Catch::Contains("dt"));
}

TEST_CASE("head-on closing gives the closed-form TTC", "[scenario]") {
  // Ego at the origin moving +x at 10 m/s; agent 100 m ahead moving -x at
  // 10 m/s. Closing speed 20 m/s, so TTC = 100 / 20 = 5 s at the first step;
  // the last step has no forward difference, so the minimum is exactly 5.
  const double dt = 0.5;
  Scenario s = make_scenario({{0, 0, 0}, {5, 0, 0}}, 1, dt,
                             {{{{100, 0, std::numbers::pi}, {95, 0, std::numbers::pi}}, {1, 1}}});
  const MetaFeatures f = compute_meta_features(s, FeatureParams{});
  CHECK(f.ttc_min == 5.0);
  CHECK(f.d_min == Approx(90.0));  // closest at the second sample
}

TEST_CASE("zero agents leave vacuous minima and sums", "[scenario]") {
  Scenario s = make_scenario({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}}, 1, 1.0);
  const MetaFeatures f = compute_meta_features(s, FeatureParams{});
  CHECK(std::isinf(f.d_min));
  CHECK(f.ttc_min == FeatureParams{}.ttc_cap);
  CHECK(f.n_conflict == 0);
  CHECK(f.t_prox == 0.0);
  CHECK(f.dtheta_max == 0.0);
  CHECK(f.n_active == 0);

  // Singleton dataset: every feature is constant, so the composite sits at
  // the neutral 0.5.
  std::vector<FeatureRow> rows{{s.id, f}};
  const ScoreTable table = composite_meta_score(rows);
  CHECK(rows[0].features.composite == 0.5);
  CHECK(table.entries.at(s.id).raw == 0.5);
}

TEST_CASE("a distant stationary agent never trips the thresholds", "[scenario]") {
  Scenario s = make_scenario(
      {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}}, 1, 1.0,
      {{{{50, 0, 1.0}, {50, 0, 1.0}, {50, 0, 1.0}}, {1, 1, 1}}});
  const MetaFeatures f = compute_meta_features(s, FeatureParams{});
  CHECK(f.t_prox == 0.0);
  CHECK(f.dtheta_max == 0.0);
  CHECK(f.n_active == 0);
  CHECK(f.d_min == Approx(50.0));
}

TEST_CASE("zero-length trajectory is a malformed scenario", "[scenario]") {
  Scenario s;
  s.id = "empty";
  CHECK_THROWS_AS(compute_meta_features(s, FeatureParams{}), DataError);
}

TEST_CASE("composite extremes and degenerate normalization", "[scenario]") {
  const auto features = [](double d_min, double ttc, int nc, double tp, double dth, int na) {
    MetaFeatures f;
    f.d_min = d_min;
    f.ttc_min = ttc;
    f.n_conflict = nc;
    f.t_prox = tp;
    f.dtheta_max = dth;
    f.n_active = na;
    return f;
  };

  SECTION("a scenario maximizing every difficulty direction scores exactly 1") {
    std::vector<FeatureRow> rows{{"a", features(1.0, 2.0, 3, 8.0, 2.5, 5)},
                                 {"b", features(9.0, 15.0, 0, 1.0, 0.5, 1)},
                                 {"c", features(4.0, 9.0, 1, 3.0, 1.0, 2)}};
    composite_meta_score(rows);
    CHECK(rows[0].features.composite == 1.0);
  }

  SECTION("identical rows all map to 0.5") {
    std::vector<FeatureRow> rows{{"a", features(3, 5, 1, 2, 1, 2)},
                                 {"b", features(3, 5, 1, 2, 1, 2)},
                                 {"c", features(3, 5, 1, 2, 1, 2)}};
    composite_meta_score(rows);
    for (const FeatureRow& r : rows) CHECK(r.features.composite == 0.5);
  }

  SECTION("three hand-built rows match the hand-computed normalization") {
    std::vector<FeatureRow> rows{{"a", features(2.0, 4.0, 1, 6.0, 0.5, 2)},
                                 {"b", features(8.0, 12.0, 0, 1.0, 2.0, 4)},
                                 {"c", features(5.0, 20.0, 3, 0.0, 1.0, 3)}};
    composite_meta_score(rows);
    // Worked by hand over the six min-max columns (d_min and ttc inverted):
    //   a: (1 + 1 + 1/3 + 1 + 0 + 0) / 6 = 5/9
    //   b: (0 + 1/2 + 0 + 1/6 + 1 + 1) / 6 = 4/9
    //   c: (1/2 + 0 + 1 + 0 + 1/3 + 1/2) / 6 = 7/18
    CHECK(rows[0].features.composite == Approx(5.0 / 9.0).epsilon(1e-12));
    CHECK(rows[1].features.composite == Approx(4.0 / 9.0).epsilon(1e-12));
    CHECK(rows[2].features.composite == Approx(7.0 / 18.0).epsilon(1e-12));
  }
}

TEST_CASE("composite stays in range and every feature attains both extremes", "[scenario]") {
  GenConfig cfg;
  cfg.n_train = 120;
  cfg.n_val = 40;
  cfg.seed = 11;
  const std::vector<Scenario> train = filter_split(generate_dataset(cfg), Split::train);
  std::vector<FeatureRow> rows;
  for (const Scenario& s : train)
    rows.push_back(FeatureRow{s.id, compute_meta_features(s, FeatureParams{})});
  composite_meta_score(rows);

  for (const FeatureRow& r : rows) {
    CHECK(r.features.composite >= 0.0);
    CHECK(r.features.composite <= 1.0);
  }

  // Each column, after inversion where applicable, must contribute an exact
  // 0 and an exact 1 somewhere unless it is constant.
  const auto check_column = [&](auto getter, bool inverted) {
    std::vector<double> col;
    for (const FeatureRow& r : rows) col.push_back(getter(r.features));
    std::vector<double> norm = minmax_normalize(col);
    if (inverted)
      for (double& v : norm) v = 1.0 - v;
    const bool constant = norm.front() == 0.5 &&
                          std::all_of(norm.begin(), norm.end(),
                                      [&](double v) { return v == norm.front(); });
    if (constant) return;
    CHECK(std::count(norm.begin(), norm.end(), 0.0) >= 1);
    CHECK(std::count(norm.begin(), norm.end(), 1.0) >= 1);
  };
  check_column([](const MetaFeatures& f) { return f.d_min; }, true);
  check_column([](const MetaFeatures& f) { return f.ttc_min; }, true);
  check_column([](const MetaFeatures& f) { return static_cast<double>(f.n_conflict); }, false);
  check_column([](const MetaFeatures& f) { return f.t_prox; }, false);
  check_column([](const MetaFeatures& f) { return f.dtheta_max; }, false);
  check_column([](const MetaFeatures& f) { return static_cast<double>(f.n_active); }, false);
}

TEST_CASE("features are invariant under rigid transforms", "[scenario]") {
  GenConfig cfg;
  cfg.n_train = 6;
  cfg.n_val = 1;
  cfg.hard_fraction = 0.5;
  cfg.seed = 17;
  const std::vector<Scenario> train = filter_split(generate_dataset(cfg), Split::train);

  const double phi = 0.7;
  const double c = std::cos(phi), sn = std::sin(phi);
  const Vec2 shift{13.0, -8.0};
  const auto transform = [&](Scenario s) {
    const auto apply = [&](TrajSample& p) {
      const double x = c * p.x - sn * p.y + shift.x;
      const double y = sn * p.x + c * p.y + shift.y;
      p.x = x;
      p.y = y;
      p.heading = wrap_angle(p.heading + phi);
    };
    for (TrajSample& p : s.ego.samples) apply(p);
    for (AgentTrack& a : s.agents)
      for (TrajSample& p : a.traj.samples) apply(p);
    return s;
  };

  for (const Scenario& s : train) {
    const MetaFeatures f1 = compute_meta_features(s, FeatureParams{});
    const MetaFeatures f2 = compute_meta_features(transform(s), FeatureParams{});
    const auto close = [](double a, double b) {
      return std::fabs(a - b) <= 1e-9 * std::max({1.0, std::fabs(a), std::fabs(b)});
    };
    CHECK(close(f1.d_min, f2.d_min));
    CHECK(close(f1.ttc_min, f2.ttc_min));
    CHECK(close(f1.t_prox, f2.t_prox));
    CHECK(close(f1.dtheta_max, f2.dtheta_max));
    CHECK(f1.n_conflict == f2.n_conflict);
    CHECK(f1.n_active == f2.n_active);
  }
}

TEST_CASE("moving an agent closer cannot reduce t_prox or raise d_min", "[scenario]") {
  GenConfig cfg;
  cfg.n_train = 8;
  cfg.n_val = 1;
  cfg.seed = 29;
  for (const Scenario& s : filter_split(generate_dataset(cfg), Split::train)) {
    if (s.agents.empty()) continue;
    Scenario closer = s;
    for (std::size_t t = 0; t < closer.ego.samples.size(); ++t) {
      TrajSample& p = closer.agents[0].traj.samples[t];
      const TrajSample& e = closer.ego.samples[t];
      p.x = e.x + 0.5 * (p.x - e.x);
      p.y = e.y + 0.5 * (p.y - e.y);
    }
    const MetaFeatures before = compute_meta_features(s, FeatureParams{});
    const MetaFeatures after = compute_meta_features(closer, FeatureParams{});
    CHECK(after.t_prox >= before.t_prox);
    CHECK(after.d_min <= before.d_min);
  }
}

TEST_CASE("feature computation is bit-for-bit deterministic", "[scenario]") {
  GenConfig cfg;
  cfg.n_train = 5;
  cfg.n_val = 1;
  cfg.seed = 41;
  for (const Scenario& s : filter_split(generate_dataset(cfg), Split::train)) {
    const MetaFeatures a = compute_meta_features(s, FeatureParams{});
    const MetaFeatures b = compute_meta_features(s, FeatureParams{});
    CHECK(features_equal(a, b));
  }
}

TEST_CASE("generated scenarios satisfy the type invariants", "[scenario]") {
  GenConfig cfg;
  cfg.n_train = 60;
  cfg.n_val = 20;
  cfg.seed = 13;
  for (const Scenario& s : generate_dataset(cfg)) {
    CHECK(s.length() == cfg.t_obs + cfg.t_fut);
    CHECK(static_cast<int>(s.agents.size()) <= kMaxAgents);
    for (const TrajSample& p : s.ego.samples) {
      CHECK(std::isfinite(p.x));
      CHECK(std::isfinite(p.y));
      CHECK(p.heading > -std::numbers::pi);
      CHECK(p.heading <= std::numbers::pi);
    }
  }
}
