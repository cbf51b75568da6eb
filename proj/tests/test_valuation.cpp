#include <catch2/catch.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "gradcur/ranking.hpp"
#include "gradcur/scenario.hpp"
#include "gradcur/stats.hpp"
#include "gradcur/valuation.hpp"

using namespace gradcur;

namespace {

std::vector<Scenario> sample_scenarios(int count, std::uint64_t seed) {
  GenConfig cfg;
  cfg.n_train = count;
  cfg.n_val = 1;
  cfg.hard_fraction = 0.25;
  cfg.seed = seed;
  cfg.t_obs = 3;
  cfg.t_fut = 4;
  return filter_split(generate_dataset(cfg), Split::train);
}

const ModelDims kDims = ModelDims::make(3, 4, 6);

std::vector<double> raws(const ScoreTable& t) {
  std::vector<double> out;
  for (const auto& [id, e] : t.entries) out.push_back(e.raw);
  return out;
}

std::vector<double> normalized(const ScoreTable& t) {
  std::vector<double> out;
  for (const auto& [id, e] : t.entries) out.push_back(e.normalized);
  return out;
}

}  // namespace

TEST_CASE("gradient dot products", "[valuation]") {
  GradientVector a, b;
  a.values = {1.0, 2.0};
  b.values = {3.0, -1.0};
  CHECK(dot(a, b) == 1.0);

  b.values = {2.0, -1.0};
  CHECK(dot(a, b) == 0.0);  // orthogonal

  b.values = {1.0, 2.0, 3.0};
  CHECK_THROWS_AS(dot(a, b), ShapeError);
}

TEST_CASE("mean validation gradient basics", "[valuation]") {
  const std::vector<Scenario> scenarios = sample_scenarios(5, 3);
  const ParamVector theta = init_params(kDims, 11);

  SECTION("singleton set equals that sample's gradient") {
    const std::vector<Scenario> one{scenarios[0]};
    CHECK(mean_val_gradient(theta, one).values == gradient(theta, scenarios[0]).values);
  }

  SECTION("mirror-image targets cancel to the zero vector") {
    // All-zero observation: freshly initialized parameters have zero biases,
    // so the prediction is exactly zero and futures of +d and -d produce
    // gradients that are exact negations of each other.
    Scenario up;
    up.id = "mirror_a";
    up.t_obs = 3;
    up.ego.dt = 1.0;
    up.ego.samples.assign(3 + kDims.t_fut, TrajSample{});
    Scenario down = up;
    down.id = "mirror_b";
    for (int t = 0; t < kDims.t_fut; ++t) {
      up.ego.samples[up.t_obs + t] = {1.5, -0.4, 0.2};
      down.ego.samples[down.t_obs + t] = {-1.5, 0.4, -0.2};
    }
    const GradientVector g = mean_val_gradient(theta, {up, down});
    for (double v : g.values) CHECK(v == 0.0);
  }

  SECTION("matches a sequential-loop oracle exactly") {
    std::vector<Scenario> sorted = scenarios;
    std::sort(sorted.begin(), sorted.end(),
              [](const Scenario& a, const Scenario& b) { return a.id < b.id; });
    std::vector<double> acc(theta.layout.total, 0.0);
    for (const Scenario& s : sorted) {
      const GradientVector g = gradient(theta, s);
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += g.values[i];
    }
    for (double& v : acc) v *= 1.0 / sorted.size();
    CHECK(mean_val_gradient(theta, scenarios).values == acc);  // 0 ULP
  }

  SECTION("validation-order permutation does not change the result") {
    std::vector<Scenario> shuffled = scenarios;
    std::reverse(shuffled.begin(), shuffled.end());
    CHECK(mean_val_gradient(theta, scenarios).values ==
          mean_val_gradient(theta, shuffled).values);
  }

  CHECK_THROWS_AS(mean_val_gradient(theta, {}), PreconditionError);
}

TEST_CASE("tracin scores align with the validation gradient", "[valuation]") {
  std::vector<Scenario> train = sample_scenarios(6, 9);
  const ParamVector theta = init_params(kDims, 21);

  // Use one training scenario itself as the validation set: its raw score is
  // exactly |g_val|^2 and by Cauchy-Schwarz no other sample can beat it
  // without a larger gradient.
  const std::vector<Scenario> val{train[2]};
  const GradientVector g_val = mean_val_gradient(theta, val);
  const ScoreTable table = tracin_scores(theta, train, g_val);

  CHECK(table.entries.at(train[2].id).raw == dot(g_val, g_val));
  double max_raw = -1e300;
  for (const auto& [id, e] : table.entries) max_raw = std::max(max_raw, e.raw);
  if (table.entries.at(train[2].id).raw == max_raw)
    CHECK(table.entries.at(train[2].id).normalized == 1.0);

  GradientVector bad;
  bad.values.assign(3, 0.0);
  CHECK_THROWS_AS(tracin_scores(theta, train, bad), ShapeError);
}

TEST_CASE("tracin normalization is equivariant under g_val scaling", "[valuation]") {
  const std::vector<Scenario> train = sample_scenarios(5, 33);
  const ParamVector theta = init_params(kDims, 17);
  const GradientVector g_val = mean_val_gradient(theta, train);

  GradientVector doubled = g_val;
  for (double& v : doubled.values) v *= 2.0;
  const ScoreTable base = tracin_scores(theta, train, g_val);
  const ScoreTable scaled = tracin_scores(theta, train, doubled);
  for (const auto& [id, e] : base.entries) {
    CHECK(scaled.entries.at(id).raw == 2.0 * e.raw);  // exact for powers of two
    CHECK(scaled.entries.at(id).normalized == e.normalized);
  }

  GradientVector tripled = g_val;
  for (double& v : tripled.values) v *= 3.0;
  const ScoreTable thrice = tracin_scores(theta, train, tripled);
  for (const auto& [id, e] : base.entries)
    CHECK(thrice.entries.at(id).normalized == Approx(e.normalized).margin(1e-12));
}

TEST_CASE("loss scores follow forward_loss", "[valuation]") {
  std::vector<Scenario> train = sample_scenarios(3, 41);
  const ParamVector theta = init_params(kDims, 2);
  const ScoreTable table = loss_scores(theta, train);
  for (const Scenario& s : train)
    CHECK(table.entries.at(s.id).raw == forward_loss(theta, s).loss);

  // Ordering of normalized scores matches the raw loss ordering.
  const std::vector<double> r = raws(table);
  const std::vector<double> n = normalized(table);
  CHECK(average_ranks(r) == average_ranks(n));

  SECTION("identical scenarios collapse to the 0.5 convention") {
    std::vector<Scenario> twins{train[0], train[0]};
    twins[1].id = train[0].id + "_twin";
    const ScoreTable t = loss_scores(theta, twins);
    CHECK(t.entries.at(twins[0].id).normalized == 0.5);
    CHECK(t.entries.at(twins[1].id).normalized == 0.5);
  }
}

TEST_CASE("min-max normalization preserves ranks in every table", "[valuation]") {
  const std::vector<Scenario> train = sample_scenarios(12, 55);
  const ParamVector theta = init_params(kDims, 5);
  const GradientVector g_val = mean_val_gradient(theta, train);
  for (const ScoreTable& t : {tracin_scores(theta, train, g_val), loss_scores(theta, train)})
    CHECK(average_ranks(raws(t)) == average_ranks(normalized(t)));
}

TEST_CASE("hybrid scoring", "[valuation]") {
  const auto table_from = [](std::vector<std::pair<std::string, double>> raw, ScoreMethod m) {
    return build_score_table(m, raw);
  };

  SECTION("averaging a table with itself reproduces its percentiles") {
    const ScoreTable a =
        table_from({{"a", 3.0}, {"b", 1.0}, {"c", 2.0}, {"d", 7.0}}, ScoreMethod::tracin);
    const ScoreTable h = hybrid_scores(a, a);
    for (const auto& [id, e] : a.entries) {
      CHECK(h.entries.at(id).raw == e.percentile);
      CHECK(h.entries.at(id).percentile == e.percentile);
    }
  }

  SECTION("opposed rankings flatten to 0.5 (odd n)") {
    const ScoreTable a = table_from(
        {{"a", 1.0}, {"b", 2.0}, {"c", 3.0}, {"d", 4.0}, {"e", 5.0}}, ScoreMethod::tracin);
    const ScoreTable b = table_from(
        {{"a", 5.0}, {"b", 4.0}, {"c", 3.0}, {"d", 2.0}, {"e", 1.0}}, ScoreMethod::meta);
    for (const auto& [id, e] : hybrid_scores(a, b).entries) CHECK(e.raw == 0.5);
  }

  SECTION("n=4 hand-computed percentile averages") {
    const ScoreTable a =
        table_from({{"a", 10.0}, {"b", 20.0}, {"c", 30.0}, {"d", 40.0}}, ScoreMethod::tracin);
    const ScoreTable b =
        table_from({{"a", 5.0}, {"b", 1.0}, {"c", 9.0}, {"d", 7.0}}, ScoreMethod::meta);
    // pct_a = (0, 1/3, 2/3, 1); pct_b = (1/3, 0, 1, 2/3);
    // hybrid = (1/6, 1/6, 5/6, 5/6); re-ranked with average ties:
    // percentile = (1/6, 1/6, 5/6, 5/6).
    const ScoreTable h = hybrid_scores(a, b);
    CHECK(h.entries.at("a").raw == Approx(1.0 / 6.0).epsilon(1e-14));
    CHECK(h.entries.at("b").raw == Approx(1.0 / 6.0).epsilon(1e-14));
    CHECK(h.entries.at("c").raw == Approx(5.0 / 6.0).epsilon(1e-14));
    CHECK(h.entries.at("d").raw == Approx(5.0 / 6.0).epsilon(1e-14));
    CHECK(h.entries.at("a").percentile == Approx(1.0 / 6.0).epsilon(1e-14));
    CHECK(h.entries.at("c").percentile == Approx(5.0 / 6.0).epsilon(1e-14));
    for (const auto& [id, e] : h.entries) CHECK(e.normalized == e.raw);
  }

  SECTION("symmetric in its arguments") {
    const ScoreTable a =
        table_from({{"a", 1.0}, {"b", 9.0}, {"c", 4.0}}, ScoreMethod::tracin);
    const ScoreTable b =
        table_from({{"a", 2.0}, {"b", 3.0}, {"c", 8.0}}, ScoreMethod::meta);
    const ScoreTable ab = hybrid_scores(a, b);
    const ScoreTable ba = hybrid_scores(b, a);
    for (const auto& [id, e] : ab.entries) {
      CHECK(ba.entries.at(id).raw == e.raw);
      CHECK(ba.entries.at(id).percentile == e.percentile);
    }
  }

  SECTION("id mismatch reports the symmetric difference") {
    const ScoreTable a = table_from({{"a", 1.0}, {"b", 2.0}, {"x", 0.0}}, ScoreMethod::tracin);
    const ScoreTable b = table_from({{"a", 1.0}, {"b", 2.0}, {"y", 0.0}}, ScoreMethod::meta);
    CHECK_THROWS_WITH(hybrid_scores(a, b),
                      Catch::Contains("x") && Catch::Contains("y"));
  }
}

TEST_CASE("hybrid of independent sources correlates ~0.707 with each", "[valuation]") {
  Rng rng(2024);
  const int n = 4000;
  std::vector<std::pair<std::string, double>> ra, rb;
  for (int i = 0; i < n; ++i) {
    char id[16];
    std::snprintf(id, sizeof(id), "s%05d", i);
    ra.emplace_back(id, rng.uniform01());
    rb.emplace_back(id, rng.uniform01());
  }
  const ScoreTable a = build_score_table(ScoreMethod::tracin, ra);
  const ScoreTable b = build_score_table(ScoreMethod::meta, rb);
  const ScoreTable h = hybrid_scores(a, b);

  std::vector<double> va, vb, vh;
  for (const auto& [id, e] : a.entries) {
    va.push_back(e.raw);
    vb.push_back(b.entries.at(id).raw);
    vh.push_back(h.entries.at(id).raw);
  }
  CHECK(spearman(vh, va).rho == Approx(0.707).margin(0.04));
  CHECK(spearman(vh, vb).rho == Approx(0.707).margin(0.04));
}

TEST_CASE("spearman endpoints", "[valuation]") {
  const std::vector<double> x{1.0, 2.5, 3.0, 4.2, 9.9};
  std::vector<double> rev = x;
  std::reverse(rev.begin(), rev.end());
  CHECK(spearman(x, x).rho == Approx(1.0).epsilon(1e-12));
  CHECK(spearman(x, rev).rho == Approx(-1.0).epsilon(1e-12));
  CHECK(spearman(x, x).p == 0.0);
  CHECK_THROWS_AS(spearman({1.0, 1.0, 1.0, 1.0, 1.0}, x), DegenerateError);
}
