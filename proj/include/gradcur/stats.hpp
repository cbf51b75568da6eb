#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "gradcur/errors.hpp"
#include "gradcur/ranking.hpp"
#include "gradcur/rng.hpp"

namespace gradcur {

namespace detail {

inline double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// Continued fraction for the regularized incomplete beta function, modified
// Lentz algorithm. https://en.wikipedia.org/wiki/Beta_function#Incomplete_beta_function
inline double incomplete_beta_cf(double x, double a, double b) {
  constexpr double tiny = 1e-300;
  constexpr double tol = 1e-15;
  const auto numer = [&](int n) {
    if (n % 2 == 0) {
      const double m = n / 2;
      return m * (b - m) * x / ((a + 2.0 * m - 1.0) * (a + 2.0 * m));
    }
    const double m = (n - 1) / 2;
    return -(a + m) * (a + b + m) * x / ((a + 2.0 * m) * (a + 2.0 * m + 1.0));
  };
  double c = 1.0, d = 0.0, result = 1.0;
  for (int n = 1; n < 100000; ++n) {
    const double an = numer(n);
    d = 1.0 + an * d;
    if (d == 0.0) d = tiny;
    c = 1.0 + an / c;
    if (c == 0.0) c = tiny;
    d = 1.0 / d;
    const double mult = c * d;
    result *= mult;
    if (std::fabs(mult - 1.0) <= tol) break;
  }
  return result;
}

}  // namespace detail

// Regularized incomplete beta I_x(a, b), absolute error well below 1e-12.
inline double regularized_incomplete_beta(double x, double a, double b) {
  if (!(a > 0.0 && b > 0.0) || std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double front = std::exp(a * std::log(x) + b * std::log(1.0 - x) - detail::log_beta(a, b));
  if (x < (a + 1.0) / (a + b + 2.0))
    return front / (a * detail::incomplete_beta_cf(x, a, b));
  return 1.0 - std::exp(b * std::log(1.0 - x) + a * std::log(x) - detail::log_beta(b, a)) /
                   (b * detail::incomplete_beta_cf(1.0 - x, b, a));
}

// Two-tailed Student-t tail probability P(|T_df| > t). For df = 2 this
// matches the closed form 1 - t / sqrt(2 + t^2) to 1e-10.
inline double t_tail(double t, int df) {
  if (df < 1) throw PreconditionError("t_tail: df must be >= 1");
  if (!std::isfinite(t)) throw PreconditionError("t_tail: t must be finite");
  const double x = df / (df + t * t);
  return regularized_incomplete_beta(x, 0.5 * df, 0.5);
}

struct Summary {
  double mean = 0.0;
  double std_population = 0.0;  // divide by n
  double cv_percent = 0.0;      // 100 * std / mean
};

// Population standard deviation (divide by n), which is what reproduces the
// published multi-seed summary cells; the paired test below uses the sample
// formula instead.
inline Summary summarize(const std::vector<double>& values) {
  if (values.size() < 2) throw PreconditionError("summarize: need at least 2 values");
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  Summary s;
  s.mean = mean;
  s.std_population = std::sqrt(ss / n);
  if (mean == 0.0) throw PreconditionError("summarize: zero mean, CV undefined");
  s.cv_percent = 100.0 * s.std_population / std::fabs(mean);
  return s;
}

struct PairedT {
  double delta_mean = 0.0;
  double t = 0.0;
  double p = 0.0;   // two-tailed
  double dz = 0.0;  // |delta_mean| / sample std of differences
};

inline PairedT paired_t(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw PreconditionError("paired_t: length mismatch");
  if (a.size() < 2) throw PreconditionError("paired_t: need at least 2 pairs");
  const std::size_t n = a.size();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = a[i] - b[i];
  double sum = 0.0;
  for (double v : d) sum += v;
  const double mean = sum / n;
  double ss = 0.0;
  for (double v : d) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1));
  if (sd == 0.0) throw DegenerateError("paired_t: constant differences");
  PairedT r;
  r.delta_mean = mean;
  r.t = mean / (sd / std::sqrt(static_cast<double>(n)));
  r.p = t_tail(std::fabs(r.t), static_cast<int>(n) - 1);
  r.dz = std::fabs(mean) / sd;
  return r;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw PreconditionError("pearson: need two equal-length series of >= 2 values");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw DegenerateError("pearson: constant input, correlation undefined");
  return sxy / std::sqrt(sxx * syy);
}

struct SpearmanResult {
  double rho = 0.0;
  double p = 0.0;  // two-tailed, from t = rho * sqrt((n-2) / (1-rho^2))
};

inline SpearmanResult spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3)
    throw PreconditionError("spearman: need two equal-length series of >= 3 values");
  SpearmanResult r;
  r.rho = pearson(average_ranks(x), average_ranks(y));
  const double n = static_cast<double>(x.size());
  const double denom = 1.0 - r.rho * r.rho;
  if (denom <= 0.0) {
    r.p = 0.0;
    return r;
  }
  const double t = std::fabs(r.rho) * std::sqrt((n - 2.0) / denom);
  r.p = t_tail(t, static_cast<int>(x.size()) - 2);
  return r;
}

// ---------------------------------------------------------------------------
// Rank-averaging dilution Monte Carlo
// ---------------------------------------------------------------------------

struct DilutionResult {
  double empirical_ratio = 0.0;  // mean of rho(hybrid, oracle) / rho(informative, oracle)
  double predicted_ratio = 0.0;  // (rho_A + rho_B) / sqrt(2 + 2 rho_AB), normalized by rho_A
};

// Samples (oracle, informative, uninformative) triples with the requested
// source correlation rho_ab, forms the equal-weight percentile-rank hybrid,
// and compares the measured correlation ratio against the analytic
// prediction evaluated at the realized rank correlations.
inline DilutionResult dilution_check(double rho_ab, int n, int trials, std::uint64_t seed) {
  if (n < 100) throw PreconditionError("dilution_check: n must be >= 100");
  if (trials < 1) throw PreconditionError("dilution_check: trials must be >= 1");
  constexpr double rho_a_star = 0.6;  // informative source correlation (latent)
  // Cholesky of the latent covariance for (oracle, A, B).
  const double l21 = rho_a_star;
  const double l22 = std::sqrt(1.0 - rho_a_star * rho_a_star);
  const double l32 = rho_ab / l22;  // corr(B, oracle) is zero
  const double rest = 1.0 - l32 * l32;
  if (rest <= 0.0) throw ConfigError("dilution_check: rho_ab incompatible with source model");
  const double l33 = std::sqrt(rest);

  Rng rng(seed);
  double emp_sum = 0.0, pred_sum = 0.0;
  std::vector<double> star(n), a(n), b(n);
  for (int trial = 0; trial < trials; ++trial) {
    for (int i = 0; i < n; ++i) {
      const double z1 = rng.normal(0.0, 1.0);
      const double z2 = rng.normal(0.0, 1.0);
      const double z3 = rng.normal(0.0, 1.0);
      star[i] = z1;
      a[i] = l21 * z1 + l22 * z2;
      b[i] = l32 * z2 + l33 * z3;
    }
    const std::vector<double> ra = percentile_ranks(a);
    const std::vector<double> rb = percentile_ranks(b);
    std::vector<double> hybrid(n);
    for (int i = 0; i < n; ++i) hybrid[i] = 0.5 * (ra[i] + rb[i]);

    const double rho_h = spearman(hybrid, star).rho;
    const double rho_a = spearman(a, star).rho;
    const double rho_b = spearman(b, star).rho;
    const double rho_sources = spearman(a, b).rho;
    emp_sum += rho_h / rho_a;
    pred_sum += (rho_a + rho_b) / std::sqrt(2.0 + 2.0 * rho_sources) / rho_a;
  }
  DilutionResult out;
  out.empirical_ratio = emp_sum / trials;
  out.predicted_ratio = pred_sum / trials;
  return out;
}

// ---------------------------------------------------------------------------
// Aggregated report types
// ---------------------------------------------------------------------------

struct MethodSummary {
  std::string mode;
  int n_runs = 0;
  std::map<std::string, Summary> metrics;  // keyed by metric name
};

struct PairwiseRow {
  std::string a;
  std::string b;
  bool degenerate = false;  // constant differences; test undefined
  PairedT test;
};

struct StatsReport {
  std::vector<MethodSummary> methods;
  std::vector<PairwiseRow> pairs;  // paired t over planning ADE
};

}  // namespace gradcur
