#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "gradcur/errors.hpp"

namespace gradcur {

// Average (fractional) ranks, 1-based: tied values share the mean of the
// ranks their block occupies.
inline std::vector<double> average_ranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    // Block spans ranks i+1 .. j+1; every member gets the mean.
    const double mean_rank = 0.5 * static_cast<double>(i + 1 + j + 1);
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mean_rank;
    i = j + 1;
  }
  return ranks;
}

// Percentile ranks in [0, 1]: (rank - 1) / (n - 1) with average ranks on
// ties; a single element maps to 0.5.
inline std::vector<double> percentile_ranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  if (n == 0) return {};
  if (n == 1) return {0.5};
  std::vector<double> pct = average_ranks(values);
  const double denom = static_cast<double>(n - 1);
  for (double& p : pct) p = (p - 1.0) / denom;
  return pct;
}

// Min-max normalization to [0, 1]; a constant vector maps to all 0.5 so the
// downstream composite mean stays unbiased.
inline std::vector<double> minmax_normalize(const std::vector<double>& values) {
  if (values.empty()) return {};
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it, hi = *hi_it;
  std::vector<double> out(values.size());
  if (hi == lo) {
    std::fill(out.begin(), out.end(), 0.5);
    return out;
  }
  const double span = hi - lo;
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - lo) / span;
  return out;
}

// ceil(x) that tolerates binary-fraction round-up: ceil_fraction(0.1 * 100)
// is 10, not 11.
inline long long ceil_fraction(double x) {
  return static_cast<long long>(std::ceil(x - 1e-9));
}

}  // namespace gradcur
