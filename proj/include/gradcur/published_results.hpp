#pragma once

#include <array>
#include <cstdint>

// Published multi-seed planning results from the full-scale experiments
// (GameFormer on nuPlan mini) that the statistics suite reproduces. The
// verify-paper command recomputes every derived cell below from the per-seed
// values; rows whose published p / dz do not follow from the per-seed table
// under the paired formula are marked non-recomputable and reported as
// source-internal inconsistencies rather than checked.

namespace gradcur::published {

inline constexpr std::array<std::uint64_t, 3> kSeeds{3407, 42, 2024};

enum MethodIndex { kBaseline = 0, kMeta = 1, kTracin = 2, kLossSpl = 3, kHybrid = 4 };

inline constexpr const char* kMethodNames[5] = {"baseline", "meta", "tracin", "loss_spl",
                                                "hybrid"};

// Per-seed planning ADE in meters, seed order {3407, 42, 2024}.
inline constexpr double kPerSeedPlanAde[5][3] = {
    {1.917, 1.593, 1.807},  // baseline (uniform training)
    {1.832, 1.803, 1.831},  // metadata curriculum
    {1.687, 1.680, 1.746},  // tracin curriculum
    {1.728, 1.726, 2.555},  // loss-based self-paced
    {1.772, 1.848, 1.680},  // hybrid curriculum
};

// Published summary cells: mean, population std, coefficient of variation.
inline constexpr double kSummaryMean[5] = {1.772, 1.822, 1.704, 2.003, 1.766};
inline constexpr double kSummaryStd[5] = {0.134, 0.014, 0.029, 0.391, 0.069};
inline constexpr double kSummaryCvPercent[5] = {7.6, 0.7, 1.7, 19.5, 3.9};

// Published pairwise paired-t rows over planning ADE. `recomputable` marks
// the rows whose p and dz follow from the per-seed values; the others are
// internally inconsistent in the source (their published dz values do not
// match any standard paired formula) and are only reported.
struct PublishedPair {
  MethodIndex a;
  MethodIndex b;
  double delta;  // mean(a) - mean(b)
  double p;
  double dz;
  bool recomputable;
};

inline constexpr PublishedPair kPairs[6] = {
    {kTracin, kMeta, -0.117, 0.021, 3.88, true},
    {kTracin, kBaseline, -0.068, 0.540, 0.63, false},
    {kTracin, kLossSpl, -0.299, 0.296, 1.20, false},
    {kTracin, kHybrid, -0.062, 0.186, 1.71, false},
    {kHybrid, kMeta, -0.056, 0.291, 1.23, false},
    {kMeta, kBaseline, 0.050, 0.622, 0.33, true},
};

// Score-correlation study: reported rank correlation between the tracin and
// metadata scores over the 5148 training scenarios.
inline constexpr double kTracinMetaRho = -0.014;
inline constexpr double kTracinMetaP = 0.31;
inline constexpr int kScoreCorrelationN = 5148;

// Hybrid-to-constituent rank correlations reported for the same study.
inline constexpr double kHybridTracinRho = 0.695;
inline constexpr double kHybridMetaRho = 0.689;

}  // namespace gradcur::published
