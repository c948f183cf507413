#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "tlp/matrix.hpp"

namespace tlp {

// Unordered node pairs i < j, self-pairs excluded.
struct PairUniverse {
  int n = 0;

  std::int64_t count() const { return std::int64_t(n) * (n - 1) / 2; }
  bool contains(int i, int j) const { return i >= 0 && j >= 0 && i != j && i < n && j < n; }
};

struct ConfusionCounts {
  std::int64_t tp = 0, tn = 0, fp = 0, fn = 0;

  std::int64_t total() const { return tp + tn + fp + fn; }
};

struct ScoredPair {
  std::pair<int, int> pair{0, 0};
  double score = 0.0;
  int label = 0;  // 1 positive, 0 negative
};

using EdgeSet = std::vector<std::pair<int, int>>;

// Four-case counts over the whole universe.
ConfusionCounts confusion(const EdgeSet& truth, const EdgeSet& predicted,
                          const PairUniverse& universe);

double accuracy(const ConfusionCounts& c);
// Throws UndefinedMetricError when tp+fp == 0 or tp+fn == 0.
double f1(const ConfusionCounts& c);

// Tie-aware rank statistic: P(score+ > score-) + P(tie)/2. Equals the
// brute-force all-pairs comparison exactly.
double roc_auc(const std::vector<ScoredPair>& sp);
double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels);

// Matrix error metrics with the N^2 normalization.
double rmse(const DenseMat& a, const DenseMat& b);
double mae(const DenseMat& a, const DenseMat& b);
// mean |log10| ratio of eps-clipped entries; eps defaults to 1e-5
double mlsd(const DenseMat& a, const DenseMat& b, double eps = 1e-5);
// fraction of entries where exactly one side is zero
double mismatch_rate(const DenseMat& a, const DenseMat& b);

// Deterministic positive/negative pair sample at the given positives:negatives
// ratio; scores left at zero for the caller to fill.
std::vector<ScoredPair> sample_pairs(const PairUniverse& universe, const EdgeSet& truth,
                                     double ratio, std::int64_t count, std::uint64_t seed);

}  // namespace tlp
