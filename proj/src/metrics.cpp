#include "tlp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "tlp/error.hpp"
#include "tlp/rng.hpp"

namespace tlp {

namespace {

std::set<std::pair<int, int>> canonical_set(const EdgeSet& edges, const PairUniverse& u,
                                            const char* what) {
  std::set<std::pair<int, int>> s;
  for (auto [i, j] : edges) {
    if (!u.contains(i, j))
      throw ValidationError(std::string(what) + ": pair (" + std::to_string(i) + "," +
                            std::to_string(j) + ") outside the universe");
    if (i > j) std::swap(i, j);
    s.insert({i, j});
  }
  return s;
}

void check_shapes(const DenseMat& a, const DenseMat& b, const char* what) {
  if (!a.same_shape(b)) throw ValidationError(std::string(what) + ": shape mismatch");
}

}  // namespace

ConfusionCounts confusion(const EdgeSet& truth, const EdgeSet& predicted,
                          const PairUniverse& universe) {
  const auto t = canonical_set(truth, universe, "confusion truth");
  const auto p = canonical_set(predicted, universe, "confusion predicted");
  ConfusionCounts c;
  for (const auto& e : p)
    t.count(e) ? ++c.tp : ++c.fp;
  for (const auto& e : t)
    if (!p.count(e)) ++c.fn;
  c.tn = universe.count() - c.tp - c.fp - c.fn;
  return c;
}

double accuracy(const ConfusionCounts& c) {
  if (c.total() == 0) throw UndefinedMetricError("accuracy: empty universe");
  return double(c.tp + c.tn) / double(c.total());
}

double f1(const ConfusionCounts& c) {
  if (c.tp + c.fp == 0) throw UndefinedMetricError("f1: no predicted positives");
  if (c.tp + c.fn == 0) throw UndefinedMetricError("f1: no actual positives");
  return double(2 * c.tp) / double(2 * c.tp + c.fp + c.fn);
}

double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size())
    throw ValidationError("roc_auc: scores/labels length mismatch");
  for (double s : scores)
    if (!std::isfinite(s)) throw ValidationError("roc_auc: non-finite score");
  std::int64_t npos = 0, nneg = 0;
  for (int y : labels) (y ? npos : nneg) += 1;
  if (npos == 0 || nneg == 0)
    throw UndefinedMetricError("roc_auc: both classes must be present");

  std::vector<std::size_t> idx(scores.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // average ranks over tie groups; ranks are 1-based
  double pos_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && scores[idx[j + 1]] == scores[idx[i]]) ++j;
    const double avg_rank = 0.5 * (double(i + 1) + double(j + 1));
    for (std::size_t k = i; k <= j; ++k)
      if (labels[idx[k]]) pos_rank_sum += avg_rank;
    i = j + 1;
  }
  const double favorable = pos_rank_sum - 0.5 * double(npos) * double(npos + 1);
  return favorable / (double(npos) * double(nneg));
}

double roc_auc(const std::vector<ScoredPair>& sp) {
  std::vector<double> scores;
  std::vector<int> labels;
  scores.reserve(sp.size());
  labels.reserve(sp.size());
  for (const auto& s : sp) {
    scores.push_back(s.score);
    labels.push_back(s.label);
  }
  return roc_auc(scores, labels);
}

double rmse(const DenseMat& a, const DenseMat& b) {
  check_shapes(a, b, "rmse");
  return std::sqrt(frob_sq(sub(a, b)) / double(a.size()));
}

double mae(const DenseMat& a, const DenseMat& b) {
  check_shapes(a, b, "mae");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::fabs(a.data()[i] - b.data()[i]);
  return s / double(a.size());
}

double mlsd(const DenseMat& a, const DenseMat& b, double eps) {
  check_shapes(a, b, "mlsd");
  if (!(eps > 0.0)) throw ValidationError("mlsd: eps must be > 0");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double u = std::max(a.data()[i], eps);
    const double v = std::max(b.data()[i], eps);
    s += std::fabs(std::log10(u / v));
  }
  return s / double(a.size());
}

double mismatch_rate(const DenseMat& a, const DenseMat& b) {
  check_shapes(a, b, "mismatch_rate");
  std::int64_t c = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool za = a.data()[i] == 0.0, zb = b.data()[i] == 0.0;
    if (za != zb) ++c;
  }
  return double(c) / double(a.size());
}

std::vector<ScoredPair> sample_pairs(const PairUniverse& universe, const EdgeSet& truth,
                                     double ratio, std::int64_t count, std::uint64_t seed) {
  if (!(ratio > 0.0)) throw ValidationError("sample_pairs: ratio must be > 0");
  if (count < 1) throw ValidationError("sample_pairs: count must be >= 1");
  if (count > universe.count())
    throw ValidationError("sample_pairs: count exceeds the pair universe");
  const auto pos_set = canonical_set(truth, universe, "sample_pairs truth");

  const std::int64_t n_pos = std::llround(double(count) * ratio / (1.0 + ratio));
  const std::int64_t n_neg = count - n_pos;
  if (n_pos > std::int64_t(pos_set.size()))
    throw ValidationError("sample_pairs: not enough positive pairs for the requested ratio");
  const std::int64_t neg_avail = universe.count() - std::int64_t(pos_set.size());
  if (n_neg > neg_avail)
    throw ValidationError("sample_pairs: not enough negative pairs for the requested ratio");

  SplitMix64 rng(mix_seed(seed, 0x9a));
  std::vector<std::pair<int, int>> pos(pos_set.begin(), pos_set.end());
  for (std::size_t i = pos.size(); i > 1; --i) std::swap(pos[i - 1], pos[rng.below(i)]);

  std::vector<ScoredPair> out;
  out.reserve(std::size_t(count));
  for (std::int64_t k = 0; k < n_pos; ++k) out.push_back({pos[std::size_t(k)], 0.0, 1});

  std::set<std::pair<int, int>> chosen;
  while (std::int64_t(chosen.size()) < n_neg) {
    int i = int(rng.below(std::uint64_t(universe.n)));
    int j = int(rng.below(std::uint64_t(universe.n)));
    if (i == j) continue;
    if (i > j) std::swap(i, j);
    if (pos_set.count({i, j}) || chosen.count({i, j})) continue;
    chosen.insert({i, j});
  }
  for (const auto& e : chosen) out.push_back({e, 0.0, 0});
  return out;
}

}  // namespace tlp
