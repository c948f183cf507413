#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "tlp/error.hpp"
#include "tlp/metrics.hpp"
#include "tlp/rng.hpp"

using namespace tlp;

namespace {

// brute-force all-pairs comparison, the AUC oracle
double auc_brute(const std::vector<double>& s, const std::vector<int>& y) {
  double fav = 0.0;
  std::int64_t np = 0, nn = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!y[i]) continue;
    ++np;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j]) continue;
      if (s[i] > s[j]) fav += 1.0;
      else if (s[i] == s[j]) fav += 0.5;
    }
  }
  for (int v : y) nn += v ? 0 : 1;
  return fav / (double(np) * double(nn));
}

DenseMat mat1x1(double v) {
  DenseMat m(1, 1);
  m(0, 0) = v;
  return m;
}

}  // namespace

TEST_CASE("confusion on the 3-node example") {
  PairUniverse u{3};
  const ConfusionCounts c = confusion({{1, 2}}, {{1, 2}, {0, 2}}, u);
  // universe pairs: (0,1),(0,2),(1,2) with truth {(1,2)} and predicted {(1,2),(0,2)}
  CHECK(c.tp == 1);
  CHECK(c.fp == 1);
  CHECK(c.fn == 0);
  CHECK(c.tn == 1);
  CHECK(accuracy(c) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("perfect prediction") {
  PairUniverse u{4};
  const ConfusionCounts c = confusion({{0, 1}, {2, 3}}, {{0, 1}, {2, 3}}, u);
  CHECK(c.fp == 0);
  CHECK(c.fn == 0);
  CHECK(accuracy(c) == 1.0);
  CHECK(f1(c) == 1.0);
}

TEST_CASE("vacuous positives make F1 undefined") {
  PairUniverse u{3};
  const ConfusionCounts c = confusion({}, {}, u);
  CHECK(accuracy(c) == 1.0);
  CHECK_THROWS_AS(f1(c), UndefinedMetricError);
}

TEST_CASE("pair outside the universe is rejected") {
  PairUniverse u{3};
  CHECK_THROWS_AS(confusion({{0, 3}}, {}, u), ValidationError);
  CHECK_THROWS_AS(confusion({{1, 1}}, {}, u), ValidationError);
}

TEST_CASE("f1 from the worked example") {
  ConfusionCounts c{1, 0, 1, 0};  // tp=1, tn=0, fp=1, fn=0
  CHECK(f1(c) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("f1 is zero when no true positives but both denominators positive") {
  ConfusionCounts c{0, 5, 2, 3};
  CHECK(f1(c) == 0.0);
}

TEST_CASE("auc perfect ranking") {
  CHECK(roc_auc({1.0, 0.9, 0.2, 0.1}, {1, 1, 0, 0}) == 1.0);
}

TEST_CASE("auc all ties") {
  CHECK(roc_auc({0.5, 0.5, 0.5, 0.5}, {1, 0, 1, 0}) == 0.5);
}

TEST_CASE("auc against the brute-force oracle on small cases") {
  // positives 0.9 and 0.4 vs a negative at 0.6: one win of two comparisons
  const std::vector<double> s{0.9, 0.4, 0.6};
  const std::vector<int> y{1, 1, 0};
  CHECK(auc_brute(s, y) == 0.5);
  CHECK(roc_auc(s, y) == 0.5);
  // a tie contributes half: positives 0.9, 0.4 vs a negative at 0.4
  const std::vector<double> s2{0.9, 0.4, 0.4};
  CHECK(auc_brute(s2, y) == 0.75);
  CHECK(roc_auc(s2, y) == 0.75);
}

TEST_CASE("auc equals brute force exactly on random score sets") {
  SplitMix64 rng(2024);
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 2 + int(rng.below(40));
    std::vector<double> s(n);
    std::vector<int> y(n);
    bool pos = false, neg = false;
    for (int i = 0; i < n; ++i) {
      s[i] = double(rng.below(8)) / 4.0;  // coarse grid forces ties
      y[i] = rng.bernoulli(0.5) ? 1 : 0;
      (y[i] ? pos : neg) = true;
    }
    if (!pos || !neg) continue;
    CHECK(roc_auc(s, y) == auc_brute(s, y));
  }
}

TEST_CASE("auc rejects single-class input") {
  CHECK_THROWS_AS(roc_auc({0.1, 0.2}, {1, 1}), UndefinedMetricError);
}

TEST_CASE("auc complement under score negation for tie-free input") {
  SplitMix64 rng(7);
  std::vector<double> s(20);
  std::vector<int> y(20);
  std::set<double> seen;
  for (int i = 0; i < 20; ++i) {
    double v;
    do { v = rng.uniform(); } while (seen.count(v));
    seen.insert(v);
    s[i] = v;
    y[i] = i % 2;
  }
  std::vector<double> neg(s);
  for (auto& v : neg) v = -v;
  CHECK(roc_auc(s, y) + roc_auc(neg, y) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("auc is invariant under strictly monotone transforms") {
  SplitMix64 rng(9);
  std::vector<double> s(30);
  std::vector<int> y(30);
  for (int i = 0; i < 30; ++i) {
    s[i] = double(rng.below(10)) / 5.0;
    y[i] = i < 15 ? 1 : 0;
  }
  const double base = roc_auc(s, y);
  std::vector<double> ex(s), af(s);
  for (auto& v : ex) v = std::exp(v);
  for (auto& v : af) v = 3.0 * v + 11.0;
  CHECK(roc_auc(ex, y) == base);
  CHECK(roc_auc(af, y) == base);
}

TEST_CASE("rmse and mae basics") {
  CHECK(rmse(mat1x1(3.0), mat1x1(3.0)) == 0.0);
  CHECK(mae(mat1x1(3.0), mat1x1(3.0)) == 0.0);
  CHECK(rmse(mat1x1(1990.0), mat1x1(2000.0)) == 10.0);
  CHECK(mae(mat1x1(1990.0), mat1x1(2000.0)) == 10.0);
  CHECK(rmse(mat1x1(1.0), mat1x1(2.0)) == 1.0);
  CHECK(mae(mat1x1(1.0), mat1x1(2.0)) == 1.0);
  CHECK_THROWS_AS(rmse(DenseMat(2, 2), DenseMat(3, 3)), ValidationError);
}

TEST_CASE("mlsd reverses the wide-value-range ordering") {
  const double small_pair = mlsd(mat1x1(1.0), mat1x1(2.0));
  const double large_pair = mlsd(mat1x1(1990.0), mat1x1(2000.0));
  CHECK(small_pair == doctest::Approx(0.30103).epsilon(1e-4));
  CHECK(large_pair == doctest::Approx(0.0021770).epsilon(1e-3));
  CHECK(small_pair > large_pair);
  // while absolute-error metrics order the other way round
  CHECK(mae(mat1x1(1.0), mat1x1(2.0)) < mae(mat1x1(1990.0), mat1x1(2000.0)));
  CHECK(mlsd(mat1x1(5.0), mat1x1(5.0)) == 0.0);
  CHECK_THROWS_AS(mlsd(mat1x1(1.0), mat1x1(1.0), 0.0), ValidationError);
}

TEST_CASE("mlsd symmetry and rmse/mae symmetry") {
  SplitMix64 rng(12);
  DenseMat a(4, 4), b(4, 4);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a.data()[i] = rng.uniform(0.0, 5.0);
    b.data()[i] = rng.uniform(0.0, 5.0);
  }
  CHECK(mlsd(a, b) == doctest::Approx(mlsd(b, a)).epsilon(1e-15));
  CHECK(rmse(a, b) == doctest::Approx(rmse(b, a)).epsilon(1e-15));
  CHECK(mae(a, b) == doctest::Approx(mae(b, a)).epsilon(1e-15));
}

TEST_CASE("mismatch rate counts one-sided zeros") {
  DenseMat a(10, 10), b(10, 10);
  a(0, 1) = 1;
  a(1, 0) = 1;
  a(3, 4) = 2;
  a(4, 3) = 2;
  CHECK(mismatch_rate(a, b) == doctest::Approx(0.04));
  CHECK(mismatch_rate(a, a) == 0.0);
  DenseMat z(2, 2), ones(2, 2, 1.0);
  CHECK(mismatch_rate(z, ones) == 1.0);
}

TEST_CASE("mismatch rate is zero iff supports match") {
  SplitMix64 rng(5);
  for (int rep = 0; rep < 50; ++rep) {
    DenseMat a(5, 5), b(5, 5);
    for (std::size_t i = 0; i < a.size(); ++i) {
      a.data()[i] = rng.bernoulli(0.4) ? rng.uniform(0.1, 2.0) : 0.0;
      b.data()[i] = rng.bernoulli(0.4) ? rng.uniform(0.1, 2.0) : 0.0;
    }
    const double mr = mismatch_rate(a, b);
    CHECK(mr >= 0.0);
    CHECK(mr <= 1.0);
    bool same_support = true;
    for (std::size_t i = 0; i < a.size(); ++i)
      same_support = same_support && ((a.data()[i] == 0.0) == (b.data()[i] == 0.0));
    CHECK((mr == 0.0) == same_support);
  }
}

TEST_CASE("accuracy equals a direct recount on random instances") {
  SplitMix64 rng(77);
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 3 + int(rng.below(8));
    PairUniverse u{n};
    EdgeSet truth, pred;
    std::set<std::pair<int, int>> tset, pset;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        if (rng.bernoulli(0.3)) {
          truth.push_back({i, j});
          tset.insert({i, j});
        }
        if (rng.bernoulli(0.3)) {
          pred.push_back({i, j});
          pset.insert({i, j});
        }
      }
    const ConfusionCounts c = confusion(truth, pred, u);
    std::int64_t agree = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (tset.count({i, j}) == pset.count({i, j})) ++agree;
    CHECK(accuracy(c) == double(agree) / double(u.count()));
  }
}

TEST_CASE("sample_pairs hits the requested ratio deterministically") {
  PairUniverse u{6};  // 15 pairs
  EdgeSet truth{{0, 1}, {0, 2}, {1, 2}, {3, 4}, {4, 5}};
  const auto sp = sample_pairs(u, truth, 1.0, 10, 99);
  int pos = 0, neg = 0;
  for (const auto& p : sp) (p.label ? pos : neg) += 1;
  CHECK(pos == 5);
  CHECK(neg == 5);
  const auto sp2 = sample_pairs(u, truth, 1.0, 10, 99);
  REQUIRE(sp.size() == sp2.size());
  for (std::size_t i = 0; i < sp.size(); ++i) {
    CHECK(sp[i].pair == sp2[i].pair);
    CHECK(sp[i].label == sp2[i].label);
  }
}

TEST_CASE("sample_pairs validates feasibility") {
  PairUniverse u{4};  // 6 pairs
  EdgeSet truth{{0, 1}};
  CHECK_THROWS_AS(sample_pairs(u, truth, 1.0, 7, 1), ValidationError);   // count > universe
  CHECK_THROWS_AS(sample_pairs(u, truth, 1.0, 6, 1), ValidationError);   // needs 3 positives
}
