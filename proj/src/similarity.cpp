#include "tlp/similarity.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <deque>

#include "tlp/error.hpp"
#include "tlp/rng.hpp"

namespace tlp {

SimilarityMeasure SimilarityMeasure::from_string(const std::string& name) {
  SimilarityMeasure m;
  if (name == "sp") m.kind = Kind::ShortestPath;
  else if (name == "cn") m.kind = Kind::CommonNeighbor;
  else if (name == "jaccard") m.kind = Kind::Jaccard;
  else if (name == "aa") m.kind = Kind::AdamicAdar;
  else if (name == "pa") m.kind = Kind::PreferentialAttachment;
  else if (name == "katz") m.kind = Kind::Katz;
  else throw ValidationError("unknown similarity measure '" + name + "'");
  return m;
}

namespace {

// walk the two sorted neighbor lists once
template <class F>
void for_common(std::span<const int> a, std::span<const int> b, F&& f) {
  std::size_t x = 0, y = 0;
  while (x < a.size() && y < b.size()) {
    if (a[x] < b[y]) ++x;
    else if (a[x] > b[y]) ++y;
    else { f(a[x]); ++x; ++y; }
  }
}

double pair_score(const Snapshot& g, SimilarityMeasure::Kind kind, int i, int j) {
  auto ni = g.neighbors(i);
  auto nj = g.neighbors(j);
  switch (kind) {
    case SimilarityMeasure::Kind::CommonNeighbor: {
      int c = 0;
      for_common(ni, nj, [&](int) { ++c; });
      return double(c);
    }
    case SimilarityMeasure::Kind::Jaccard: {
      int c = 0;
      for_common(ni, nj, [&](int) { ++c; });
      const int u = int(ni.size() + nj.size()) - c;
      return u == 0 ? 0.0 : double(c) / double(u);
    }
    case SimilarityMeasure::Kind::AdamicAdar: {
      double s = 0.0;
      // a common neighbor of two distinct nodes has degree >= 2, so ln > 0
      for_common(ni, nj, [&](int k) { s += 1.0 / std::log(double(g.degree(k))); });
      return s;
    }
    case SimilarityMeasure::Kind::PreferentialAttachment:
      return double(ni.size()) * double(nj.size());
    default:
      return 0.0;
  }
}

void bfs_neg_row(const Snapshot& g, int src, double* row) {
  const int n = g.n();
  std::vector<int> dist(n, -1);
  std::deque<int> q;
  dist[src] = 0;
  q.push_back(src);
  while (!q.empty()) {
    const int v = q.front();
    q.pop_front();
    for (int w : g.neighbors(v)) {
      if (dist[w] < 0) {
        dist[w] = dist[v] + 1;
        q.push_back(w);
      }
    }
  }
  for (int j = 0; j < n; ++j) row[j] = dist[j] < 0 ? -double(n) : -double(dist[j]);
}

ScoreMatrix pairwise_scores(const Snapshot& g, SimilarityMeasure::Kind kind, bool parallel) {
  const int n = g.n();
  ScoreMatrix s(n, n);
#pragma omp parallel for schedule(dynamic, 8) if (parallel)
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double v = pair_score(g, kind, i, j);
      s(i, j) = v;
      s(j, i) = v;
    }
  }
  return s;
}

ScoreMatrix hop_scores(const Snapshot& g, bool parallel) {
  const int n = g.n();
  ScoreMatrix s(n, n);
#pragma omp parallel for schedule(dynamic, 4) if (parallel)
  for (int i = 0; i < n; ++i) bfs_neg_row(g, i, s.data() + std::size_t(i) * n);
  // keep the matrix exactly symmetric; BFS already is, diagonal is 0
  return s;
}

}  // namespace

DenseMat negated_hop_distances(const Snapshot& g) { return hop_scores(g, true); }
DenseMat negated_hop_distances_serial(const Snapshot& g) { return hop_scores(g, false); }

double spectral_radius_estimate(const DenseMat& a, int iters) {
  const int n = a.rows();
  if (n == 0) return 0.0;
  SplitMix64 rng(0x9dc1u);
  std::vector<double> v(n), w(n);
  for (int i = 0; i < n; ++i) v[i] = rng.uniform(0.5, 1.0);
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    double norm = 0.0;
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += a(i, j) * v[j];
      w[i] = s;
      norm += s * s;
    }
    norm = std::sqrt(norm);
    if (norm == 0.0) return 0.0;
    lambda = norm;
    for (int i = 0; i < n; ++i) v[i] = w[i] / norm;
  }
  return lambda;
}

ScoreMatrix katz_index(const Snapshot& g, double theta, int truncation) {
  const int n = g.n();
  const DenseMat a = g.to_dense();
  if (truncation > 0) {
    // partial sum of theta^k A^k up to K terms
    ScoreMatrix acc(n, n);
    DenseMat term = DenseMat::identity(n);
    for (int k = 1; k <= truncation; ++k) {
      term = matmul(term, a);
      add_scaled(acc, term, std::pow(theta, k));
    }
    return acc;
  }
  const double rho = spectral_radius_estimate(a);
  if (theta * rho >= 1.0 - 1e-6)
    throw DivergenceError("katz: series diverges, theta*rho = " +
                          std::to_string(theta * rho) + " with estimated spectral radius " +
                          std::to_string(rho));
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) -= theta * a(i, j);
  Eigen::MatrixXd x = m.partialPivLu().solve(Eigen::MatrixXd::Identity(n, n));
  ScoreMatrix s(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s(i, j) = x(i, j) - (i == j ? 1.0 : 0.0);
  return s;
}

namespace {

ScoreMatrix similarity_impl(const Snapshot& g, const SimilarityMeasure& m, bool parallel) {
  switch (m.kind) {
    case SimilarityMeasure::Kind::ShortestPath:
      return hop_scores(g, parallel);
    case SimilarityMeasure::Kind::Katz:
      return katz_index(g, m.katz_theta, m.katz_truncation);
    default:
      return pairwise_scores(g, m.kind, parallel);
  }
}

}  // namespace

ScoreMatrix neighbor_similarity(const Snapshot& g, const SimilarityMeasure& m) {
  return similarity_impl(g, m, true);
}

ScoreMatrix neighbor_similarity_serial(const Snapshot& g, const SimilarityMeasure& m) {
  return similarity_impl(g, m, false);
}

}  // namespace tlp
