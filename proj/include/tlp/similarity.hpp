#pragma once

#include "tlp/graph.hpp"
#include "tlp/matrix.hpp"

namespace tlp {

// Symmetric matrix of predicted link scores for one future step. Diagonal is
// ignored by consumers.
using ScoreMatrix = DenseMat;

struct SimilarityMeasure {
  enum class Kind {
    ShortestPath,
    CommonNeighbor,
    Jaccard,
    AdamicAdar,
    PreferentialAttachment,
    Katz,
  };

  Kind kind = Kind::CommonNeighbor;
  double katz_theta = 0.1;
  // number of walk terms; <= 0 selects the exact closed form
  int katz_truncation = 10;

  static SimilarityMeasure from_string(const std::string& name);
};

// Set-based measures see the snapshot's unweighted neighbor structure (any
// positive weight counts as presence); Katz consumes the weights directly.
// Shortest-path scores are -(path length), with -n for disconnected pairs so
// downstream rankings stay finite.
ScoreMatrix neighbor_similarity(const Snapshot& g, const SimilarityMeasure& m);
ScoreMatrix neighbor_similarity_serial(const Snapshot& g, const SimilarityMeasure& m);

// truncation <= 0: exact (I - theta*A)^{-1} - I, admissible only while
// theta * rho(A) stays below 1; otherwise the theta^k A^k partial sum.
ScoreMatrix katz_index(const Snapshot& g, double theta, int truncation);

// Largest-magnitude eigenvalue estimate by power iteration.
double spectral_radius_estimate(const DenseMat& a, int iters = 200);

// -distance rows for every source (BFS on presence); unreachable -> -n.
DenseMat negated_hop_distances(const Snapshot& g);
DenseMat negated_hop_distances_serial(const Snapshot& g);

}  // namespace tlp
