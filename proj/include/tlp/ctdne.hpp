#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tlp/graph.hpp"
#include "tlp/matrix.hpp"
#include "tlp/similarity.hpp"
#include "tlp/trw.hpp"

namespace tlp {

// N x d lookup table, row i = embedding of node i.
struct EmbeddingTable {
  DenseMat Z;

  int n() const { return Z.rows(); }
  int dim() const { return Z.cols(); }
};

struct SgnsConfig {
  int context_window = 3;
  int negatives = 3;       // per positive pair
  double learning_rate = 0.025;
  int epochs = 3;
  std::uint64_t seed = 0;
};

// Skip-gram with negative sampling over within-window co-occurrences of the
// walks. Deterministic given the seed; per-epoch mean loss (measured before
// each update) lands in *epoch_loss when given.
EmbeddingTable train_ctdne(const std::vector<TemporalWalk>& walks, int n_nodes, int d,
                           const SgnsConfig& cfg, std::vector<double>* epoch_loss = nullptr);

// Uniform [-0.5/d, 0.5/d) init, the state train_ctdne starts from.
EmbeddingTable init_embeddings(int n_nodes, int d, std::uint64_t seed);

// One (center, context, negatives...) training example.
struct SgnsExample {
  int center = 0;
  int context = 0;
  std::vector<int> negatives;
};

// Full-batch objective and one plain gradient step on it; exposed so descent
// can be checked on a frozen batch.
double sgns_batch_loss(const EmbeddingTable& emb, const std::vector<SgnsExample>& batch);
void sgns_batch_step(EmbeddingTable& emb, const std::vector<SgnsExample>& batch, double lr);

enum class EdgeEmbedStrategy { Concat, Average, Hadamard, WeightedL1, WeightedL2 };

EdgeEmbedStrategy edge_embed_strategy_from_string(const std::string& s);

// Table-driven combination of two node embeddings; concat yields 2d entries,
// the rest d.
std::vector<double> edge_embed(const EmbeddingTable& emb, int i, int j, EdgeEmbedStrategy strategy);

// Logistic regression decoder trained by per-sample gradient descent with L2
// regularization. Weights start at zero, so an untrained model answers 0.5.
struct LinkClassifier {
  std::vector<double> w;
  double b = 0.0;

  double predict_proba(const std::vector<double>& features) const;
};

LinkClassifier train_link_classifier(const std::vector<std::vector<double>>& features,
                                     const std::vector<int>& labels, double l2, int epochs,
                                     double lr, std::uint64_t seed);

struct CtdnePipelineConfig {
  WalkConfig walk;
  SgnsConfig sgns;
  int d = 32;
  EdgeEmbedStrategy strategy = EdgeEmbedStrategy::Hadamard;
  double classifier_l2 = 1e-4;
  int classifier_epochs = 60;
  double classifier_lr = 0.1;
  std::uint64_t seed = 0;
  bool shuffle_labels = false;  // control run: destroys the training signal
};

// End to end: walks -> embeddings -> edge features -> logistic decoder ->
// probability per candidate pair. Training positives are the distinct pairs of
// the history; negatives are non-edge pairs sampled 1:1.
std::vector<double> ctdne_scores(const EventStream& history,
                                 const std::vector<std::pair<int, int>>& candidates,
                                 const CtdnePipelineConfig& cfg);

// Same scores arranged into a symmetric matrix (zero for non-candidates).
ScoreMatrix ctdne_predict(const EventStream& history,
                          const std::vector<std::pair<int, int>>& candidates,
                          const CtdnePipelineConfig& cfg);

// CSV export `node_label,d0,...,d{k-1}`.
void write_embeddings_csv(const EmbeddingTable& emb, const NodeTable& nodes,
                          const std::string& path);

}  // namespace tlp
