#include "tlp/ctdne.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "tlp/error.hpp"
#include "tlp/io.hpp"
#include "tlp/rng.hpp"

namespace tlp {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double row_dot(const DenseMat& z, int a, int b) {
  double s = 0.0;
  for (int k = 0; k < z.cols(); ++k) s += z(a, k) * z(b, k);
  return s;
}

template <class T>
void seeded_shuffle(std::vector<T>& v, SplitMix64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

}  // namespace

EmbeddingTable init_embeddings(int n_nodes, int d, std::uint64_t seed) {
  if (d < 1) throw ValidationError("embedding dimension must be >= 1");
  SplitMix64 rng(mix_seed(seed, 0xe3));
  EmbeddingTable emb{DenseMat(n_nodes, d)};
  const double half = 0.5 / double(d);
  for (std::size_t i = 0; i < emb.Z.size(); ++i) emb.Z.data()[i] = rng.uniform(-half, half);
  return emb;
}

EmbeddingTable train_ctdne(const std::vector<TemporalWalk>& walks, int n_nodes, int d,
                           const SgnsConfig& cfg, std::vector<double>* epoch_loss) {
  if (walks.empty()) throw ValidationError("train_ctdne: no walks");
  if (d < 1) throw ValidationError("train_ctdne: d must be >= 1");
  if (cfg.context_window < 1 || cfg.negatives < 1 || !(cfg.learning_rate > 0.0) ||
      cfg.epochs < 0)
    throw ValidationError("train_ctdne: bad sgns configuration");

  EmbeddingTable emb = init_embeddings(n_nodes, d, cfg.seed);
  if (epoch_loss) epoch_loss->clear();

  // skip-gram pairs: centers against contexts within the window
  std::vector<std::pair<int, int>> pairs;
  for (const auto& w : walks) {
    const int len = int(w.nodes.size());
    for (int p = 0; p < len; ++p) {
      const int lo = std::max(0, p - cfg.context_window);
      const int hi = std::min(len - 1, p + cfg.context_window);
      for (int q = lo; q <= hi; ++q)
        if (q != p) pairs.emplace_back(w.nodes[p], w.nodes[q]);
    }
  }
  if (pairs.empty()) throw ValidationError("train_ctdne: walks yield no training pairs");

  DenseMat& z = emb.Z;
  SplitMix64 rng(mix_seed(cfg.seed, 0x5c));
  std::vector<double> gc(d), gx(d);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    seeded_shuffle(pairs, rng);
    double loss_sum = 0.0;
    for (const auto& [ci, xj] : pairs) {
      // positive pair
      {
        const double s = sigmoid(row_dot(z, ci, xj));
        loss_sum += -std::log(std::max(s, 1e-12));
        const double g = cfg.learning_rate * (1.0 - s);
        for (int k = 0; k < d; ++k) {
          gc[k] = g * z(xj, k);
          gx[k] = g * z(ci, k);
        }
        for (int k = 0; k < d; ++k) {
          z(ci, k) += gc[k];
          z(xj, k) += gx[k];
        }
      }
      // negatives, uniform over all nodes
      for (int t = 0; t < cfg.negatives; ++t) {
        const int nk = int(rng.below(std::uint64_t(n_nodes)));
        const double s = sigmoid(row_dot(z, ci, nk));
        loss_sum += -std::log(std::max(1.0 - s, 1e-12));
        const double g = cfg.learning_rate * s;
        for (int k = 0; k < d; ++k) {
          gc[k] = g * z(nk, k);
          gx[k] = g * z(ci, k);
        }
        for (int k = 0; k < d; ++k) {
          z(ci, k) -= gc[k];
          z(nk, k) -= gx[k];
        }
      }
    }
    if (epoch_loss) epoch_loss->push_back(loss_sum / double(pairs.size()));
  }
  return emb;
}

double sgns_batch_loss(const EmbeddingTable& emb, const std::vector<SgnsExample>& batch) {
  double loss = 0.0;
  for (const auto& ex : batch) {
    loss += -std::log(std::max(sigmoid(row_dot(emb.Z, ex.center, ex.context)), 1e-12));
    for (int nk : ex.negatives)
      loss += -std::log(std::max(1.0 - sigmoid(row_dot(emb.Z, ex.center, nk)), 1e-12));
  }
  return loss;
}

void sgns_batch_step(EmbeddingTable& emb, const std::vector<SgnsExample>& batch, double lr) {
  DenseMat grad(emb.n(), emb.dim());
  const DenseMat& z = emb.Z;
  const int d = emb.dim();
  for (const auto& ex : batch) {
    const double sp = sigmoid(row_dot(z, ex.center, ex.context));
    for (int k = 0; k < d; ++k) {
      grad(ex.center, k) += (sp - 1.0) * z(ex.context, k);
      grad(ex.context, k) += (sp - 1.0) * z(ex.center, k);
    }
    for (int nk : ex.negatives) {
      const double sn = sigmoid(row_dot(z, ex.center, nk));
      for (int k = 0; k < d; ++k) {
        grad(ex.center, k) += sn * z(nk, k);
        grad(nk, k) += sn * z(ex.center, k);
      }
    }
  }
  add_scaled(emb.Z, grad, -lr);
}

EdgeEmbedStrategy edge_embed_strategy_from_string(const std::string& s) {
  if (s == "concat") return EdgeEmbedStrategy::Concat;
  if (s == "average") return EdgeEmbedStrategy::Average;
  if (s == "hadamard") return EdgeEmbedStrategy::Hadamard;
  if (s == "weighted-l1") return EdgeEmbedStrategy::WeightedL1;
  if (s == "weighted-l2") return EdgeEmbedStrategy::WeightedL2;
  throw ValidationError("unknown edge-embedding strategy '" + s + "'");
}

std::vector<double> edge_embed(const EmbeddingTable& emb, int i, int j,
                               EdgeEmbedStrategy strategy) {
  if (i < 0 || j < 0 || i >= emb.n() || j >= emb.n())
    throw BoundsError("edge_embed: node id out of range");
  const int d = emb.dim();
  const DenseMat& z = emb.Z;
  std::vector<double> e;
  switch (strategy) {
    case EdgeEmbedStrategy::Concat:
      e.resize(2 * std::size_t(d));
      for (int k = 0; k < d; ++k) e[k] = z(i, k);
      for (int k = 0; k < d; ++k) e[d + k] = z(j, k);
      break;
    case EdgeEmbedStrategy::Average:
      e.resize(d);
      for (int k = 0; k < d; ++k) e[k] = 0.5 * (z(i, k) + z(j, k));
      break;
    case EdgeEmbedStrategy::Hadamard:
      e.resize(d);
      for (int k = 0; k < d; ++k) e[k] = z(i, k) * z(j, k);
      break;
    case EdgeEmbedStrategy::WeightedL1:
      e.resize(d);
      for (int k = 0; k < d; ++k) e[k] = std::fabs(z(i, k) - z(j, k));
      break;
    case EdgeEmbedStrategy::WeightedL2:
      e.resize(d);
      for (int k = 0; k < d; ++k) {
        const double diff = z(i, k) - z(j, k);
        e[k] = diff * diff;
      }
      break;
  }
  return e;
}

double LinkClassifier::predict_proba(const std::vector<double>& features) const {
  if (features.size() != w.size())
    throw ValidationError("classifier: feature dimension mismatch");
  double s = b;
  for (std::size_t k = 0; k < w.size(); ++k) s += w[k] * features[k];
  return sigmoid(s);
}

LinkClassifier train_link_classifier(const std::vector<std::vector<double>>& features,
                                     const std::vector<int>& labels, double l2, int epochs,
                                     double lr, std::uint64_t seed) {
  if (features.empty()) throw ValidationError("classifier: empty training set");
  if (features.size() != labels.size())
    throw ValidationError("classifier: features/labels length mismatch");
  bool has_pos = false, has_neg = false;
  for (int y : labels) (y ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg)
    throw ValidationError("classifier: both classes must be present");

  LinkClassifier clf;
  clf.w.assign(features.front().size(), 0.0);
  std::vector<std::size_t> order(features.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  SplitMix64 rng(mix_seed(seed, 0x1c));
  for (int epoch = 0; epoch < epochs; ++epoch) {
    seeded_shuffle(order, rng);
    for (std::size_t idx : order) {
      const auto& x = features[idx];
      if (x.size() != clf.w.size())
        throw ValidationError("classifier: ragged feature rows");
      double s = clf.b;
      for (std::size_t k = 0; k < x.size(); ++k) s += clf.w[k] * x[k];
      const double err = sigmoid(s) - double(labels[idx]);
      for (std::size_t k = 0; k < x.size(); ++k)
        clf.w[k] -= lr * (err * x[k] + l2 * clf.w[k]);
      clf.b -= lr * err;
    }
  }
  return clf;
}

namespace {

std::set<std::pair<int, int>> history_pairs(const EventStream& history) {
  std::set<std::pair<int, int>> pairs;
  for (const auto& ev : history.events) {
    int a = ev.src, b = ev.dst;
    if (a > b) std::swap(a, b);
    pairs.insert({a, b});
  }
  return pairs;
}

}  // namespace

std::vector<double> ctdne_scores(const EventStream& history,
                                 const std::vector<std::pair<int, int>>& candidates,
                                 const CtdnePipelineConfig& cfg) {
  if (candidates.empty()) return {};
  const int n = history.nodes.n();

  WalkConfig wc = cfg.walk;
  wc.seed = mix_seed(cfg.seed, 0x10);
  const auto walks = sample_trw(history, wc);

  SgnsConfig sc = cfg.sgns;
  sc.seed = mix_seed(cfg.seed, 0x20);
  const EmbeddingTable emb = train_ctdne(walks, n, cfg.d, sc);

  // classifier training set: history pairs vs sampled non-edges, 1:1
  const auto positives = history_pairs(history);
  std::vector<std::vector<double>> feats;
  std::vector<int> labels;
  for (const auto& [a, b] : positives) {
    feats.push_back(edge_embed(emb, a, b, cfg.strategy));
    labels.push_back(1);
  }
  SplitMix64 rng(mix_seed(cfg.seed, 0x30));
  std::set<std::pair<int, int>> negs;
  const std::size_t universe = std::size_t(n) * (n - 1) / 2;
  // 1:1 with the positives where the graph permits; dense histories fall back
  // to every remaining non-edge
  const std::size_t want = std::min(positives.size(), universe - positives.size());
  if (want == 0) throw ValidationError("ctdne: history leaves no non-edge pairs to sample");
  while (negs.size() < want) {
    int a = int(rng.below(std::uint64_t(n)));
    int b = int(rng.below(std::uint64_t(n)));
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    if (positives.count({a, b}) || negs.count({a, b})) continue;
    negs.insert({a, b});
  }
  for (const auto& [a, b] : negs) {
    feats.push_back(edge_embed(emb, a, b, cfg.strategy));
    labels.push_back(0);
  }
  if (cfg.shuffle_labels) {
    SplitMix64 sh(mix_seed(cfg.seed, 0x40));
    seeded_shuffle(labels, sh);
  }

  const LinkClassifier clf = train_link_classifier(feats, labels, cfg.classifier_l2,
                                                   cfg.classifier_epochs, cfg.classifier_lr,
                                                   mix_seed(cfg.seed, 0x50));
  std::vector<double> scores;
  scores.reserve(candidates.size());
  for (const auto& [a, b] : candidates)
    scores.push_back(clf.predict_proba(edge_embed(emb, a, b, cfg.strategy)));
  return scores;
}

ScoreMatrix ctdne_predict(const EventStream& history,
                          const std::vector<std::pair<int, int>>& candidates,
                          const CtdnePipelineConfig& cfg) {
  const auto scores = ctdne_scores(history, candidates, cfg);
  ScoreMatrix s(history.nodes.n(), history.nodes.n());
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const auto& [a, b] = candidates[k];
    s(a, b) = scores[k];
    s(b, a) = scores[k];
  }
  return s;
}

void write_embeddings_csv(const EmbeddingTable& emb, const NodeTable& nodes,
                          const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  for (int i = 0; i < emb.n(); ++i) {
    out << (nodes.labeled() ? nodes.label(i) : std::to_string(i));
    for (int k = 0; k < emb.dim(); ++k) out << ',' << format_double(emb.Z(i, k));
    out << '\n';
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace tlp
