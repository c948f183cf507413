#pragma once

#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "tlp/matrix.hpp"

namespace tlp {

// Canonical node table. Indices are dense 0..N-1; labels, when present, map
// bijectively onto indices.
class NodeTable {
 public:
  NodeTable() = default;
  explicit NodeTable(int n) : n_(n) {}

  // First-seen order; returns the existing index when the label is known.
  int add(const std::string& label);

  int n() const { return n_; }
  bool labeled() const { return !labels_.empty(); }
  const std::string& label(int i) const { return labels_[i]; }
  const std::vector<std::string>& labels() const { return labels_; }
  // -1 when absent
  int find(const std::string& label) const;

  static NodeTable from_labels(const std::vector<std::string>& labels);

 private:
  int n_ = 0;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, int> index_;
};

// Undirected edge stored once, min index first, weight > 0.
struct WeightedEdge {
  int i = 0, j = 0;
  double w = 1.0;
};

// One weighted undirected graph with a zero diagonal. Immutable after
// construction; adjacency kept canonically plus a CSR view for traversal.
class Snapshot {
 public:
  Snapshot() = default;
  // Edges may arrive in any orientation/order; duplicates of the same pair are
  // rejected (aggregation belongs to resample).
  Snapshot(int n, std::vector<WeightedEdge> edges);

  int n() const { return n_; }
  int edge_count() const { return int(edges_.size()); }
  const std::vector<WeightedEdge>& edges() const { return edges_; }

  std::span<const int> neighbors(int v) const;
  std::span<const double> neighbor_weights(int v) const;
  int degree(int v) const;
  double weight(int i, int j) const;
  bool has_edge(int i, int j) const { return weight(i, j) > 0.0; }

  DenseMat to_dense() const;
  double total_weight() const;

 private:
  int n_ = 0;
  std::vector<WeightedEdge> edges_;
  std::vector<int> offset_;   // n+1
  std::vector<int> nbr_;
  std::vector<double> nbr_w_;
};

// ESSD container: ordered snapshots on a regular grid, sharing one node table.
// Step indices are 1-based.
struct SnapshotSequence {
  std::vector<Snapshot> snaps;
  double interval = 1.0;
  double origin = 0.0;  // timestamp where step 1 begins
  NodeTable nodes;
  // Static node attributes (N x M), shared by every step when present.
  std::optional<DenseMat> attributes;

  int length() const { return int(snaps.size()); }
  const Snapshot& at_step(int t) const;  // 1-based, bounds-checked
};

struct Event {
  int src = 0, dst = 0;
  double weight = 1.0;
  double time = 0.0;
};

// UESD container: time-sorted weighted events plus the node registry.
struct EventStream {
  NodeTable nodes;
  std::vector<Event> events;  // non-decreasing time

  bool empty() const { return events.empty(); }
  double t_min() const;
  double t_max() const;
};

// Guard view over the L snapshots (tau-L, tau]. Fit/predict code receives only
// this view, so topology beyond step tau is unreachable through it; at() throws
// on any out-of-window index.
class Window {
 public:
  Window() = default;
  Window(const SnapshotSequence* seq, int tau, int len);

  int size() const { return len_; }
  int tau() const { return tau_; }
  int n() const;
  // k in [0, size): snapshot of step tau-size+1+k
  const Snapshot& at(int k) const;
  const Snapshot& last() const { return at(len_ - 1); }
  int step_of(int k) const { return tau_ - len_ + 1 + k; }

 private:
  const SnapshotSequence* seq_ = nullptr;
  int tau_ = 0, len_ = 0;
};

// pre: 1 <= L <= tau <= seq.length()
Window window(const SnapshotSequence& seq, int tau, int L);

enum class Aggregation { Sum, Last, Binary };

Aggregation aggregation_from_string(const std::string& s);
std::string to_string(Aggregation a);

// Bin events onto a regular grid; multi-edges within one bin combine per the
// chosen policy. Every snapshot spans the stream's full node table.
SnapshotSequence resample(const EventStream& stream, double interval, Aggregation agg);

// Snapshots back to events at mid-bin timestamps (keeps labels; re-sampling
// with the same interval reproduces the bins).
EventStream flatten(const SnapshotSequence& seq);

// Re-index every sequence against the union of their (label-bearing) node
// tables. Nodes missing from a snapshot stay isolated.
std::vector<SnapshotSequence> align_nodes(const std::vector<SnapshotSequence>& seqs);

}  // namespace tlp
