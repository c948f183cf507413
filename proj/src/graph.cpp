#include "tlp/graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "tlp/error.hpp"

namespace tlp {

int NodeTable::add(const std::string& label) {
  auto it = index_.find(label);
  if (it != index_.end()) return it->second;
  const int id = n_++;
  labels_.push_back(label);
  index_.emplace(label, id);
  return id;
}

int NodeTable::find(const std::string& label) const {
  auto it = index_.find(label);
  return it == index_.end() ? -1 : it->second;
}

NodeTable NodeTable::from_labels(const std::vector<std::string>& labels) {
  NodeTable t;
  for (const auto& l : labels) {
    if (t.find(l) >= 0)
      throw ValidationError("node table: duplicate label '" + l + "'");
    t.add(l);
  }
  return t;
}

Snapshot::Snapshot(int n, std::vector<WeightedEdge> edges) : n_(n) {
  if (n < 0) throw ValidationError("snapshot: negative node count");
  for (auto& e : edges) {
    if (e.i == e.j) throw ValidationError("snapshot: self-loop on node " + std::to_string(e.i));
    if (e.i < 0 || e.j < 0 || e.i >= n || e.j >= n)
      throw ValidationError("snapshot: endpoint out of range");
    if (!(e.w > 0.0)) throw ValidationError("snapshot: non-positive weight");
    if (e.i > e.j) std::swap(e.i, e.j);
  }
  std::sort(edges.begin(), edges.end(), [](const WeightedEdge& a, const WeightedEdge& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });
  for (std::size_t k = 1; k < edges.size(); ++k)
    if (edges[k].i == edges[k - 1].i && edges[k].j == edges[k - 1].j)
      throw ValidationError("snapshot: duplicate edge (" + std::to_string(edges[k].i) + "," +
                            std::to_string(edges[k].j) + ")");
  edges_ = std::move(edges);

  std::vector<int> deg(n_, 0);
  for (const auto& e : edges_) {
    ++deg[e.i];
    ++deg[e.j];
  }
  offset_.assign(n_ + 1, 0);
  for (int v = 0; v < n_; ++v) offset_[v + 1] = offset_[v] + deg[v];
  nbr_.resize(offset_[n_]);
  nbr_w_.resize(offset_[n_]);
  std::vector<int> fill(offset_.begin(), offset_.end() - 1);
  for (const auto& e : edges_) {
    nbr_[fill[e.i]] = e.j;
    nbr_w_[fill[e.i]++] = e.w;
    nbr_[fill[e.j]] = e.i;
    nbr_w_[fill[e.j]++] = e.w;
  }
  // neighbor lists sorted for intersection-based similarity measures
  for (int v = 0; v < n_; ++v) {
    const int lo = offset_[v], hi = offset_[v + 1];
    std::vector<std::pair<int, double>> tmp;
    tmp.reserve(hi - lo);
    for (int k = lo; k < hi; ++k) tmp.emplace_back(nbr_[k], nbr_w_[k]);
    std::sort(tmp.begin(), tmp.end());
    for (int k = lo; k < hi; ++k) {
      nbr_[k] = tmp[k - lo].first;
      nbr_w_[k] = tmp[k - lo].second;
    }
  }
}

std::span<const int> Snapshot::neighbors(int v) const {
  return {nbr_.data() + offset_[v], std::size_t(offset_[v + 1] - offset_[v])};
}

std::span<const double> Snapshot::neighbor_weights(int v) const {
  return {nbr_w_.data() + offset_[v], std::size_t(offset_[v + 1] - offset_[v])};
}

int Snapshot::degree(int v) const { return offset_[v + 1] - offset_[v]; }

double Snapshot::weight(int i, int j) const {
  if (i == j) return 0.0;
  auto ns = neighbors(i);
  auto it = std::lower_bound(ns.begin(), ns.end(), j);
  if (it == ns.end() || *it != j) return 0.0;
  return nbr_w_[offset_[i] + (it - ns.begin())];
}

DenseMat Snapshot::to_dense() const {
  DenseMat a(n_, n_);
  for (const auto& e : edges_) {
    a(e.i, e.j) = e.w;
    a(e.j, e.i) = e.w;
  }
  return a;
}

double Snapshot::total_weight() const {
  double s = 0.0;
  for (const auto& e : edges_) s += e.w;
  return s;
}

const Snapshot& SnapshotSequence::at_step(int t) const {
  if (t < 1 || t > length())
    throw BoundsError("snapshot step " + std::to_string(t) + " outside 1.." +
                      std::to_string(length()));
  return snaps[t - 1];
}

double EventStream::t_min() const {
  if (events.empty()) throw ValidationError("event stream is empty");
  return events.front().time;
}

double EventStream::t_max() const {
  if (events.empty()) throw ValidationError("event stream is empty");
  return events.back().time;
}

Window::Window(const SnapshotSequence* seq, int tau, int len)
    : seq_(seq), tau_(tau), len_(len) {}

int Window::n() const { return at(0).n(); }

const Snapshot& Window::at(int k) const {
  if (k < 0 || k >= len_)
    throw BoundsError("window access " + std::to_string(k) + " outside 0.." +
                      std::to_string(len_ - 1));
  return seq_->snaps[tau_ - len_ + k];
}

Window window(const SnapshotSequence& seq, int tau, int L) {
  if (L < 1) throw BoundsError("window: L must be >= 1");
  if (tau < L) throw BoundsError("window: tau=" + std::to_string(tau) +
                                 " has fewer than L=" + std::to_string(L) + " steps of history");
  if (tau > seq.length())
    throw BoundsError("window: tau=" + std::to_string(tau) + " beyond sequence length " +
                      std::to_string(seq.length()));
  return Window(&seq, tau, L);
}

Aggregation aggregation_from_string(const std::string& s) {
  if (s == "sum") return Aggregation::Sum;
  if (s == "last") return Aggregation::Last;
  if (s == "binary") return Aggregation::Binary;
  throw ValidationError("unknown aggregation '" + s + "' (expected sum|last|binary)");
}

std::string to_string(Aggregation a) {
  switch (a) {
    case Aggregation::Sum: return "sum";
    case Aggregation::Last: return "last";
    case Aggregation::Binary: return "binary";
  }
  return "?";
}

SnapshotSequence resample(const EventStream& stream, double interval, Aggregation agg) {
  if (!(interval > 0.0)) throw ValidationError("resample: interval must be > 0");
  if (stream.empty()) throw ValidationError("resample: empty stream");
  const double t0 = stream.t_min();

  // Left-closed bins [t0+(k-1)ivl, t0+k*ivl); an event exactly on a boundary
  // opens the next bin.
  auto bin_of = [&](double t) {
    int b = int(std::floor((t - t0) / interval)) + 1;
    return b < 1 ? 1 : b;
  };
  const int steps = bin_of(stream.t_max());

  std::vector<std::map<std::pair<int, int>, double>> acc(steps + 1);
  for (const auto& ev : stream.events) {
    const int b = bin_of(ev.time);
    int i = ev.src, j = ev.dst;
    if (i == j) continue;
    if (i > j) std::swap(i, j);
    auto key = std::make_pair(i, j);
    auto& m = acc[b];
    switch (agg) {
      case Aggregation::Sum: m[key] += ev.weight; break;
      case Aggregation::Last: m[key] = ev.weight; break;  // events arrive time-sorted
      case Aggregation::Binary: m[key] = 1.0; break;
    }
  }

  SnapshotSequence seq;
  seq.interval = interval;
  seq.origin = t0;
  seq.nodes = stream.nodes;
  const int n = stream.nodes.n();
  for (int b = 1; b <= steps; ++b) {
    std::vector<WeightedEdge> edges;
    edges.reserve(acc[b].size());
    for (const auto& [key, w] : acc[b]) edges.push_back({key.first, key.second, w});
    seq.snaps.emplace_back(n, std::move(edges));
  }
  return seq;
}

EventStream flatten(const SnapshotSequence& seq) {
  EventStream out;
  out.nodes = seq.nodes;
  for (int t = 1; t <= seq.length(); ++t) {
    const double time = seq.origin + (t - 0.5) * seq.interval;
    for (const auto& e : seq.at_step(t).edges()) out.events.push_back({e.i, e.j, e.w, time});
  }
  return out;
}

std::vector<SnapshotSequence> align_nodes(const std::vector<SnapshotSequence>& seqs) {
  for (const auto& s : seqs)
    if (!s.nodes.labeled() && s.nodes.n() > 0)
      throw ValidationError("align_nodes: input carries unlabeled nodes");

  NodeTable uni;
  for (const auto& s : seqs)
    for (const auto& l : s.nodes.labels()) uni.add(l);

  std::vector<SnapshotSequence> out;
  out.reserve(seqs.size());
  for (const auto& s : seqs) {
    std::vector<int> remap(s.nodes.n());
    for (int i = 0; i < s.nodes.n(); ++i) remap[i] = uni.find(s.nodes.label(i));
    SnapshotSequence r;
    r.interval = s.interval;
    r.origin = s.origin;
    r.nodes = uni;
    for (const auto& snap : s.snaps) {
      std::vector<WeightedEdge> edges;
      edges.reserve(snap.edges().size());
      for (const auto& e : snap.edges()) edges.push_back({remap[e.i], remap[e.j], e.w});
      r.snaps.emplace_back(uni.n(), std::move(edges));
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace tlp
