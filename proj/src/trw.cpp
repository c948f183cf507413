#include "tlp/trw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tlp/error.hpp"
#include "tlp/rng.hpp"

namespace tlp {

TemporalAdjacency::TemporalAdjacency(const EventStream& stream) {
  const int n = stream.nodes.n();
  std::vector<int> deg(n, 0);
  for (const auto& ev : stream.events) {
    ++deg[ev.src];
    ++deg[ev.dst];
  }
  offset_.assign(n + 1, 0);
  for (int v = 0; v < n; ++v) offset_[v + 1] = offset_[v] + deg[v];
  hops_.resize(offset_[n]);
  std::vector<int> fill(offset_.begin(), offset_.end() - 1);
  // events arrive time-sorted, so per-node hop lists stay time-sorted
  for (int e = 0; e < int(stream.events.size()); ++e) {
    const auto& ev = stream.events[std::size_t(e)];
    hops_[fill[ev.src]++] = {ev.dst, ev.time, e};
    hops_[fill[ev.dst]++] = {ev.src, ev.time, e};
  }
}

std::span<const TemporalAdjacency::Hop> TemporalAdjacency::all(int v) const {
  return {hops_.data() + offset_[v], std::size_t(offset_[v + 1] - offset_[v])};
}

std::span<const TemporalAdjacency::Hop> TemporalAdjacency::continuations(int v, double t) const {
  auto hops = all(v);
  auto it = std::lower_bound(hops.begin(), hops.end(), t,
                             [](const Hop& h, double x) { return h.time < x; });
  return {it, hops.end()};
}

namespace {

// One walk from a dedicated rng; truncates at dead ends. A continuation may
// share the current timestamp but never re-traverses the event instance the
// walk just arrived on, so a lone edge cannot be bounced on forever.
TemporalWalk run_walk(const TemporalAdjacency& adj, const WalkConfig& cfg, int start,
                      SplitMix64& rng) {
  TemporalWalk w;
  w.nodes.push_back(start);
  double now = -std::numeric_limits<double>::infinity();
  int last_event = -1;
  std::vector<const TemporalAdjacency::Hop*> cand;
  for (int hop = 0; hop < cfg.K; ++hop) {
    const int v = w.nodes.back();
    auto cont = hop == 0 ? adj.all(v) : adj.continuations(v, now);
    cand.clear();
    for (const auto& h : cont)
      if (h.event != last_event) cand.push_back(&h);
    if (cand.empty()) break;
    std::size_t pick = 0;
    if (cfg.next_policy == NextPolicy::Uniform) {
      pick = rng.below(cand.size());
    } else {
      const double base = hop == 0 ? cand.front()->time : now;
      double total = 0.0;
      std::vector<double> cum(cand.size());
      for (std::size_t i = 0; i < cand.size(); ++i) {
        total += std::exp(-cfg.bias_rate * (cand[i]->time - base));
        cum[i] = total;
      }
      const double x = rng.uniform() * total;
      pick = std::size_t(std::lower_bound(cum.begin(), cum.end(), x) - cum.begin());
      if (pick >= cand.size()) pick = cand.size() - 1;
    }
    w.nodes.push_back(cand[pick]->to);
    w.times.push_back(cand[pick]->time);
    now = cand[pick]->time;
    last_event = cand[pick]->event;
  }
  return w;
}

std::vector<TemporalWalk> sample_impl(const EventStream& stream, const WalkConfig& cfg,
                                      bool parallel) {
  if (stream.empty()) throw ValidationError("sample_trw: empty stream");
  if (cfg.K < 1) throw ValidationError("sample_trw: K must be >= 1");
  if (cfg.walks_per_node < 1) throw ValidationError("sample_trw: walks_per_node must be >= 1");

  const TemporalAdjacency adj(stream);
  const int n = adj.n();
  const std::int64_t total = std::int64_t(cfg.walks_per_node) * n;
  std::vector<TemporalWalk> walks;
  walks.resize(std::size_t(total));

#pragma omp parallel for schedule(dynamic, 256) if (parallel)
  for (std::int64_t w = 0; w < total; ++w) {
    SplitMix64 rng(mix_seed(cfg.seed, std::uint64_t(w)));
    int start;
    if (cfg.start_policy == StartPolicy::UniformNode) {
      start = int(w % n);  // every node gets walks_per_node starts
    } else {
      const auto& ev = stream.events[rng.below(stream.events.size())];
      start = rng.bernoulli(0.5) ? ev.src : ev.dst;
    }
    walks[std::size_t(w)] = run_walk(adj, cfg, start, rng);
  }

  std::vector<TemporalWalk> kept;
  kept.reserve(walks.size());
  for (auto& w : walks)
    if (w.nodes.size() >= 2) kept.push_back(std::move(w));
  return kept;
}

}  // namespace

std::vector<TemporalWalk> sample_trw(const EventStream& stream, const WalkConfig& cfg) {
  return sample_impl(stream, cfg, true);
}

std::vector<TemporalWalk> sample_trw_serial(const EventStream& stream, const WalkConfig& cfg) {
  return sample_impl(stream, cfg, false);
}

bool is_time_respecting(const TemporalWalk& walk, const EventStream& stream) {
  if (walk.nodes.size() != walk.times.size() + 1) return false;
  for (std::size_t r = 1; r < walk.times.size(); ++r)
    if (walk.times[r] < walk.times[r - 1]) return false;
  for (std::size_t r = 0; r < walk.times.size(); ++r) {
    const int a = walk.nodes[r], b = walk.nodes[r + 1];
    const double t = walk.times[r];
    bool found = false;
    for (const auto& ev : stream.events) {
      if (ev.time == t && ((ev.src == a && ev.dst == b) || (ev.src == b && ev.dst == a))) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

}  // namespace tlp
