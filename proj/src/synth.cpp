#include "tlp/synth.hpp"

#include <string>

#include "tlp/error.hpp"
#include "tlp/rng.hpp"

namespace tlp {

SnapshotSequence synth_drift_sbm(const DriftSbmParams& p) {
  if (p.n < 1) throw ValidationError("synth: n must be >= 1");
  if (p.k < 1) throw ValidationError("synth: k must be >= 1");
  if (p.steps < 1) throw ValidationError("synth: steps must be >= 1");
  if (!(p.p_out >= 0.0 && p.p_out <= p.p_in && p.p_in <= 1.0))
    throw ValidationError("synth: need 0 <= p_out <= p_in <= 1");
  if (!(p.migrate >= 0.0 && p.migrate <= 1.0))
    throw ValidationError("synth: migrate must be in [0,1]");

  SnapshotSequence seq;
  seq.interval = 1.0;
  seq.origin = 1.0;
  for (int i = 0; i < p.n; ++i) seq.nodes.add(std::to_string(i));

  std::vector<int> community(p.n);
  for (int i = 0; i < p.n; ++i) community[i] = i % p.k;

  SplitMix64 rng(mix_seed(p.seed, 0x5b));
  for (int step = 0; step < p.steps; ++step) {
    std::vector<WeightedEdge> edges;
    for (int i = 0; i < p.n; ++i) {
      for (int j = i + 1; j < p.n; ++j) {
        const double prob = community[i] == community[j] ? p.p_in : p.p_out;
        if (prob <= 0.0) continue;
        if (rng.uniform() < prob) {
          const double w = p.weighted ? rng.uniform(1.0, 10.0) : 1.0;
          edges.push_back({i, j, w});
        }
      }
    }
    seq.snaps.emplace_back(p.n, std::move(edges));

    if (p.migrate > 0.0) {
      for (int i = 0; i < p.n; ++i) {
        if (rng.uniform() < p.migrate && p.k > 1) {
          // move to a uniformly chosen other community
          int c = int(rng.below(std::uint64_t(p.k - 1)));
          if (c >= community[i]) ++c;
          community[i] = c;
        }
      }
    }
  }
  return seq;
}

}  // namespace tlp
