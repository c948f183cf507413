#pragma once

#include <cstdint>

#include "tlp/graph.hpp"

namespace tlp {

// Stochastic block model with per-step community migration. Deterministic
// given the seed.
struct DriftSbmParams {
  int n = 60;
  int k = 2;
  double p_in = 0.3;
  double p_out = 0.02;
  double migrate = 0.0;  // per-node, per-step probability of switching community
  int steps = 10;
  bool weighted = false;  // weights uniform in [1,10] when set
  std::uint64_t seed = 0;
};

SnapshotSequence synth_drift_sbm(const DriftSbmParams& p);

}  // namespace tlp
