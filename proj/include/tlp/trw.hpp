#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tlp/graph.hpp"

namespace tlp {

// Walk whose traversed edge times never decrease. nodes has times.size()+1
// entries; times[r] is the timestamp of the edge (nodes[r], nodes[r+1]).
struct TemporalWalk {
  std::vector<int> nodes;
  std::vector<double> times;

  int hops() const { return int(times.size()); }
};

enum class StartPolicy { UniformNode, UniformEdge };
enum class NextPolicy { Uniform, ExpTimeBias };

struct WalkConfig {
  int K = 8;                // maximum hops per walk
  int walks_per_node = 10;  // total walks = walks_per_node * n
  StartPolicy start_policy = StartPolicy::UniformNode;
  NextPolicy next_policy = NextPolicy::Uniform;
  double bias_rate = 1.0;  // exp(-rate * gap) weighting for ExpTimeBias
  std::uint64_t seed = 0;
};

// Time-ordered incident-event index; continuation lookups are binary searches.
class TemporalAdjacency {
 public:
  explicit TemporalAdjacency(const EventStream& stream);

  struct Hop {
    int to;
    double time;
    int event;  // index into the stream, so a walk can avoid bouncing on the
                // instance it just traversed
  };

  // incident hops of v with time >= t, in time order
  std::span<const Hop> continuations(int v, double t) const;
  std::span<const Hop> all(int v) const;
  int n() const { return int(offset_.size()) - 1; }

 private:
  std::vector<int> offset_;
  std::vector<Hop> hops_;
};

// Walks truncate at dead ends; anything shorter than one hop is discarded.
// Per-walk seeds derive from cfg.seed, so the parallel and serial paths emit
// identical walk lists.
std::vector<TemporalWalk> sample_trw(const EventStream& stream, const WalkConfig& cfg);
std::vector<TemporalWalk> sample_trw_serial(const EventStream& stream, const WalkConfig& cfg);

// True when every consecutive pair is an edge of the stream at the recorded
// time and times never decrease. Used by tests as the independent checker.
bool is_time_respecting(const TemporalWalk& walk, const EventStream& stream);

}  // namespace tlp
