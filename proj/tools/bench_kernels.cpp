// Wall-clock comparison of the OpenMP kernels against their serial reference
// implementations. Also asserts the two paths agree bitwise, which is the
// contract the unit tests rely on.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "tlp/graph.hpp"
#include "tlp/matrix.hpp"
#include "tlp/rng.hpp"
#include "tlp/similarity.hpp"
#include "tlp/summarize.hpp"
#include "tlp/synth.hpp"
#include "tlp/trw.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

template <class F>
double time_ms(F&& f) {
  const auto t0 = Clock::now();
  f();
  return ms_since(t0);
}

void report(const char* name, double serial_ms, double parallel_ms, bool identical) {
  std::printf("%-24s serial %9.2f ms   omp %9.2f ms   speedup %5.2fx   %s\n", name, serial_ms,
              parallel_ms, serial_ms / std::max(parallel_ms, 1e-9),
              identical ? "identical" : "MISMATCH");
}

tlp::DenseMat random_matrix(int r, int c, std::uint64_t seed) {
  tlp::DenseMat m(r, c);
  tlp::SplitMix64 rng(seed);
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform();
  return m;
}

}  // namespace

int main(int argc, char** argv) {
  bool quick = false;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--quick") == 0) quick = true;

#ifdef _OPENMP
  std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
  std::printf("built without openmp; both columns run serially\n");
#endif

  bool all_ok = true;

  {  // dense product
    const int n = quick ? 96 : 512;
    const tlp::DenseMat a = random_matrix(n, n, 1);
    const tlp::DenseMat b = random_matrix(n, n, 2);
    tlp::DenseMat r1, r2;
    const double ts = time_ms([&] { r1 = tlp::matmul_serial(a, b); });
    const double tp = time_ms([&] { r2 = tlp::matmul(a, b); });
    const bool ok = tlp::max_abs_diff(r1, r2) == 0.0;
    all_ok = all_ok && ok;
    report("matmul", ts, tp, ok);
  }

  tlp::DriftSbmParams sbm;
  sbm.n = quick ? 200 : 1200;
  sbm.k = 8;
  sbm.p_in = quick ? 0.10 : 0.02;
  sbm.p_out = 0.002;
  sbm.steps = 6;
  sbm.seed = 7;
  const tlp::SnapshotSequence seq = tlp::synth_drift_sbm(sbm);
  const tlp::Window win = tlp::window(seq, seq.length(), seq.length());

  {  // neighbor similarity, all pairs
    tlp::SimilarityMeasure m;
    m.kind = tlp::SimilarityMeasure::Kind::AdamicAdar;
    tlp::DenseMat r1, r2;
    const double ts = time_ms([&] { r1 = tlp::neighbor_similarity_serial(win.last(), m); });
    const double tp = time_ms([&] { r2 = tlp::neighbor_similarity(win.last(), m); });
    const bool ok = tlp::max_abs_diff(r1, r2) == 0.0;
    all_ok = all_ok && ok;
    report("adamic-adar all-pairs", ts, tp, ok);
  }

  {  // BFS hop distances
    tlp::DenseMat r1, r2;
    const double ts = time_ms([&] { r1 = tlp::negated_hop_distances_serial(win.last()); });
    const double tp = time_ms([&] { r2 = tlp::negated_hop_distances(win.last()); });
    const bool ok = tlp::max_abs_diff(r1, r2) == 0.0;
    all_ok = all_ok && ok;
    report("bfs hop distances", ts, tp, ok);
  }

  {  // window summarization
    tlp::SummarizationKernel k{tlp::SummarizationKernel::Kind::Exponential, 0.4};
    tlp::DenseMat r1, r2;
    const double ts = time_ms([&] { r1 = tlp::summarize_serial(win, k); });
    const double tp = time_ms([&] { r2 = tlp::summarize(win, k); });
    const bool ok = tlp::max_abs_diff(r1, r2) == 0.0;
    all_ok = all_ok && ok;
    report("summarize window", ts, tp, ok);
  }

  {  // temporal walk sampling
    const tlp::EventStream stream = tlp::flatten(seq);
    tlp::WalkConfig wc;
    wc.K = 10;
    wc.walks_per_node = quick ? 20 : 80;
    wc.seed = 11;
    std::vector<tlp::TemporalWalk> w1, w2;
    const double ts = time_ms([&] { w1 = tlp::sample_trw_serial(stream, wc); });
    const double tp = time_ms([&] { w2 = tlp::sample_trw(stream, wc); });
    bool ok = w1.size() == w2.size();
    for (std::size_t i = 0; ok && i < w1.size(); ++i)
      ok = w1[i].nodes == w2[i].nodes && w1[i].times == w2[i].times;
    all_ok = all_ok && ok;
    report("temporal walks", ts, tp, ok);
  }

  if (!all_ok) {
    std::fprintf(stderr, "serial/openmp disagreement detected\n");
    return 1;
  }
  return 0;
}
