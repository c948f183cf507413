#include "tlp/summarize.hpp"

#include <cmath>

#include "tlp/error.hpp"

namespace tlp {

SummarizationKernel SummarizationKernel::from_string(const std::string& name, double theta) {
  SummarizationKernel k;
  k.theta = theta;
  if (name == "exp-kernel") k.kind = Kind::Exponential;
  else if (name == "il-kernel") k.kind = Kind::InverseLinear;
  else if (name == "lin-kernel") k.kind = Kind::Linear;
  else throw ValidationError("unknown summarization kernel '" + name + "'");
  return k;
}

double kernel_coefficient(const SummarizationKernel& k, int window_len, int age) {
  if (!(k.theta >= 0.0 && k.theta <= 1.0))
    throw ValidationError("kernel theta must lie in [0,1]");
  switch (k.kind) {
    case SummarizationKernel::Kind::Exponential:
      return (age == 0 ? 1.0 : std::pow(1.0 - k.theta, age)) * k.theta;
    case SummarizationKernel::Kind::InverseLinear:
      return k.theta / double(age + 1);
    case SummarizationKernel::Kind::Linear:
      return double(window_len + 1) * k.theta / double(age + 1);
  }
  return 0.0;
}

namespace {

ScoreMatrix summarize_impl(const Window& win, const SummarizationKernel& k, bool parallel) {
  const int L = win.size();
  const int n = win.n();
  std::vector<double> coeff(L);
  for (int idx = 0; idx < L; ++idx) coeff[idx] = kernel_coefficient(k, L, win.tau() - win.step_of(idx));

  ScoreMatrix w(n, n);
#pragma omp parallel for schedule(static) if (parallel && n > 64)
  for (int i = 0; i < n; ++i) {
    for (int idx = 0; idx < L; ++idx) {
      if (coeff[idx] == 0.0) continue;
      const Snapshot& g = win.at(idx);
      auto ns = g.neighbors(i);
      auto ws = g.neighbor_weights(i);
      for (std::size_t p = 0; p < ns.size(); ++p) w(i, ns[p]) += coeff[idx] * ws[p];
    }
  }
  return w;
}

}  // namespace

ScoreMatrix summarize(const Window& win, const SummarizationKernel& k) {
  return summarize_impl(win, k, true);
}

ScoreMatrix summarize_serial(const Window& win, const SummarizationKernel& k) {
  return summarize_impl(win, k, false);
}

Snapshot snapshot_from_scores(const DenseMat& w) {
  if (w.rows() != w.cols()) throw ValidationError("score matrix must be square");
  std::vector<WeightedEdge> edges;
  for (int i = 0; i < w.rows(); ++i)
    for (int j = i + 1; j < w.cols(); ++j)
      if (w(i, j) > 0.0) edges.push_back({i, j, w(i, j)});
  return Snapshot(w.rows(), std::move(edges));
}

ScoreMatrix di_predict(const Window& win,
                       const std::optional<SummarizationKernel>& kernel,
                       const std::optional<SimilarityMeasure>& measure) {
  if (!kernel && !measure)
    throw ValidationError("di_predict: need a kernel, a measure, or both");
  if (kernel && !measure) return summarize(win, *kernel);
  if (!kernel) return neighbor_similarity(win.last(), *measure);
  const ScoreMatrix w = summarize(win, *kernel);
  return neighbor_similarity(snapshot_from_scores(w), *measure);
}

}  // namespace tlp
