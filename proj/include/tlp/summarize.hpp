#pragma once

#include <optional>

#include "tlp/graph.hpp"
#include "tlp/similarity.hpp"

namespace tlp {

// Decaying kernel that collapses a snapshot window into one weighted matrix.
struct SummarizationKernel {
  enum class Kind { Exponential, InverseLinear, Linear };

  Kind kind = Kind::Exponential;
  double theta = 0.5;  // in [0,1]

  static SummarizationKernel from_string(const std::string& name, double theta);
};

// Coefficient multiplying A_t where age = tau - t (0 for the newest snapshot).
// Exponential: (1-theta)^age * theta; inverse linear: theta/(age+1);
// linear: (L+1)*theta/(age+1). 0^0 = 1, so the exponential kernel at theta=1
// keeps exactly the newest snapshot.
double kernel_coefficient(const SummarizationKernel& k, int window_len, int age);

ScoreMatrix summarize(const Window& win, const SummarizationKernel& k);
ScoreMatrix summarize_serial(const Window& win, const SummarizationKernel& k);

// Composable direct-inference prediction: kernel only emits the collapsed
// matrix, measure only scores the newest snapshot, both applies the measure to
// the collapsed snapshot (presence threshold for set measures; Katz keeps the
// weights).
ScoreMatrix di_predict(const Window& win,
                       const std::optional<SummarizationKernel>& kernel,
                       const std::optional<SimilarityMeasure>& measure);

// Re-interpret a weighted score matrix as a snapshot (entries > 0 become
// edges, diagonal dropped).
Snapshot snapshot_from_scores(const DenseMat& w);

}  // namespace tlp
