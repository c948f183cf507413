#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tlp/ctdne.hpp"
#include "tlp/graph.hpp"
#include "tlp/io.hpp"
#include "tlp/mf.hpp"
#include "tlp/metrics.hpp"
#include "tlp/summarize.hpp"
#include "tlp/synth.hpp"

namespace tlp {

inline constexpr const char* kToolkitVersion = "0.1.0";

enum class Paradigm { Di, Oti };
enum class DataModel { Essd, Uesd };

// One row of the method catalog.
struct MethodInfo {
  std::string name;
  DataModel data_model = DataModel::Essd;
  Paradigm paradigm = Paradigm::Di;
  bool weighted_links = false;
  std::string window;  // "1" or "tau"
  std::string delta;   // "1" or ">=1"
  std::vector<std::string> hyperparams;
};

// Every supported method with its data model, paradigm, weight capability and
// tunables.
const std::vector<MethodInfo>& list_methods();
const MethodInfo& method_info(const std::string& name);

struct ThresholdPolicy {
  enum class Kind { TopEdges, Fixed };
  Kind kind = Kind::TopEdges;
  double value = 0.5;
};

struct DatasetSpec {
  enum class Kind { File, Synth };
  Kind kind = Kind::Synth;
  // file
  std::string path;
  ColumnSchema schema;
  bool weighted = false;
  std::string attributes_path;
  // synth
  DriftSbmParams sbm;
};

struct ExperimentConfig {
  DatasetSpec dataset;
  DataModel data_model = DataModel::Essd;
  bool has_resample = false;
  double resample_interval = 1.0;
  Aggregation resample_agg = Aggregation::Sum;
  bool L_all = true;
  int L = 1;
  int delta = 1;
  std::string method;
  MfHyperParams mf;
  SimilarityMeasure measure;           // similarity methods
  double kernel_theta = 0.5;           // kernel methods / optional refinement
  bool combine_kernel = false;         // measure applied to a collapsed window
  std::string combine_kernel_name;
  CtdnePipelineConfig ctdne;
  std::vector<std::string> metrics;
  int eval_first = 1, eval_last = 0;   // inclusive; first > last means empty
  ThresholdPolicy threshold;
  std::uint64_t seed = 0;
  std::string dump_scores_dir;  // set by the CLI, not the config file
  nlohmann::ordered_json echo;
};

ExperimentConfig parse_config(const nlohmann::ordered_json& j);
ExperimentConfig load_config(const std::string& path);

struct RunRecord {
  int tau = 0;
  std::string method;
  std::string metric;
  int horizon = 1;
  std::optional<double> value;  // empty -> "undefined"
  double ms = 0.0;
};

struct RunReport {
  std::vector<RunRecord> records;
  nlohmann::ordered_json config_echo;
  std::string toolkit_version = kToolkitVersion;
};

// Rolling-window direct inference: score window(tau, L), evaluate against
// G_{tau+1}. Rejects non-DI methods before any work.
RunReport run_di(const ExperimentConfig& cfg);

// Online training & inference: a fresh model per step, fit strictly on
// history (<= tau), predict tau+1..tau+delta, evaluate, discard. Per-step
// seeds derive from hash(seed, tau).
RunReport run_oti(const ExperimentConfig& cfg);

// Dispatch on the method's paradigm.
RunReport run_experiment(const ExperimentConfig& cfg);

void emit_report_csv(const RunReport& report, const std::string& path);
void emit_report_json(const RunReport& report, const std::string& path);
std::string report_csv_string(const RunReport& report);

// Loaded inputs of one experiment: the snapshot grid plus, for UESD runs, the
// raw events behind it.
struct PreparedData {
  SnapshotSequence seq;
  std::optional<EventStream> stream;
  std::optional<DenseMat> attrs;
};

PreparedData prepare_dataset(const ExperimentConfig& cfg);

// Scores -> requested metric against a truth snapshot; empty optional when the
// metric's preconditions fail (single-class AUC, zero-denominator F1).
std::optional<double> evaluate_metric(const std::string& name, const ScoreMatrix& scores,
                                      const Snapshot& truth, const ThresholdPolicy& policy,
                                      int edge_budget);

}  // namespace tlp
