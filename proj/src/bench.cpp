#include "tlp/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <set>

#include "tlp/error.hpp"
#include "tlp/rng.hpp"

namespace tlp {

using nlohmann::ordered_json;

// --- method catalog -----------------------------------------------------------

namespace {

std::vector<MethodInfo> build_catalog() {
  using P = Paradigm;
  using D = DataModel;
  std::vector<MethodInfo> v;
  auto add = [&](std::string name, D dm, P pa, bool weights, std::string win, std::string delta,
                 std::vector<std::string> hp) {
    v.push_back({std::move(name), dm, pa, weights, std::move(win), std::move(delta), std::move(hp)});
  };
  // graph summarization kernels
  add("exp-kernel", D::Essd, P::Di, true, "tau", "1", {"theta"});
  add("il-kernel", D::Essd, P::Di, true, "tau", "1", {"theta"});
  add("lin-kernel", D::Essd, P::Di, true, "tau", "1", {"theta"});
  // neighbor similarities
  add("cn", D::Essd, P::Di, false, "1", "1", {"kernel", "kernel_theta"});
  add("jaccard", D::Essd, P::Di, false, "1", "1", {"kernel", "kernel_theta"});
  add("aa", D::Essd, P::Di, false, "1", "1", {"kernel", "kernel_theta"});
  add("pa", D::Essd, P::Di, false, "1", "1", {"kernel", "kernel_theta"});
  add("sp", D::Essd, P::Di, false, "1", "1", {"kernel", "kernel_theta"});
  add("katz", D::Essd, P::Di, false, "1", "1", {"theta", "truncation", "kernel", "kernel_theta"});
  // matrix factorization
  add("crjmf", D::Essd, P::Oti, true, "tau", "1", {"d", "alpha", "beta", "theta", "iters", "tol"});
  add("tlsi", D::Essd, P::Oti, true, "tau", "1", {"d", "beta", "iters", "tol"});
  add("mljfe", D::Essd, P::Oti, true, "tau", "1", {"d", "alpha", "beta", "h", "iters", "tol"});
  add("grnmf", D::Essd, P::Oti, true, "tau", "1", {"d", "alpha", "theta", "iters", "tol"});
  add("deepeye", D::Essd, P::Oti, true, "tau", "1", {"d", "theta", "iters", "tol"});
  add("tmf", D::Essd, P::Oti, true, "tau", ">=1",
      {"d", "alpha", "beta", "beta_i", "theta", "h", "iters", "tol", "learning_rate"});
  add("list", D::Essd, P::Oti, true, "tau", ">=1",
      {"d", "beta", "beta_i", "theta", "theta_hat", "h", "iters", "tol", "learning_rate"});
  // temporal-walk embedding
  add("ctdne", D::Uesd, P::Oti, false, "tau", ">=1",
      {"d", "walk_k", "walks_per_node", "start_policy", "next_policy", "bias_rate",
       "context_window", "negatives", "sgns_lr", "epochs", "strategy", "classifier_l2",
       "classifier_epochs", "classifier_lr"});
  return v;
}

}  // namespace

const std::vector<MethodInfo>& list_methods() {
  static const std::vector<MethodInfo> catalog = build_catalog();
  return catalog;
}

const MethodInfo& method_info(const std::string& name) {
  for (const auto& m : list_methods())
    if (m.name == name) return m;
  throw ValidationError("unknown method '" + name + "'");
}

// --- config parsing --------------------------------------------------------------

namespace {

void expect_keys(const ordered_json& j, const std::set<std::string>& allowed,
                 const std::string& where) {
  if (!j.is_object()) throw ValidationError("config: " + where + " must be an object");
  for (const auto& [k, dummy] : j.items())
    if (!allowed.count(k))
      throw ValidationError("config: unknown key '" + k + "' in " + where);
}

double num_at(const ordered_json& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw ValidationError("config: '" + key + "' must be a number");
  return j.at(key).get<double>();
}

int int_at(const ordered_json& j, const std::string& key, int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer())
    throw ValidationError("config: '" + key + "' must be an integer");
  return j.at(key).get<int>();
}

std::string str_at(const ordered_json& j, const std::string& key, const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string()) throw ValidationError("config: '" + key + "' must be a string");
  return j.at(key).get<std::string>();
}

DatasetSpec parse_dataset(const ordered_json& j) {
  DatasetSpec ds;
  const std::string kind = str_at(j, "kind", "");
  if (kind == "file") {
    expect_keys(j, {"kind", "path", "columns", "weighted", "attributes"}, "dataset");
    ds.kind = DatasetSpec::Kind::File;
    ds.path = str_at(j, "path", "");
    if (ds.path.empty()) throw ValidationError("config: dataset.path is required");
    ds.weighted = j.value("weighted", false);
    const std::string cols = str_at(j, "columns", "");
    ds.schema = cols.empty()
                    ? (ds.weighted ? ColumnSchema{} : ColumnSchema::unweighted())
                    : ColumnSchema::from_string(cols);
    ds.attributes_path = str_at(j, "attributes", "");
  } else if (kind == "synth-drift-sbm") {
    expect_keys(j,
                {"kind", "n", "k", "p_in", "p_out", "migrate", "steps", "weighted", "seed",
                 "attributes"},
                "dataset");
    ds.kind = DatasetSpec::Kind::Synth;
    ds.attributes_path = str_at(j, "attributes", "");
    ds.sbm.n = int_at(j, "n", 60);
    ds.sbm.k = int_at(j, "k", 2);
    ds.sbm.p_in = num_at(j, "p_in", 0.3);
    ds.sbm.p_out = num_at(j, "p_out", 0.02);
    ds.sbm.migrate = num_at(j, "migrate", 0.0);
    ds.sbm.steps = int_at(j, "steps", 10);
    ds.sbm.weighted = j.value("weighted", false);
    ds.sbm.seed = std::uint64_t(int_at(j, "seed", 0));
  } else {
    throw ValidationError("config: dataset.kind must be 'file' or 'synth-drift-sbm'");
  }
  return ds;
}

void parse_hyperparams(const ordered_json& hp, ExperimentConfig& cfg) {
  const MethodInfo& info = method_info(cfg.method);
  expect_keys(hp, std::set<std::string>(info.hyperparams.begin(), info.hyperparams.end()),
              "hyperparams for " + cfg.method);

  MfHyperParams& p = cfg.mf;
  p.d = int_at(hp, "d", p.d);
  p.alpha = num_at(hp, "alpha", p.alpha);
  p.beta = num_at(hp, "beta", p.beta);
  p.theta = num_at(hp, "theta", p.theta);
  p.h = int_at(hp, "h", p.h);
  p.theta_hat = num_at(hp, "theta_hat", p.theta_hat);
  p.iters = int_at(hp, "iters", p.iters);
  p.tol = num_at(hp, "tol", p.tol);
  p.learning_rate = num_at(hp, "learning_rate", p.learning_rate);
  if (hp.contains("beta_i")) {
    if (!hp.at("beta_i").is_array()) throw ValidationError("config: beta_i must be an array");
    p.beta_i = hp.at("beta_i").get<std::vector<double>>();
  }

  cfg.kernel_theta = num_at(hp, "theta", cfg.kernel_theta);
  if (hp.contains("kernel")) {
    cfg.combine_kernel = true;
    cfg.combine_kernel_name = str_at(hp, "kernel", "exp-kernel");
    cfg.kernel_theta = num_at(hp, "kernel_theta", 0.5);
  }

  if (cfg.method == "katz" || cfg.method == "cn" || cfg.method == "jaccard" ||
      cfg.method == "aa" || cfg.method == "pa" || cfg.method == "sp") {
    cfg.measure = SimilarityMeasure::from_string(cfg.method);
    cfg.measure.katz_theta = num_at(hp, "theta", 0.1);
    cfg.measure.katz_truncation = int_at(hp, "truncation", 10);
  }

  if (cfg.method == "ctdne") {
    CtdnePipelineConfig& c = cfg.ctdne;
    c.d = int_at(hp, "d", 32);
    c.walk.K = int_at(hp, "walk_k", c.walk.K);
    c.walk.walks_per_node = int_at(hp, "walks_per_node", c.walk.walks_per_node);
    const std::string sp = str_at(hp, "start_policy", "uniform-node");
    if (sp == "uniform-node") c.walk.start_policy = StartPolicy::UniformNode;
    else if (sp == "uniform-edge") c.walk.start_policy = StartPolicy::UniformEdge;
    else throw ValidationError("config: start_policy must be uniform-node|uniform-edge");
    const std::string np = str_at(hp, "next_policy", "uniform");
    if (np == "uniform") c.walk.next_policy = NextPolicy::Uniform;
    else if (np == "exp-time-bias") c.walk.next_policy = NextPolicy::ExpTimeBias;
    else throw ValidationError("config: next_policy must be uniform|exp-time-bias");
    c.walk.bias_rate = num_at(hp, "bias_rate", 1.0);
    c.sgns.context_window = int_at(hp, "context_window", c.sgns.context_window);
    c.sgns.negatives = int_at(hp, "negatives", c.sgns.negatives);
    c.sgns.learning_rate = num_at(hp, "sgns_lr", c.sgns.learning_rate);
    c.sgns.epochs = int_at(hp, "epochs", c.sgns.epochs);
    c.strategy = edge_embed_strategy_from_string(str_at(hp, "strategy", "hadamard"));
    c.classifier_l2 = num_at(hp, "classifier_l2", c.classifier_l2);
    c.classifier_epochs = int_at(hp, "classifier_epochs", c.classifier_epochs);
    c.classifier_lr = num_at(hp, "classifier_lr", c.classifier_lr);
  }
}

const std::set<std::string> kKnownMetrics = {"auc", "accuracy", "f1", "rmse", "mae", "mlsd", "mr"};

}  // namespace

ExperimentConfig parse_config(const ordered_json& j) {
  expect_keys(j,
              {"version", "seed", "data_model", "dataset", "resample", "L", "delta", "method",
               "hyperparams", "metrics", "eval_range", "threshold"},
              "config");
  if (int_at(j, "version", 0) != 1)
    throw ValidationError("config: unsupported or missing version (expected 1)");

  ExperimentConfig cfg;
  cfg.echo = j;
  cfg.seed = std::uint64_t(j.value("seed", 0));
  cfg.mf.seed = cfg.seed;
  cfg.ctdne.seed = cfg.seed;

  const std::string dm = str_at(j, "data_model", "");
  if (dm == "essd") cfg.data_model = DataModel::Essd;
  else if (dm == "uesd") cfg.data_model = DataModel::Uesd;
  else throw ValidationError("config: data_model must be 'essd' or 'uesd'");

  if (!j.contains("dataset")) throw ValidationError("config: dataset is required");
  cfg.dataset = parse_dataset(j.at("dataset"));

  if (j.contains("resample")) {
    const auto& r = j.at("resample");
    expect_keys(r, {"interval", "aggregation"}, "resample");
    cfg.has_resample = true;
    cfg.resample_interval = num_at(r, "interval", 1.0);
    if (!(cfg.resample_interval > 0.0))
      throw ValidationError("config: resample.interval must be > 0");
    cfg.resample_agg = aggregation_from_string(str_at(r, "aggregation", "sum"));
  }
  if (cfg.data_model == DataModel::Uesd && !cfg.has_resample)
    throw ValidationError("config: uesd runs need a resample block to define the step grid");

  if (j.contains("L")) {
    if (j.at("L").is_string()) {
      if (j.at("L").get<std::string>() != "all")
        throw ValidationError("config: L must be an integer or \"all\"");
      cfg.L_all = true;
    } else {
      cfg.L_all = false;
      cfg.L = int_at(j, "L", 1);
      if (cfg.L < 1) throw ValidationError("config: L must be >= 1");
    }
  }
  cfg.delta = int_at(j, "delta", 1);
  if (cfg.delta < 1) throw ValidationError("config: delta must be >= 1");

  cfg.method = str_at(j, "method", "");
  const MethodInfo& info = method_info(cfg.method);  // throws on unknown
  if (cfg.delta > 1 && info.delta == "1")
    throw ValidationError("config: method '" + cfg.method + "' predicts one step only");
  if (info.data_model == DataModel::Uesd && cfg.data_model != DataModel::Uesd)
    throw ValidationError("config: method '" + cfg.method + "' expects uesd data");

  parse_hyperparams(j.value("hyperparams", ordered_json::object()), cfg);

  if (j.contains("metrics")) {
    if (!j.at("metrics").is_array()) throw ValidationError("config: metrics must be an array");
    cfg.metrics = j.at("metrics").get<std::vector<std::string>>();
  } else {
    cfg.metrics = {"auc"};
  }
  if (cfg.metrics.empty()) throw ValidationError("config: metrics must not be empty");
  for (const auto& m : cfg.metrics)
    if (!kKnownMetrics.count(m)) throw ValidationError("config: unknown metric '" + m + "'");

  if (!j.contains("eval_range")) throw ValidationError("config: eval_range is required");
  if (!j.at("eval_range").is_array() || j.at("eval_range").size() != 2)
    throw ValidationError("config: eval_range must be [first, last]");
  cfg.eval_first = j.at("eval_range").at(0).get<int>();
  cfg.eval_last = j.at("eval_range").at(1).get<int>();

  if (j.contains("threshold")) {
    const auto& t = j.at("threshold");
    expect_keys(t, {"policy", "value"}, "threshold");
    const std::string pol = str_at(t, "policy", "top-edges");
    if (pol == "top-edges") cfg.threshold.kind = ThresholdPolicy::Kind::TopEdges;
    else if (pol == "fixed") cfg.threshold.kind = ThresholdPolicy::Kind::Fixed;
    else throw ValidationError("config: threshold.policy must be top-edges|fixed");
    cfg.threshold.value = num_at(t, "value", 0.5);
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("config '" + path + "': " + e.what());
  }
  return parse_config(j);
}

// --- dataset preparation -----------------------------------------------------------

PreparedData prepare_dataset(const ExperimentConfig& cfg) {
  PreparedData out;
  if (cfg.dataset.kind == DatasetSpec::Kind::Synth) {
    out.seq = synth_drift_sbm(cfg.dataset.sbm);
    if (cfg.data_model == DataModel::Uesd) out.stream = flatten(out.seq);
  } else {
    EventStream stream = load_edge_list(cfg.dataset.path, cfg.dataset.schema, cfg.dataset.weighted);
    const double interval = cfg.has_resample ? cfg.resample_interval : 1.0;
    const Aggregation agg = cfg.has_resample ? cfg.resample_agg : Aggregation::Sum;
    out.seq = resample(stream, interval, agg);
    if (cfg.data_model == DataModel::Uesd) out.stream = std::move(stream);
  }
  if (!cfg.dataset.attributes_path.empty()) {
    out.attrs = load_matrix_csv(cfg.dataset.attributes_path);
    if (out.attrs->rows() != out.seq.nodes.n())
      throw ValidationError("attributes: row count does not match the node count");
  }
  return out;
}

// --- metric evaluation ---------------------------------------------------------------

namespace {

struct PairScore {
  int i, j;
  double s;
};

EdgeSet threshold_edges(const ScoreMatrix& scores, const ThresholdPolicy& policy,
                        int edge_budget) {
  const int n = scores.rows();
  std::vector<PairScore> ps;
  ps.reserve(std::size_t(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) ps.push_back({i, j, scores(i, j)});
  EdgeSet out;
  if (policy.kind == ThresholdPolicy::Kind::Fixed) {
    for (const auto& p : ps)
      if (p.s >= policy.value) out.push_back({p.i, p.j});
    return out;
  }
  // rank by score, ties broken by node-index order for reproducibility
  std::sort(ps.begin(), ps.end(), [](const PairScore& a, const PairScore& b) {
    if (a.s != b.s) return a.s > b.s;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });
  const int k = std::min<int>(edge_budget, int(ps.size()));
  out.reserve(std::size_t(k));
  for (int t = 0; t < k; ++t) out.push_back({ps[t].i, ps[t].j});
  return out;
}

}  // namespace

std::optional<double> evaluate_metric(const std::string& name, const ScoreMatrix& scores,
                                      const Snapshot& truth, const ThresholdPolicy& policy,
                                      int edge_budget) {
  const int n = truth.n();
  if (scores.rows() != n || scores.cols() != n)
    throw ValidationError("evaluate_metric: score/truth dimension mismatch");

  if (name == "auc") {
    std::vector<double> s;
    std::vector<int> y;
    s.reserve(std::size_t(n) * (n - 1) / 2);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        s.push_back(scores(i, j));
        y.push_back(truth.has_edge(i, j) ? 1 : 0);
      }
    try {
      return roc_auc(s, y);
    } catch (const UndefinedMetricError&) {
      return std::nullopt;
    }
  }
  if (name == "accuracy" || name == "f1") {
    PairUniverse u{n};
    EdgeSet t;
    for (const auto& e : truth.edges()) t.push_back({e.i, e.j});
    const EdgeSet pred = threshold_edges(scores, policy, edge_budget);
    const ConfusionCounts c = confusion(t, pred, u);
    try {
      return name == "accuracy" ? accuracy(c) : f1(c);
    } catch (const UndefinedMetricError&) {
      return std::nullopt;
    }
  }
  if (name == "rmse" || name == "mae" || name == "mlsd" || name == "mr") {
    DenseMat pred = scores;
    for (int i = 0; i < n; ++i) pred(i, i) = 0.0;
    const DenseMat a = truth.to_dense();
    if (name == "rmse") return rmse(a, pred);
    if (name == "mae") return mae(a, pred);
    if (name == "mlsd") return mlsd(a, pred);
    return mismatch_rate(a, pred);
  }
  throw ValidationError("unknown metric '" + name + "'");
}

// --- runners ----------------------------------------------------------------------------

namespace {

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

void check_bounds(const ExperimentConfig& cfg, int T) {
  if (cfg.eval_first < 1)
    throw ValidationError("eval_range: first step must be >= 1");
  if (!cfg.L_all && cfg.eval_first < cfg.L)
    throw ValidationError("eval_range: first step has fewer than L steps of history");
  if (cfg.eval_last + cfg.delta > T)
    throw ValidationError("eval_range: needs step " + std::to_string(cfg.eval_last + cfg.delta) +
                          " but the dataset has " + std::to_string(T));
}

RunReport empty_report(const ExperimentConfig& cfg) {
  RunReport r;
  r.config_echo = cfg.echo;
  return r;
}

std::optional<SummarizationKernel> kernel_for(const ExperimentConfig& cfg) {
  if (cfg.method == "exp-kernel" || cfg.method == "il-kernel" || cfg.method == "lin-kernel")
    return SummarizationKernel::from_string(cfg.method, cfg.kernel_theta);
  if (cfg.combine_kernel)
    return SummarizationKernel::from_string(cfg.combine_kernel_name, cfg.kernel_theta);
  return std::nullopt;
}

std::optional<SimilarityMeasure> measure_for(const ExperimentConfig& cfg) {
  if (cfg.method == "cn" || cfg.method == "jaccard" || cfg.method == "aa" ||
      cfg.method == "pa" || cfg.method == "sp" || cfg.method == "katz")
    return cfg.measure;
  return std::nullopt;
}

void sort_records(std::vector<RunRecord>& recs) {
  std::stable_sort(recs.begin(), recs.end(), [](const RunRecord& a, const RunRecord& b) {
    if (a.tau != b.tau) return a.tau < b.tau;
    if (a.metric != b.metric) return a.metric < b.metric;
    return a.horizon < b.horizon;
  });
}

void maybe_dump_scores(const ExperimentConfig& cfg, const ScoreMatrix& scores, int tau, int r) {
  if (cfg.dump_scores_dir.empty()) return;
  write_matrix_csv(scores, cfg.dump_scores_dir + "/scores_tau" + std::to_string(tau) + "_r" +
                               std::to_string(r) + ".csv");
}

}  // namespace

RunReport run_di(const ExperimentConfig& cfg) {
  const MethodInfo& info = method_info(cfg.method);
  if (info.paradigm != Paradigm::Di)
    throw ValidationError("run_di: method '" + cfg.method + "' is not a direct-inference method");
  if (cfg.delta != 1) throw ValidationError("run_di: direct inference predicts one step only");
  if (cfg.eval_first > cfg.eval_last) return empty_report(cfg);

  const PreparedData data = prepare_dataset(cfg);
  check_bounds(cfg, data.seq.length());

  const auto kernel = kernel_for(cfg);
  const auto measure = measure_for(cfg);

  RunReport report = empty_report(cfg);
  for (int tau = cfg.eval_first; tau <= cfg.eval_last; ++tau) {
    const int L_eff = cfg.L_all ? tau : cfg.L;
    const Window win = window(data.seq, tau, L_eff);
    const double t0 = now_ms();
    const ScoreMatrix scores = di_predict(win, kernel, measure);
    const Snapshot& truth = data.seq.at_step(tau + 1);
    const int budget = win.last().edge_count();
    const double ms = now_ms() - t0;
    maybe_dump_scores(cfg, scores, tau, 1);
    for (const auto& metric : cfg.metrics) {
      RunRecord rec;
      rec.tau = tau;
      rec.method = cfg.method;
      rec.metric = metric;
      rec.horizon = 1;
      rec.value = evaluate_metric(metric, scores, truth, cfg.threshold, budget);
      rec.ms = ms;
      report.records.push_back(std::move(rec));
    }
  }
  sort_records(report.records);
  return report;
}

namespace {

// One from-scratch prediction operation: fit on history <= tau, decode every
// horizon, evaluate, discard the model.
std::vector<RunRecord> run_oti_step(const ExperimentConfig& cfg, const PreparedData& data,
                                    int tau) {
  const std::uint64_t step_seed = mix_seed(cfg.seed, std::uint64_t(tau));
  const double t0 = now_ms();

  std::vector<ScoreMatrix> preds;
  preds.resize(std::size_t(cfg.delta));
  int budget = 0;
  if (cfg.method == "ctdne") {
    // history: events strictly before the end of bin tau
    const double cutoff = data.seq.origin + double(tau) * data.seq.interval;
    EventStream history;
    history.nodes = data.stream->nodes;
    for (const auto& ev : data.stream->events)
      if (ev.time < cutoff) history.events.push_back(ev);
    std::vector<std::pair<int, int>> pairs;
    const int n = history.nodes.n();
    pairs.reserve(std::size_t(n) * (n - 1) / 2);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    CtdnePipelineConfig pc = cfg.ctdne;
    pc.seed = step_seed;
    const ScoreMatrix sm = ctdne_predict(history, pairs, pc);
    for (int r = 0; r < cfg.delta; ++r) preds[std::size_t(r)] = sm;
    budget = data.seq.at_step(tau).edge_count();
  } else {
    const int L_eff = cfg.L_all ? tau : cfg.L;
    const Window win = window(data.seq, tau, L_eff);
    MfHyperParams p = cfg.mf;
    p.seed = step_seed;
    const FactorSet model = fit_mf(mf_method_from_string(cfg.method), win, p,
                                   data.attrs ? &*data.attrs : nullptr);
    for (int r = 1; r <= cfg.delta; ++r) preds[std::size_t(r - 1)] = mf_predict(model, r);
    budget = win.last().edge_count();
  }
  const double ms = now_ms() - t0;

  std::vector<RunRecord> records;
  for (int r = 1; r <= cfg.delta; ++r) {
    maybe_dump_scores(cfg, preds[std::size_t(r - 1)], tau, r);
    const Snapshot& truth = data.seq.at_step(tau + r);
    for (const auto& metric : cfg.metrics) {
      RunRecord rec;
      rec.tau = tau;
      rec.method = cfg.method;
      rec.metric = metric;
      rec.horizon = r;
      rec.value = evaluate_metric(metric, preds[std::size_t(r - 1)], truth, cfg.threshold, budget);
      rec.ms = ms;
      records.push_back(std::move(rec));
    }
  }
  return records;
}

}  // namespace

RunReport run_oti(const ExperimentConfig& cfg) {
  const MethodInfo& info = method_info(cfg.method);
  if (info.paradigm != Paradigm::Oti)
    throw ValidationError("run_oti: method '" + cfg.method + "' is not an OTI method");
  if (cfg.eval_first > cfg.eval_last) return empty_report(cfg);

  const PreparedData data = prepare_dataset(cfg);
  check_bounds(cfg, data.seq.length());
  if (cfg.method == "ctdne" && !data.stream)
    throw ValidationError("run_oti: ctdne needs the raw event stream");

  const int first = cfg.eval_first;
  const int steps = cfg.eval_last - first + 1;
  std::vector<std::vector<RunRecord>> per_tau;
  per_tau.resize(std::size_t(steps));
  std::exception_ptr failure;

  // Steps are independent by the from-scratch contract; per-step seeds keep the
  // result identical across thread counts. Exceptions must not unwind across
  // the parallel region, so the first one is captured and rethrown below.
#pragma omp parallel for schedule(dynamic)
  for (int s = 0; s < steps; ++s) {
    try {
      per_tau[std::size_t(s)] = run_oti_step(cfg, data, first + s);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  RunReport report = empty_report(cfg);
  for (auto& recs : per_tau)
    for (auto& r : recs) report.records.push_back(std::move(r));
  sort_records(report.records);
  return report;
}

RunReport run_experiment(const ExperimentConfig& cfg) {
  return method_info(cfg.method).paradigm == Paradigm::Di ? run_di(cfg) : run_oti(cfg);
}

// --- report emission -----------------------------------------------------------------

std::string report_csv_string(const RunReport& report) {
  std::string out = "tau,method,metric,horizon,value,ms\n";
  for (const auto& r : report.records) {
    out += std::to_string(r.tau);
    out += ',';
    out += r.method;
    out += ',';
    out += r.metric;
    out += ',';
    out += std::to_string(r.horizon);
    out += ',';
    out += r.value ? format_double(*r.value) : "undefined";
    out += ',';
    out += format_double(r.ms);
    out += '\n';
  }
  return out;
}

void emit_report_csv(const RunReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write report '" + path + "'");
  out << report_csv_string(report);
  if (!out) throw IoError("write failed for report '" + path + "'");
}

void emit_report_json(const RunReport& report, const std::string& path) {
  ordered_json j;
  j["toolkit_version"] = report.toolkit_version;
  j["config"] = report.config_echo;
  j["records"] = ordered_json::array();
  for (const auto& r : report.records) {
    ordered_json rec;
    rec["tau"] = r.tau;
    rec["method"] = r.method;
    rec["metric"] = r.metric;
    rec["horizon"] = r.horizon;
    if (r.value) rec["value"] = *r.value;
    else rec["value"] = nullptr;
    rec["ms"] = r.ms;
    j["records"].push_back(std::move(rec));
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write report '" + path + "'");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed for report '" + path + "'");
}

}  // namespace tlp
