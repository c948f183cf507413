// Command-line front end: configuration-driven benchmark runs plus dataset
// utilities (synthesis, UESD->ESSD conversion, config validation).

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "tlp/bench.hpp"
#include "tlp/error.hpp"
#include "tlp/graph.hpp"
#include "tlp/io.hpp"
#include "tlp/synth.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitValidation = 2;

int cmd_run(const std::string& config_path, long long seed_override, bool has_seed,
            const std::string& out_path, const std::string& format,
            const std::string& scores_dir) {
  tlp::ExperimentConfig cfg = tlp::load_config(config_path);
  if (has_seed) {
    cfg.seed = std::uint64_t(seed_override);
    cfg.mf.seed = cfg.seed;
    cfg.ctdne.seed = cfg.seed;
    cfg.echo["seed"] = seed_override;
  }
  cfg.dump_scores_dir = scores_dir;
  tlp::RunReport report = tlp::run_experiment(cfg);
  if (out_path.empty()) {
    std::fputs(tlp::report_csv_string(report).c_str(), stdout);
  } else if (format == "json") {
    tlp::emit_report_json(report, out_path);
  } else {
    tlp::emit_report_csv(report, out_path);
  }
  return kExitOk;
}

int cmd_methods() {
  std::printf("%-12s %-6s %-9s %-8s %-6s %-6s %s\n", "method", "model", "paradigm", "weights",
              "L", "delta", "hyperparams");
  for (const auto& m : tlp::list_methods()) {
    std::string hp;
    for (const auto& h : m.hyperparams) {
      if (!hp.empty()) hp += ",";
      hp += h;
    }
    std::printf("%-12s %-6s %-9s %-8s %-6s %-6s %s\n", m.name.c_str(),
                m.data_model == tlp::DataModel::Essd ? "essd" : "uesd",
                m.paradigm == tlp::Paradigm::Di ? "di" : "oti",
                m.weighted_links ? "able" : "unable", m.window.c_str(), m.delta.c_str(),
                hp.c_str());
  }
  return kExitOk;
}

int cmd_synth(const tlp::DriftSbmParams& params, const std::string& out_path,
              const std::string& nodes_out) {
  const tlp::SnapshotSequence seq = tlp::synth_drift_sbm(params);
  const tlp::EventStream stream = tlp::flatten(seq);
  tlp::write_edge_list(stream, out_path, params.weighted);
  if (!nodes_out.empty()) tlp::write_node_table_csv(seq.nodes, nodes_out);
  std::printf("wrote %zu events over %d steps to %s\n", stream.events.size(), seq.length(),
              out_path.c_str());
  return kExitOk;
}

int cmd_convert(const std::string& in_path, const std::string& out_path,
                const std::string& columns, bool weighted, double interval,
                const std::string& agg, const std::string& nodes_out) {
  const tlp::ColumnSchema schema =
      columns.empty() ? (weighted ? tlp::ColumnSchema{} : tlp::ColumnSchema::unweighted())
                      : tlp::ColumnSchema::from_string(columns);
  const tlp::EventStream stream = tlp::load_edge_list(in_path, schema, weighted);
  const tlp::SnapshotSequence seq =
      tlp::resample(stream, interval, tlp::aggregation_from_string(agg));
  tlp::write_edge_list(tlp::flatten(seq), out_path, true);
  if (!nodes_out.empty()) tlp::write_node_table_csv(seq.nodes, nodes_out);
  std::printf("resampled %zu events into %d snapshots (%s)\n", stream.events.size(),
              seq.length(), out_path.c_str());
  return kExitOk;
}

int cmd_validate(const std::string& config_path) {
  tlp::load_config(config_path);
  std::printf("%s: OK\n", config_path.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"temporal link prediction benchmark toolkit"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "execute one configured experiment");
  std::string run_config, run_out, run_format = "csv", run_scores;
  long long run_seed = 0;
  bool run_has_seed = false;
  run->add_option("-c,--config", run_config, "experiment config (JSON)")->required();
  run->add_option("-o,--out", run_out, "report path (stdout when omitted)");
  run->add_option("-f,--format", run_format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  auto* seed_opt = run->add_option("--seed", run_seed, "override the config seed");
  run->add_option("--dump-scores", run_scores, "directory for per-step score matrices");

  // methods
  auto* methods = app.add_subcommand("methods", "print the method catalog");

  // synth
  auto* synth = app.add_subcommand("synth", "generate a drifting-SBM edge list");
  tlp::DriftSbmParams sp;
  std::string synth_out, synth_nodes;
  long long synth_seed = 0;
  synth->add_option("-o,--out", synth_out, "output edge list")->required();
  synth->add_option("--n", sp.n, "node count");
  synth->add_option("--k", sp.k, "communities");
  synth->add_option("--p-in", sp.p_in, "intra-community edge probability");
  synth->add_option("--p-out", sp.p_out, "inter-community edge probability");
  synth->add_option("--migrate", sp.migrate, "per-step migration probability");
  synth->add_option("--steps", sp.steps, "snapshot count");
  synth->add_flag("--weighted", sp.weighted, "draw weights uniform in [1,10]");
  synth->add_option("--seed", synth_seed, "generator seed");
  synth->add_option("--nodes-out", synth_nodes, "node table CSV");

  // convert
  auto* convert = app.add_subcommand("convert", "resample a UESD edge list onto a regular grid");
  std::string cv_in, cv_out, cv_cols, cv_agg = "sum", cv_nodes;
  bool cv_weighted = false;
  double cv_interval = 1.0;
  convert->add_option("-i,--in", cv_in, "input edge list")->required();
  convert->add_option("-o,--out", cv_out, "output edge list (snapshot mid-bin timestamps)")
      ->required();
  convert->add_option("--columns", cv_cols, "column order, e.g. src,dst,weight,time");
  convert->add_flag("--weighted", cv_weighted, "input carries a weight column");
  convert->add_option("--interval", cv_interval, "bin width");
  convert->add_option("--aggregation", cv_agg, "sum, last or binary")
      ->check(CLI::IsMember({"sum", "last", "binary"}));
  convert->add_option("--nodes-out", cv_nodes, "node table CSV");

  // validate-config
  auto* validate = app.add_subcommand("validate-config", "parse and validate a config");
  std::string val_config;
  validate->add_option("config", val_config, "experiment config (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    run_has_seed = seed_opt->count() > 0;
    if (run->parsed()) return cmd_run(run_config, run_seed, run_has_seed, run_out, run_format, run_scores);
    if (methods->parsed()) return cmd_methods();
    if (synth->parsed()) {
      sp.seed = std::uint64_t(synth_seed);
      return cmd_synth(sp, synth_out, synth_nodes);
    }
    if (convert->parsed())
      return cmd_convert(cv_in, cv_out, cv_cols, cv_weighted, cv_interval, cv_agg, cv_nodes);
    if (validate->parsed()) return cmd_validate(val_config);
  } catch (const tlp::ValidationError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return kExitValidation;
  } catch (const tlp::ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return kExitValidation;
  } catch (const tlp::BoundsError& e) {
    std::fprintf(stderr, "bounds error: %s\n", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitOk;
}
