#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "tlp/bench.hpp"
#include "tlp/error.hpp"

using namespace tlp;
using nlohmann::ordered_json;

namespace {

ordered_json base_synth_config() {
  return ordered_json::parse(R"({
    "version": 1,
    "seed": 11,
    "data_model": "essd",
    "dataset": {"kind": "synth-drift-sbm", "n": 24, "k": 2, "p_in": 0.5, "p_out": 0.05,
                 "migrate": 0.05, "steps": 10, "weighted": false, "seed": 3},
    "L": 3,
    "delta": 1,
    "method": "grnmf",
    "hyperparams": {"d": 4, "alpha": 0.1, "theta": 0.5, "iters": 40, "tol": 1e-9},
    "metrics": ["auc"],
    "eval_range": [4, 6]
  })");
}

std::string write_config(const ordered_json& j, const std::string& name) {
  const std::string path = "/tmp/tlp_cfg_" + name + ".json";
  std::ofstream out(path);
  out << j.dump(2);
  return path;
}

std::string write_constant_edge_list() {
  // the same 5 edges over 6 steps, on 7 nodes
  const std::string path = "/tmp/tlp_bench_constant.txt";
  std::ofstream out(path);
  for (int t = 1; t <= 6; ++t) {
    out << "n0 n1 " << t << "\n"
        << "n1 n2 " << t << "\n"
        << "n2 n3 " << t << "\n"
        << "n4 n5 " << t << "\n"
        << "n0 n6 " << t << "\n";
  }
  return path;
}

std::vector<double> record_values(const RunReport& r) {
  std::vector<double> v;
  for (const auto& rec : r.records) v.push_back(rec.value ? *rec.value : -1.0);
  return v;
}

}  // namespace

TEST_CASE("catalog lists exactly the seventeen supported methods") {
  const auto& cat = list_methods();
  CHECK(cat.size() == 17);
  const MethodInfo& ctdne = method_info("ctdne");
  CHECK(ctdne.data_model == DataModel::Uesd);
  CHECK_FALSE(ctdne.weighted_links);
  const MethodInfo& grnmf = method_info("grnmf");
  CHECK(grnmf.weighted_links);
  CHECK(grnmf.paradigm == Paradigm::Oti);
  CHECK_THROWS_AS(method_info("nope"), ValidationError);
}

TEST_CASE("unknown config keys are hard errors") {
  auto j = base_synth_config();
  j["bogus"] = 1;
  CHECK_THROWS_AS(parse_config(j), ValidationError);

  auto j2 = base_synth_config();
  j2["hyperparams"]["beta"] = 0.5;  // grnmf takes no beta
  CHECK_THROWS_AS(parse_config(j2), ValidationError);

  auto j3 = base_synth_config();
  j3["dataset"]["typo"] = true;
  CHECK_THROWS_AS(parse_config(j3), ValidationError);
}

TEST_CASE("config validation catches structural mistakes") {
  auto no_version = base_synth_config();
  no_version.erase("version");
  CHECK_THROWS_AS(parse_config(no_version), ValidationError);

  auto bad_metric = base_synth_config();
  bad_metric["metrics"] = {"auc", "nonsense"};
  CHECK_THROWS_AS(parse_config(bad_metric), ValidationError);

  auto multi_step_one = base_synth_config();
  multi_step_one["delta"] = 2;  // grnmf decodes one step
  CHECK_THROWS_AS(parse_config(multi_step_one), ValidationError);

  auto uesd_without_resample = base_synth_config();
  uesd_without_resample["data_model"] = "uesd";
  CHECK_THROWS_AS(parse_config(uesd_without_resample), ValidationError);
}

TEST_CASE("paradigm mismatch is rejected before any work") {
  auto j = base_synth_config();
  j["method"] = "tlsi";
  j["hyperparams"] = {{"d", 4}};
  const ExperimentConfig cfg = parse_config(j);
  CHECK_THROWS_AS(run_di(cfg), ValidationError);

  auto j2 = base_synth_config();
  j2["method"] = "exp-kernel";
  j2["hyperparams"] = {{"theta", 1.0}};
  CHECK_THROWS_AS(run_oti(parse_config(j2)), ValidationError);
}

TEST_CASE("empty eval range yields an empty report with the config echo") {
  auto j = base_synth_config();
  j["eval_range"] = {5, 4};
  const RunReport r = run_experiment(parse_config(j));
  CHECK(r.records.empty());
  CHECK(r.config_echo == j);
  const std::string csv = report_csv_string(r);
  CHECK(csv == "tau,method,metric,horizon,value,ms\n");
}

TEST_CASE("eval range bounds are validated against the dataset") {
  auto j = base_synth_config();
  j["eval_range"] = {4, 10};  // needs step 11 of 10
  CHECK_THROWS_AS(run_experiment(parse_config(j)), ValidationError);
  auto j2 = base_synth_config();
  j2["eval_range"] = {2, 6};  // L=3 needs tau >= 3
  CHECK_THROWS_AS(run_experiment(parse_config(j2)), ValidationError);
}

TEST_CASE("constant sequence with the exponential kernel scores AUC 1 everywhere") {
  const std::string data = write_constant_edge_list();
  ordered_json j = ordered_json::parse(R"({
    "version": 1,
    "seed": 1,
    "data_model": "essd",
    "dataset": {"kind": "file", "path": ")" + data + R"(", "columns": "src,dst,time"},
    "L": "all",
    "method": "exp-kernel",
    "hyperparams": {"theta": 1.0},
    "metrics": ["auc", "accuracy", "f1"],
    "eval_range": [1, 5]
  })");
  const RunReport r = run_experiment(parse_config(j));
  REQUIRE(r.records.size() == 15);
  for (const auto& rec : r.records) {
    REQUIRE(rec.value.has_value());
    CHECK(*rec.value == 1.0);  // perfect ranking, perfect top-|E| thresholding
  }
}

TEST_CASE("di run with a similarity measure refined by a kernel") {
  auto j = base_synth_config();
  j["method"] = "cn";
  j["hyperparams"] = {{"kernel", "exp-kernel"}, {"kernel_theta", 0.6}};
  j["metrics"] = {"auc"};
  const RunReport r = run_experiment(parse_config(j));
  CHECK(r.records.size() == 3);
  for (const auto& rec : r.records) CHECK(rec.metric == "auc");
}

TEST_CASE("weighted metrics flow through a kernel run") {
  auto j = base_synth_config();
  j["dataset"]["weighted"] = true;
  j["method"] = "exp-kernel";
  j["hyperparams"] = {{"theta", 0.7}};
  j["metrics"] = {"rmse", "mae", "mlsd", "mr"};
  const RunReport r = run_experiment(parse_config(j));
  REQUIRE(r.records.size() == 12);
  for (const auto& rec : r.records) {
    REQUIRE(rec.value.has_value());
    CHECK(*rec.value >= 0.0);
  }
}

TEST_CASE("tmf with delta 3 emits one record per horizon") {
  auto j = base_synth_config();
  j["method"] = "tmf";
  j["delta"] = 3;
  j["hyperparams"] = {{"d", 3}, {"h", 1},      {"theta", 0.4},
                      {"iters", 60}, {"tol", 1e-10}, {"learning_rate", 1e-4}};
  j["eval_range"] = {4, 5};
  const RunReport r = run_experiment(parse_config(j));
  REQUIRE(r.records.size() == 6);  // 2 steps x 3 horizons x 1 metric
  int seen[4] = {0, 0, 0, 0};
  for (const auto& rec : r.records) {
    REQUIRE(rec.horizon >= 1);
    REQUIRE(rec.horizon <= 3);
    ++seen[rec.horizon];
  }
  CHECK(seen[1] == 2);
  CHECK(seen[2] == 2);
  CHECK(seen[3] == 2);
}

TEST_CASE("oti runs are deterministic and state-isolated") {
  auto j = base_synth_config();
  j["eval_range"] = {4, 6};
  const ExperimentConfig cfg = parse_config(j);
  const RunReport a = run_oti(cfg);
  const RunReport b = run_oti(cfg);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    REQUIRE(a.records[i].value.has_value());
    CHECK(*a.records[i].value == *b.records[i].value);  // bitwise
  }
  // from-scratch contract: each step alone reproduces its record exactly
  for (int tau = 4; tau <= 6; ++tau) {
    auto js = base_synth_config();
    js["eval_range"] = {tau, tau};
    const RunReport s = run_oti(parse_config(js));
    REQUIRE(s.records.size() == 1);
    for (const auto& rec : a.records)
      if (rec.tau == tau) CHECK(*rec.value == *s.records[0].value);
  }
}

TEST_CASE("temporal hygiene: steps beyond tau cannot influence a record") {
  // two files sharing steps 1..3 exactly, wildly different afterwards
  const std::string clean = "/tmp/tlp_bench_clean.txt";
  const std::string poisoned = "/tmp/tlp_bench_poisoned.txt";
  {
    std::ofstream c(clean), p(poisoned);
    for (int t = 1; t <= 3; ++t)
      for (int e = 0; e < 6; ++e) {
        const int a = (e * 2 + t) % 9, b = (e * 3 + 2 * t + 1) % 9;
        if (a == b) continue;
        c << "v" << a << " v" << b << " " << t << "\n";
        p << "v" << a << " v" << b << " " << t << "\n";
      }
    for (int t = 4; t <= 6; ++t)
      for (int a = 0; a < 9; ++a)
        for (int b = a + 1; b < 9; ++b) {
          c << "v" << a << " v" << b << " " << t << "\n";
          // the poisoned future is the empty graph instead of the clique
        }
    p << "v0 v1 6\n";  // keep the poisoned file the same length in steps
  }
  auto make = [&](const std::string& path) {
    ordered_json j = ordered_json::parse(R"({
      "version": 1,
      "seed": 5,
      "data_model": "essd",
      "dataset": {"kind": "file", "path": ")" + path + R"(", "columns": "src,dst,time"},
      "L": 2,
      "method": "deepeye",
      "hyperparams": {"d": 3, "theta": 0.6, "iters": 30, "tol": 1e-9},
      "metrics": ["auc", "rmse"],
      "eval_range": [2, 2]
    })");
    return parse_config(j);
  };
  const RunReport ra = run_oti(make(clean));
  const RunReport rb = run_oti(make(poisoned));
  REQUIRE(ra.records.size() == rb.records.size());
  for (std::size_t i = 0; i < ra.records.size(); ++i)
    CHECK(*ra.records[i].value == *rb.records[i].value);
}

TEST_CASE("ctdne runs end to end through the harness") {
  ordered_json j = ordered_json::parse(R"({
    "version": 1,
    "seed": 21,
    "data_model": "uesd",
    "dataset": {"kind": "synth-drift-sbm", "n": 16, "k": 2, "p_in": 0.5, "p_out": 0.03,
                 "migrate": 0.0, "steps": 6, "weighted": false, "seed": 9},
    "resample": {"interval": 1.0, "aggregation": "binary"},
    "L": "all",
    "method": "ctdne",
    "hyperparams": {"d": 8, "walk_k": 5, "walks_per_node": 6, "context_window": 2,
                     "negatives": 2, "epochs": 2, "strategy": "hadamard"},
    "metrics": ["auc"],
    "eval_range": [4, 5]
  })");
  const ExperimentConfig cfg = parse_config(j);
  const RunReport a = run_oti(cfg);
  const RunReport b = run_oti(cfg);
  REQUIRE(a.records.size() == 2);
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    REQUIRE(a.records[i].value.has_value());
    CHECK(*a.records[i].value == *b.records[i].value);
  }
  // an essd dataset must be rejected for ctdne
  auto bad = j;
  bad["data_model"] = "essd";
  CHECK_THROWS_AS(parse_config(bad), ValidationError);
}

TEST_CASE("csv reports: sentinel, ordering, re-emission stability") {
  RunReport r;
  r.config_echo = ordered_json::object();
  r.records.push_back({5, "grnmf", "f1", 1, std::nullopt, 2.0});
  r.records.push_back({4, "grnmf", "auc", 1, 0.75, 1.0});
  std::sort(r.records.begin(), r.records.end(),
            [](const RunRecord& a, const RunRecord& b) { return a.tau < b.tau; });
  const std::string csv = report_csv_string(r);
  std::istringstream is(csv);
  std::string line;
  std::getline(is, line);
  CHECK(line == "tau,method,metric,horizon,value,ms");
  std::getline(is, line);
  CHECK(line == "4,grnmf,auc,1,0.75,1");
  std::getline(is, line);
  CHECK(line == "5,grnmf,f1,1,undefined,2");

  emit_report_csv(r, "/tmp/tlp_report_a.csv");
  emit_report_csv(r, "/tmp/tlp_report_b.csv");
  std::ifstream fa("/tmp/tlp_report_a.csv"), fb("/tmp/tlp_report_b.csv");
  std::stringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  CHECK(sa.str() == sb.str());

  emit_report_json(r, "/tmp/tlp_report.json");
  std::ifstream fj("/tmp/tlp_report.json");
  const ordered_json parsed = ordered_json::parse(fj);
  CHECK(parsed.at("records").size() == 2);
  CHECK(parsed.at("records").at(1).at("value").is_null());
}

TEST_CASE("crjmf consumes static attributes from a CSV") {
  const std::string attrs = "/tmp/tlp_bench_attrs.csv";
  {
    std::ofstream out(attrs);
    for (int i = 0; i < 24; ++i) out << (i % 2) << "," << (i % 3) << "\n";
  }
  auto j = base_synth_config();
  j["dataset"]["attributes"] = attrs;
  j["method"] = "crjmf";
  j["hyperparams"] = {{"d", 3}, {"alpha", 0.2}, {"beta", 0.1},
                      {"theta", 0.6}, {"iters", 30}, {"tol", 1e-8}};
  const RunReport r = run_experiment(parse_config(j));
  CHECK(r.records.size() == 3);
  for (const auto& rec : r.records) CHECK(rec.value.has_value());

  // row-count mismatch surfaces before fitting
  {
    std::ofstream out(attrs);
    out << "1,2\n";
  }
  CHECK_THROWS_AS(run_experiment(parse_config(j)), ValidationError);
}

TEST_CASE("records only carry configured metrics") {
  auto j = base_synth_config();
  j["metrics"] = {"auc", "mr"};
  const RunReport r = run_experiment(parse_config(j));
  for (const auto& rec : r.records)
    CHECK((rec.metric == "auc" || rec.metric == "mr"));
}

TEST_CASE("grnmf smoke run on a 60-node drifting SBM stays in budget") {
  ordered_json j = ordered_json::parse(R"({
    "version": 1,
    "seed": 8,
    "data_model": "essd",
    "dataset": {"kind": "synth-drift-sbm", "n": 60, "k": 3, "p_in": 0.25, "p_out": 0.02,
                 "migrate": 0.05, "steps": 20, "weighted": false, "seed": 12},
    "L": 3,
    "method": "grnmf",
    "hyperparams": {"d": 8, "alpha": 0.1, "theta": 0.5, "iters": 100, "tol": 1e-8},
    "metrics": ["auc"],
    "eval_range": [3, 19]
  })");
  const auto t0 = std::chrono::steady_clock::now();
  const RunReport r = run_experiment(parse_config(j));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(secs < 60.0);
  REQUIRE(r.records.size() == 17);  // one AUC record per step
  for (const auto& rec : r.records) {
    REQUIRE(rec.value.has_value());
    CHECK(*rec.value > 0.5);  // drift is mild, communities persist
  }
}

TEST_CASE("L=all grows the window with tau") {
  auto j = base_synth_config();
  j["L"] = "all";
  j["eval_range"] = {1, 4};  // tau=1 works because L tracks tau
  const RunReport r = run_experiment(parse_config(j));
  CHECK(r.records.size() == 4);
}

namespace {

std::string strip_ms_column(const std::string& path) {
  std::ifstream in(path);
  std::string line, out;
  while (std::getline(in, line)) {
    const auto cut = line.rfind(',');
    out += line.substr(0, cut);
    out += '\n';
  }
  return out;
}

}  // namespace

TEST_CASE("cli round trip: validate, run, exit codes") {
  const std::string good = write_config(base_synth_config(), "good");
  auto broken = base_synth_config();
  broken["surprise"] = true;
  const std::string bad = write_config(broken, "bad");

  CHECK(std::system(("./tlpbench validate-config " + good + " > /dev/null").c_str()) == 0);
  const int rc_bad = std::system(("./tlpbench validate-config " + bad + " 2> /dev/null").c_str());
  CHECK(WEXITSTATUS(rc_bad) == 2);
  const int rc_missing =
      std::system("./tlpbench run -c /tmp/tlp_no_such_config.json 2> /dev/null");
  CHECK(WEXITSTATUS(rc_missing) == 1);
  CHECK(std::system(("./tlpbench run -c " + good + " -o /tmp/tlp_cli_report.csv").c_str()) == 0);
  std::ifstream in("/tmp/tlp_cli_report.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "tau,method,metric,horizon,value,ms");
  int lines = 0;
  std::string dummy;
  while (std::getline(in, dummy)) ++lines;
  CHECK(lines == 3);
}

TEST_CASE("cli reports do not depend on the thread count") {
  const std::string good = write_config(base_synth_config(), "threads");
  CHECK(std::system(("OMP_NUM_THREADS=1 ./tlpbench run -c " + good +
                     " -o /tmp/tlp_cli_t1.csv").c_str()) == 0);
  CHECK(std::system(("OMP_NUM_THREADS=2 ./tlpbench run -c " + good +
                     " -o /tmp/tlp_cli_t2.csv").c_str()) == 0);
  CHECK(strip_ms_column("/tmp/tlp_cli_t1.csv") == strip_ms_column("/tmp/tlp_cli_t2.csv"));
}

TEST_CASE("cli synth and convert feed back into a run") {
  CHECK(std::system("./tlpbench synth -o /tmp/tlp_cli_synth.txt --n 18 --k 2 --p-in 0.5 "
                    "--p-out 0.05 --steps 8 --seed 4 --nodes-out /tmp/tlp_cli_nodes.csv "
                    "> /dev/null") == 0);
  std::ifstream nodes("/tmp/tlp_cli_nodes.csv");
  std::string line;
  std::getline(nodes, line);
  CHECK(line == "index,label");

  CHECK(std::system("./tlpbench convert -i /tmp/tlp_cli_synth.txt -o /tmp/tlp_cli_conv.txt "
                    "--columns src,dst,time --interval 2.0 --aggregation sum > /dev/null") == 0);

  ordered_json j = ordered_json::parse(R"({
    "version": 1,
    "seed": 2,
    "data_model": "essd",
    "dataset": {"kind": "file", "path": "/tmp/tlp_cli_conv.txt",
                 "columns": "src,dst,weight,time", "weighted": true},
    "L": 2,
    "method": "exp-kernel",
    "hyperparams": {"theta": 0.8},
    "metrics": ["auc", "rmse"],
    "eval_range": [2, 3]
  })");
  const std::string cfg = write_config(j, "converted");
  CHECK(std::system(("./tlpbench run -c " + cfg + " -o /tmp/tlp_cli_conv_report.csv").c_str()) ==
        0);
  std::ifstream rep("/tmp/tlp_cli_conv_report.csv");
  int lines = 0;
  while (std::getline(rep, line)) ++lines;
  CHECK(lines == 5);  // header + 2 steps x 2 metrics
}
