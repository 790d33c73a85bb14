#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "kkb/kkb.h"

namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const char* name) {
  auto dir = fs::temp_directory_path() / (std::string("kkb_capi_") + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

kkb_topology* make_topology(size_t n, uint64_t seed) {
  kkb_gen_config cfg;
  kkb_gen_config_default(n, seed, &cfg);
  cfg.target_degree = 8.0;
  cfg.e = 0.25;
  kkb_topology* topo = nullptr;
  REQUIRE(kkb_topology_generate(&cfg, &topo) == KKB_OK);
  return topo;
}

kkb_run_config quick(kkb_algorithm algo) {
  kkb_run_config rc;
  kkb_run_config_default(&rc);
  rc.algorithm = algo;
  rc.clock = KKB_CLOCK_WORK;
  rc.budget_secs = 0.3;
  return rc;
}

}  // namespace

TEST_CASE("status names and defaults") {
  CHECK(std::strcmp(kkb_status_name(KKB_OK), "ok") == 0);
  CHECK(std::strlen(kkb_status_name(KKB_ERR_PARSE)) > 0);
  kkb_run_config rc;
  kkb_run_config_default(&rc);
  CHECK(rc.budget_secs == 60.0);
  CHECK(rc.k_percent == 5.0);
  CHECK(rc.epsilon_r == doctest::Approx(0.1));
  CHECK(rc.alpha_factor == doctest::Approx(1.5));
  kkb_gen_config g;
  kkb_gen_config_default(100, 1, &g);
  CHECK(g.delta == doctest::Approx(0.17));
  CHECK(g.gamma == doctest::Approx(0.07));
}

TEST_CASE("algorithm names") {
  kkb_algorithm a;
  CHECK(kkb_algorithm_parse("kk-ms-ds", &a) == KKB_OK);
  CHECK(a == KKB_ALGO_KK_MS_DS);
  CHECK(std::strcmp(kkb_algorithm_name(KKB_ALGO_FR), "fr") == 0);
  CHECK(kkb_algorithm_parse("nope", &a) == KKB_ERR_INVALID_ARGUMENT);
  CHECK(std::string(kkb_last_error()).find("nope") != std::string::npos);
  CHECK(kkb_algorithm_parse(nullptr, &a) == KKB_ERR_INVALID_ARGUMENT);
}

TEST_CASE("generate, lay out, detect and score") {
  const auto dir = fresh_dir("pipeline");
  kkb_topology* topo = make_topology(90, 4);
  CHECK(kkb_topology_node_count(topo) == 90);
  CHECK(kkb_topology_edge_count(topo) > 0);
  CHECK(kkb_topology_has_truth(topo));
  REQUIRE(kkb_topology_write(topo, (dir / "t.topo").c_str()) == KKB_OK);
  kkb_topology* again = nullptr;
  REQUIRE(kkb_topology_read((dir / "t.topo").c_str(), &again) == KKB_OK);
  CHECK(kkb_topology_edge_count(again) == kkb_topology_edge_count(topo));

  const kkb_run_config rc = quick(KKB_ALGO_KK_MS_DS);
  kkb_layout* layout = nullptr;
  kkb_trace* trace = nullptr;
  REQUIRE(kkb_layout_run(again, &rc, &layout, &trace) == KKB_OK);
  CHECK(kkb_layout_node_count(layout) == 90);
  double x = NAN, y = NAN;
  CHECK(kkb_layout_position(layout, 5, &x, &y) == KKB_OK);
  CHECK(std::isfinite(x));
  CHECK(kkb_layout_position(layout, 90, &x, &y) == KKB_ERR_INVALID_ARGUMENT);

  REQUIRE(kkb_trace_sample_count(trace) > 0);
  kkb_trace_sample s;
  CHECK(kkb_trace_sample_at(trace, 0, &s) == KKB_OK);
  CHECK(std::isfinite(s.energy));
  CHECK(kkb_trace_sample_at(trace, 1u << 30, &s) == KKB_ERR_INVALID_ARGUMENT);
  CHECK(std::strlen(kkb_trace_termination(trace)) > 0);
  CHECK(kkb_trace_write(trace, (dir / "trace.csv").c_str()) == KKB_OK);

  CHECK(kkb_layout_write(layout, (dir / "l.txt").c_str()) == KKB_OK);
  kkb_layout* read_back = nullptr;
  REQUIRE(kkb_layout_read((dir / "l.txt").c_str(), &read_back) == KKB_OK);
  double x2 = 0, y2 = 0;
  kkb_layout_position(read_back, 5, &x2, &y2);
  CHECK(x2 == x);
  CHECK(y2 == y);

  kkb_labels* pred = nullptr;
  kkb_labels* truth = nullptr;
  REQUIRE(kkb_detect_boundary(read_back, again, 1.5, &pred) == KKB_OK);
  REQUIRE(kkb_labels_from_truth(again, &truth) == KKB_OK);
  CHECK(kkb_labels_count(pred) == 90);
  kkb_score score;
  REQUIRE(kkb_score_labels(pred, truth, &score) == KKB_OK);
  CHECK(score.tp + score.fp + score.tn + score.fn == 90);
  CHECK(score.sensitivity >= 0.0);
  CHECK(score.sensitivity <= 1.0);

  CHECK(kkb_labels_write(pred, (dir / "p.csv").c_str()) == KKB_OK);
  kkb_labels* pred2 = nullptr;
  REQUIRE(kkb_labels_read((dir / "p.csv").c_str(), &pred2) == KKB_OK);
  for (size_t i = 0; i < 90; ++i) REQUIRE(kkb_labels_get(pred2, i) == kkb_labels_get(pred, i));

  kkb_labels_free(pred2);
  kkb_labels_free(pred);
  kkb_labels_free(truth);
  kkb_layout_free(read_back);
  kkb_layout_free(layout);
  kkb_trace_free(trace);
  kkb_topology_free(again);
  kkb_topology_free(topo);
}

TEST_CASE("errors carry codes and messages") {
  kkb_topology* topo = nullptr;
  CHECK(kkb_topology_read("/nonexistent/x.topo", &topo) == KKB_ERR_IO);
  CHECK(topo == nullptr);
  CHECK(std::strlen(kkb_last_error()) > 0);

  const auto dir = fresh_dir("errors");
  std::ofstream(dir / "bad.topo") << "NODES 3\nEDGE 0 1 -50\n";
  const kkb_status st = kkb_topology_read((dir / "bad.topo").c_str(), &topo);
  CHECK(st != KKB_OK);

  kkb_gen_config cfg;
  kkb_gen_config_default(1, 1, &cfg);
  CHECK(kkb_topology_generate(&cfg, &topo) != KKB_OK);
  CHECK(kkb_topology_generate(nullptr, &topo) == KKB_ERR_INVALID_ARGUMENT);

  kkb_topology* a = make_topology(40, 2);
  kkb_topology* b = make_topology(50, 2);
  kkb_labels* la = nullptr;
  kkb_labels* lb = nullptr;
  kkb_labels_from_truth(a, &la);
  kkb_labels_from_truth(b, &lb);
  kkb_score score;
  CHECK(kkb_score_labels(la, lb, &score) == KKB_ERR_MISMATCH);
  kkb_labels_free(la);
  kkb_labels_free(lb);
  kkb_topology_free(a);
  kkb_topology_free(b);

  kkb_topology_free(nullptr);
  kkb_layout_free(nullptr);
  kkb_trace_free(nullptr);
  kkb_labels_free(nullptr);
  kkb_experiment_free(nullptr);
}

TEST_CASE("experiments through the C interface") {
  const auto dir = fresh_dir("experiment");
  kkb_experiment* ex = nullptr;
  REQUIRE(kkb_experiment_create(0, &ex) == KKB_OK);
  CHECK(kkb_experiment_set(ex, "n", "40") == KKB_OK);
  CHECK(kkb_experiment_set(ex, "degrees", "8") == KKB_OK);
  CHECK(kkb_experiment_set(ex, "algorithms", "kk,fr") == KKB_OK);
  CHECK(kkb_experiment_set(ex, "seeds", "2") == KKB_OK);
  CHECK(kkb_experiment_set(ex, "budget", "0.1") == KKB_OK);
  CHECK(kkb_experiment_set(ex, "clock", "work") == KKB_OK);
  CHECK(kkb_experiment_set(ex, "out_dir", dir.c_str()) == KKB_OK);
  CHECK(kkb_experiment_set(ex, "bogus", "1") == KKB_ERR_INVALID_ARGUMENT);

  std::ofstream(dir / "cfg.txt") << "seeds=3\n";
  CHECK(kkb_experiment_load(ex, (dir / "cfg.txt").c_str()) == KKB_OK);

  size_t calls = 0;
  kkb_bench_summary summary{};
  auto progress = [](size_t, size_t total, const char* topo, const char* algo, const char* error,
                     void* user) {
    CHECK(total == 6);
    CHECK(std::string(topo) == "n40-d8");
    CHECK(algo != nullptr);
    CHECK(error == nullptr);
    ++*static_cast<size_t*>(user);
  };
  REQUIRE(kkb_experiment_run(ex, progress, &calls, &summary) == KKB_OK);
  CHECK(summary.rows == 6);
  CHECK(summary.failed == 0);
  CHECK(calls == 6);
  CHECK(fs::exists(dir / "scores.csv"));
  kkb_experiment_free(ex);
}

TEST_CASE("energy race through the C interface") {
  kkb_topology* topo = make_topology(60, 7);
  const kkb_run_config a = quick(KKB_ALGO_KK);
  kkb_run_config b = quick(KKB_ALGO_KK_MS_DS);
  b.ds_base = KKB_DS_HOP_COUNT;
  kkb_race_result r;
  REQUIRE(kkb_energy_race(topo, &a, &b, NAN, &r) == KKB_OK);
  CHECK(r.target_energy == r.a.end_energy);
  CHECK(r.ratio > 0.0);
  REQUIRE(kkb_energy_race(topo, &a, &b, INFINITY, &r) == KKB_OK);
  CHECK(r.ratio == 1.0);
  kkb_topology_free(topo);
}

TEST_CASE("suite generation writes one file per node count") {
  const auto dir = fresh_dir("suite");
  kkb_suite_summary s{};
  REQUIRE(kkb_suite_generate(10, 14, 1, dir.c_str(), &s) == KKB_OK);
  CHECK(s.topologies == 5);
  CHECK(fs::exists(dir / "n10.topo"));
  CHECK(fs::exists(dir / "n14.topo"));
  CHECK(kkb_suite_generate(20, 10, 1, dir.c_str(), &s) == KKB_ERR_INVALID_ARGUMENT);
}
