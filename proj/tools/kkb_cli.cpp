#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kkb/kkb.h"

namespace {

// Carries a failing status out of a subcommand.
struct CliFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(kkb_status status, const std::string& context) {
  if (status != KKB_OK) {
    throw CliFailure(context + ": " + kkb_status_name(status) + ": " + kkb_last_error());
  }
}

template <typename T, void (*Free)(T*)>
struct Handle {
  T* ptr = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(ptr); }
  T** out() { return &ptr; }
  T* get() const { return ptr; }
};

using Topology = Handle<kkb_topology, kkb_topology_free>;
using LayoutH = Handle<kkb_layout, kkb_layout_free>;
using TraceH = Handle<kkb_trace, kkb_trace_free>;
using Labels = Handle<kkb_labels, kkb_labels_free>;
using Experiment = Handle<kkb_experiment, kkb_experiment_free>;

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

kkb_algorithm algorithm_from(const std::string& name) {
  kkb_algorithm a;
  check(kkb_algorithm_parse(name.c_str(), &a), "--algo");
  return a;
}

const std::vector<std::string> kAlgoNames = {"kk", "fr", "dh", "kk-ss", "kk-ms", "kk-ms-ds"};

// Options shared by `layout` and `race`.
struct RunFlags {
  double budget_secs = 60.0;
  std::uint64_t seed = 1;
  double k_percent = 5.0;
  double epsilon_r = 0.1;
  double alpha_factor = 1.5;
  std::string clock = "wall";
  double sample_ms = 100.0;
  bool incremental = false;
  std::string ds_base = "ss";
  std::string energy = "own";

  void attach(CLI::App* app) {
    app->add_option("--budget-secs", budget_secs, "Run budget in seconds")->check(CLI::NonNegativeNumber);
    app->add_option("--seed", seed, "Seed for the random initial placement");
    app->add_option("--k-percent", k_percent, "Selection size for kk-ms and kk-ms-ds, percent")
        ->check(CLI::Range(0.0, 100.0));
    app->add_option("--epsilon-r", epsilon_r, "Stability threshold for kk-ms-ds");
    app->add_option("--alpha-factor", alpha_factor, "Alpha over mean edge length for scoring")
        ->check(CLI::PositiveNumber);
    app->add_option("--clock", clock, "Run clock")->check(CLI::IsMember({"wall", "work"}));
    app->add_option("--sample-ms", sample_ms, "Trace sampling interval")->check(CLI::PositiveNumber);
    app->add_flag("--incremental", incremental, "Incremental gradient upkeep for plain kk");
    app->add_option("--ds-base", ds_base, "Distance model for kk-ms-ds")
        ->check(CLI::IsMember({"ss", "hop"}));
    app->add_option("--energy", energy, "Trace energy: each engine's own, or the hop-count KK energy")
        ->check(CLI::IsMember({"own", "hop"}));
  }

  kkb_run_config config(kkb_algorithm algorithm) const {
    kkb_run_config c;
    kkb_run_config_default(&c);
    c.algorithm = algorithm;
    c.seed = seed;
    c.budget_secs = budget_secs;
    c.clock = clock == "work" ? KKB_CLOCK_WORK : KKB_CLOCK_WALL;
    c.sample_interval_ms = sample_ms;
    c.k_percent = k_percent;
    c.epsilon_r = epsilon_r;
    c.alpha_factor = alpha_factor;
    c.incremental = incremental ? 1 : 0;
    c.ds_base = ds_base == "hop" ? KKB_DS_HOP_COUNT : KKB_DS_SIGNAL_STRENGTH;
    c.yardstick = energy == "hop" ? KKB_ENERGY_HOP_COUNT : KKB_ENERGY_OWN;
    return c;
  }
};

void bench_progress(size_t done, size_t total, const char* topo, const char* algo,
                    const char* error, void*) {
  if (error) {
    std::fprintf(stderr, "[%zu/%zu] %s %s failed: %s\n", done, total, topo, algo, error);
  } else {
    std::fprintf(stderr, "[%zu/%zu] %s %s\n", done, total, topo, algo);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Force-directed layouts for boundary detection in ad hoc networks"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a random network topology");
  std::size_t gen_n = 100;
  double gen_degree = 0.0, gen_gamma = -1.0, gen_delta = -1.0, gen_e = 1.0, gen_gamma_b = 0.7;
  double gen_alpha = 1.5;
  std::uint64_t gen_seed = 1;
  bool gen_holes = false;
  std::string gen_out;
  gen->add_option("--n", gen_n, "Number of nodes")->required()->check(CLI::PositiveNumber);
  auto* degree_opt = gen->add_option("--degree", gen_degree, "Target average degree");
  auto* gamma_opt = gen->add_option("--gamma", gen_gamma, "Communication radius (unit-square fraction)");
  degree_opt->excludes(gamma_opt);
  gen->add_option("--delta", gen_delta, "Clustering radius scale");
  gen->add_option("--e", gen_e, "Fraction of uniformly placed nodes")->check(CLI::Range(0.0, 1.0));
  gen->add_option("--gamma-b", gen_gamma_b, "Edge acceptance probability");
  gen->add_option("--alpha-factor", gen_alpha, "Ground-truth alpha over mean edge length");
  gen->add_flag("--holes", gen_holes, "Also label hole perimeters as boundary");
  gen->add_option("--seed", gen_seed, "Generator seed");
  gen->add_option("--out", gen_out, "Output topology file")->required();

  // suite
  auto* suite = app.add_subcommand("suite", "Generate the small evaluation suite");
  std::size_t suite_from = 10, suite_to = 1000;
  std::uint64_t suite_seed = 1;
  std::string suite_dir;
  suite->add_option("--from", suite_from, "Smallest node count");
  suite->add_option("--to", suite_to, "Largest node count");
  suite->add_option("--seed", suite_seed, "Suite seed");
  suite->add_option("--out-dir", suite_dir, "Directory for n<count>.topo files")->required();

  // layout
  auto* layout = app.add_subcommand("layout", "Lay out a topology with one engine");
  std::string layout_algo, layout_topo, layout_out, layout_trace;
  RunFlags layout_flags;
  layout->add_option("--algo", layout_algo, "Engine")->required()->check(CLI::IsMember(kAlgoNames));
  layout->add_option("--topo", layout_topo, "Topology file")->required();
  layout->add_option("--out-layout", layout_out, "Layout output file");
  layout->add_option("--out-trace", layout_trace, "Trace CSV output file");
  layout_flags.attach(layout);

  // detect
  auto* detect = app.add_subcommand("detect", "Predict boundary nodes from a layout");
  std::string detect_layout, detect_topo, detect_out;
  double detect_alpha = 1.5;
  detect->add_option("--layout", detect_layout, "Layout file")->required();
  detect->add_option("--topo", detect_topo, "Topology file")->required();
  detect->add_option("--alpha-factor", detect_alpha, "Alpha over mean layout edge length")
      ->check(CLI::PositiveNumber);
  detect->add_option("--out", detect_out, "Label CSV output file")->required();

  // eval
  auto* eval = app.add_subcommand("eval", "Score predicted labels against ground truth");
  std::string eval_pred, eval_topo, eval_out;
  eval->add_option("--pred", eval_pred, "Predicted label CSV")->required();
  eval->add_option("--truth-from-topo", eval_topo, "Topology file carrying ground truth")->required();
  eval->add_option("--out", eval_out, "Score CSV output file (default stdout)");

  // bench
  auto* bench = app.add_subcommand("bench", "Run an experiment grid");
  std::string bench_config, bench_out, bench_n, bench_degrees, bench_algos, bench_k, bench_clock,
      bench_topo_dir, bench_ds_base;
  unsigned bench_workers = 1;
  std::size_t bench_seeds = 0;
  double bench_budget = 0.0, bench_e = -1.0;
  std::uint64_t bench_seed = 0;
  bool bench_full = false, bench_layouts = false;
  bench->add_option("--config", bench_config, "key=value config file");
  bench->add_option("--workers", bench_workers, "Parallel runs")->check(CLI::PositiveNumber);
  bench->add_option("--out-dir", bench_out, "Output directory");
  bench->add_flag("--full", bench_full, "Node counts 500 to 10000");
  bench->add_option("--n", bench_n, "Comma-separated node counts");
  bench->add_option("--degrees", bench_degrees, "Comma-separated average degrees");
  bench->add_option("--algorithms", bench_algos, "Comma-separated engines");
  bench->add_option("--k-percents", bench_k, "Comma-separated kk-ms selection sizes");
  bench->add_option("--seeds", bench_seeds, "Runs per topology");
  bench->add_option("--budget-secs", bench_budget, "Budget per run");
  bench->add_option("--e", bench_e, "Fraction of uniformly placed nodes");
  bench->add_option("--seed", bench_seed, "Master seed");
  bench->add_option("--clock", bench_clock, "Run clock")->check(CLI::IsMember({"wall", "work"}));
  bench->add_option("--ds-base", bench_ds_base, "Distance model for kk-ms-ds")
      ->check(CLI::IsMember({"ss", "hop"}));
  bench->add_option("--topo-dir", bench_topo_dir, "Use the .topo files in this directory");
  bench->add_flag("--write-layouts", bench_layouts, "Also write final layouts");

  // race
  auto* race = app.add_subcommand("race", "Compare how fast two engines reach an energy");
  std::string race_topo, race_a, race_b;
  double race_target = std::numeric_limits<double>::quiet_NaN();
  RunFlags race_flags;
  race_flags.ds_base = "hop";
  race_flags.energy = "hop";
  race_flags.sample_ms = 10.0;
  race->add_option("--topo", race_topo, "Topology file")->required();
  race->add_option("--a", race_a, "First engine (sets the default target)")
      ->required()->check(CLI::IsMember(kAlgoNames));
  race->add_option("--b", race_b, "Second engine")->required()->check(CLI::IsMember(kAlgoNames));
  race->add_option("--target-energy", race_target, "Energy to reach (default: a's final energy)");
  race_flags.attach(race);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      kkb_gen_config c;
      kkb_gen_config_default(gen_n, gen_seed, &c);
      if (gen_delta > 0.0) c.delta = gen_delta;
      if (gen_gamma > 0.0) c.gamma = gen_gamma;
      if (gen_degree > 0.0) c.target_degree = gen_degree;
      c.e = gen_e;
      c.gamma_b = gen_gamma_b;
      c.alpha_factor = gen_alpha;
      c.holes = gen_holes ? 1 : 0;
      Topology t;
      check(kkb_topology_generate(&c, t.out()), "gen");
      check(kkb_topology_write(t.get(), gen_out.c_str()), "gen");
      const double n = static_cast<double>(kkb_topology_node_count(t.get()));
      std::printf("nodes=%zu edges=%zu average_degree=%s\n", kkb_topology_node_count(t.get()),
                  kkb_topology_edge_count(t.get()),
                  fmt(2.0 * static_cast<double>(kkb_topology_edge_count(t.get())) / n).c_str());
    } else if (suite->parsed()) {
      kkb_suite_summary s;
      check(kkb_suite_generate(suite_from, suite_to, suite_seed, suite_dir.c_str(), &s), "suite");
      std::printf("topologies=%zu average_degree=%s\n", s.topologies, fmt(s.average_degree).c_str());
    } else if (layout->parsed()) {
      Topology t;
      check(kkb_topology_read(layout_topo.c_str(), t.out()), "--topo");
      const kkb_run_config c = layout_flags.config(algorithm_from(layout_algo));
      LayoutH l;
      TraceH tr;
      check(kkb_layout_run(t.get(), &c, l.out(), tr.out()), "layout");
      if (!layout_out.empty()) check(kkb_layout_write(l.get(), layout_out.c_str()), "--out-layout");
      if (!layout_trace.empty()) check(kkb_trace_write(tr.get(), layout_trace.c_str()), "--out-trace");
      kkb_trace_sample last;
      check(kkb_trace_sample_at(tr.get(), kkb_trace_sample_count(tr.get()) - 1, &last), "trace");
      std::printf("algo=%s terminated_by=%s iterations=%llu elapsed_ms=%s energy=%s",
                  layout_algo.c_str(), kkb_trace_termination(tr.get()),
                  static_cast<unsigned long long>(kkb_trace_iterations(tr.get())),
                  fmt(last.elapsed_ms).c_str(), fmt(last.energy).c_str());
      if (kkb_topology_has_truth(t.get())) {
        Labels pred, truth;
        check(kkb_detect_boundary(l.get(), t.get(), c.alpha_factor, pred.out()), "detect");
        check(kkb_labels_from_truth(t.get(), truth.out()), "truth");
        kkb_score s;
        check(kkb_score_labels(pred.get(), truth.get(), &s), "score");
        std::printf(" sensitivity=%s specificity=%s", fmt(s.sensitivity).c_str(),
                    fmt(s.specificity).c_str());
      }
      std::printf("\n");
    } else if (detect->parsed()) {
      Topology t;
      LayoutH l;
      Labels pred;
      check(kkb_topology_read(detect_topo.c_str(), t.out()), "--topo");
      check(kkb_layout_read(detect_layout.c_str(), l.out()), "--layout");
      check(kkb_detect_boundary(l.get(), t.get(), detect_alpha, pred.out()), "detect");
      check(kkb_labels_write(pred.get(), detect_out.c_str()), "--out");
      std::size_t count = 0;
      for (std::size_t i = 0; i < kkb_labels_count(pred.get()); ++i) count += kkb_labels_get(pred.get(), i) == 1;
      std::printf("nodes=%zu boundary=%zu\n", kkb_labels_count(pred.get()), count);
    } else if (eval->parsed()) {
      Topology t;
      Labels pred, truth;
      check(kkb_labels_read(eval_pred.c_str(), pred.out()), "--pred");
      check(kkb_topology_read(eval_topo.c_str(), t.out()), "--truth-from-topo");
      check(kkb_labels_from_truth(t.get(), truth.out()), "--truth-from-topo");
      kkb_score s;
      check(kkb_score_labels(pred.get(), truth.get(), &s), "eval");
      std::string csv = "tp,fp,tn,fn,sensitivity,specificity,tpr,fnr\n";
      csv += std::to_string(s.tp) + ',' + std::to_string(s.fp) + ',' + std::to_string(s.tn) + ',' +
             std::to_string(s.fn) + ',' + fmt(s.sensitivity) + ',' + fmt(s.specificity) + ',' +
             fmt(s.tpr) + ',' + fmt(s.fnr) + '\n';
      if (eval_out.empty()) {
        std::fputs(csv.c_str(), stdout);
      } else {
        FILE* f = std::fopen(eval_out.c_str(), "w");
        if (!f) throw CliFailure("--out: cannot write " + eval_out);
        std::fputs(csv.c_str(), f);
        std::fclose(f);
      }
    } else if (bench->parsed()) {
      Experiment e;
      check(kkb_experiment_create(bench_full ? 1 : 0, e.out()), "bench");
      if (!bench_config.empty()) check(kkb_experiment_load(e.get(), bench_config.c_str()), "--config");
      auto set = [&](const char* key, const std::string& value) {
        check(kkb_experiment_set(e.get(), key, value.c_str()), std::string("--") + key);
      };
      if (bench_full) set("full", "1");
      if (!bench_n.empty()) set("n", bench_n);
      if (!bench_degrees.empty()) set("degrees", bench_degrees);
      if (!bench_algos.empty()) set("algorithms", bench_algos);
      if (!bench_k.empty()) set("k_percents", bench_k);
      if (bench_seeds > 0) set("seeds", std::to_string(bench_seeds));
      if (bench_budget > 0.0) set("budget_secs", fmt(bench_budget));
      if (bench_e >= 0.0) set("e", fmt(bench_e));
      if (bench_seed > 0) set("seed", std::to_string(bench_seed));
      if (!bench_clock.empty()) set("clock", bench_clock);
      if (!bench_ds_base.empty()) set("ds_base", bench_ds_base);
      if (!bench_topo_dir.empty()) set("topology_dir", bench_topo_dir);
      if (bench_layouts) set("write_layouts", "1");
      if (!bench_out.empty()) set("out_dir", bench_out);
      if (bench->count("--workers") > 0) set("workers", std::to_string(bench_workers));
      kkb_bench_summary s;
      check(kkb_experiment_run(e.get(), bench_progress, nullptr, &s), "bench");
      std::printf("rows=%zu failed=%zu\n", s.rows, s.failed);
    } else if (race->parsed()) {
      Topology t;
      check(kkb_topology_read(race_topo.c_str(), t.out()), "--topo");
      kkb_run_config a = race_flags.config(algorithm_from(race_a));
      kkb_run_config b = race_flags.config(algorithm_from(race_b));
      a.trace_detection = b.trace_detection = 0;
      kkb_race_result r;
      check(kkb_energy_race(t.get(), &a, &b, race_target, &r), "race");
      std::printf("target_energy=%s\n", fmt(r.target_energy).c_str());
      std::printf("a=%s time_ms=%s censored=%d end_energy=%s iterations=%llu\n", race_a.c_str(),
                  fmt(r.a.time_ms).c_str(), r.a.censored, fmt(r.a.end_energy).c_str(),
                  static_cast<unsigned long long>(r.a.iterations));
      std::printf("b=%s time_ms=%s censored=%d end_energy=%s iterations=%llu\n", race_b.c_str(),
                  fmt(r.b.time_ms).c_str(), r.b.censored, fmt(r.b.end_energy).c_str(),
                  static_cast<unsigned long long>(r.b.iterations));
      std::printf("ratio=%s\n", fmt(r.ratio).c_str());
    }
  } catch (const CliFailure& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 1;
  }
  return 0;
}
