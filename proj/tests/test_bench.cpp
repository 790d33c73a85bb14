#include <doctest.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "kkb/bench.hpp"
#include "kkb/error.hpp"
#include "kkb/topo_gen.hpp"
#include "support.hpp"

using namespace kkb;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig tiny(const std::filesystem::path& out) {
  ExperimentConfig c;
  c.node_counts = {60};
  c.degrees = {8};
  c.seeds_per_topology = 5;
  c.algorithms = {Algorithm::kKk};
  c.budget_secs = 0.2;
  c.clock = ClockMode::kWork;
  c.sample_interval_ms = 20.0;
  c.output_dir = out;
  return c;
}

Topology small_topology(std::uint64_t seed, std::size_t n = 80) {
  auto cfg = GenConfig::for_node_count(n, seed);
  cfg.target_degree = 8.0;
  cfg.e = 0.25;
  return generate_topology(cfg);
}

}  // namespace

TEST_CASE("algorithm names round trip") {
  for (Algorithm a : kAllAlgorithms) CHECK(parse_algorithm(to_string(a)) == a);
  CHECK(std::string(to_string(Algorithm::kKkMsDs)) == "kk-ms-ds");
  CHECK_THROWS_WITH_AS(parse_algorithm("spring"), doctest::Contains("unknown algorithm"), Error);
}

TEST_CASE("every algorithm runs and is scored") {
  const Topology topo = small_topology(3);
  for (Algorithm a : kAllAlgorithms) {
    CAPTURE(to_string(a));
    RunConfig rc;
    rc.algorithm = a;
    rc.run.clock = ClockMode::kWork;
    rc.run.budget_secs = 0.5;
    const RunOutput out = run_layout(topo, rc);
    REQUIRE(out.score);
    CHECK(out.result.layout.size() == topo.node_count());
    CHECK(out.score->counts.total() == topo.node_count());
    CHECK(std::isfinite(out.result.trace.samples.back().energy));
    CHECK_FALSE(std::isnan(out.result.trace.samples.back().sensitivity));
    const Metadata m = run_metadata(rc, out.result.trace);
    CHECK(m.at("algorithm") == to_string(a));
    CHECK(m.count("terminated_by") == 1);
    CHECK((m.count("k_percent") == 1) == (a == Algorithm::kKkMs || a == Algorithm::kKkMsDs));
  }
  CHECK_THROWS_AS(run_layout(Topology(1, {}), RunConfig{}), Error);
}

TEST_CASE("hop yardstick puts every engine on the plain KK energy") {
  const Topology topo = small_topology(5, 50);
  const auto model = build_distance_model(all_pairs_graph_distance(topo), 600.0, 1.0);
  for (Algorithm a : kAllAlgorithms) {
    RunConfig rc;
    rc.algorithm = a;
    rc.yardstick = EnergyYardstick::kHopCount;
    rc.ds_base = DsBaseModel::kHopCount;
    rc.run.clock = ClockMode::kWork;
    rc.run.budget_secs = 0.3;
    const RunOutput out = run_layout(topo, rc);
    CAPTURE(to_string(a));
    CHECK(testing::relative_error(out.result.trace.samples.back().energy,
                                  kk_energy(out.result.layout, model)) <= 1e-6);
  }
}

TEST_CASE("experiment config parsing") {
  std::istringstream in(
      "# desk run\n"
      "n = 100,200\n"
      "degrees=8\n"
      "algorithms=kk,kk-ms-ds\n"
      "k-percents=1,5\n"
      "budget=12.5\n"
      "seeds=2\n"
      "ds_base=hop\n"
      "clock=work\n"
      "workers=3\n"
      "out_dir=somewhere\n");
  const ExperimentConfig c = parse_experiment_config(in);
  CHECK(c.node_counts == std::vector<std::size_t>{100, 200});
  CHECK(c.degrees == std::vector<double>{8});
  CHECK(c.algorithms == std::vector<Algorithm>{Algorithm::kKk, Algorithm::kKkMsDs});
  CHECK(c.k_percents == std::vector<double>{1, 5});
  CHECK(c.budget_secs == 12.5);
  CHECK(c.seeds_per_topology == 2);
  CHECK(c.ds_base == DsBaseModel::kHopCount);
  CHECK(c.clock == ClockMode::kWork);
  CHECK(c.workers == 3);
  CHECK(c.output_dir == "somewhere");

  ExperimentConfig d;
  CHECK_THROWS_AS(d.set("colour", "blue"), Error);
  CHECK_THROWS_AS(d.set("budget", "soon"), Error);
  CHECK_THROWS_AS(d.set("algorithms", "kk,magic"), Error);
  std::istringstream no_eq("budget 3\n");
  CHECK_THROWS_WITH_AS(parse_experiment_config(no_eq), doctest::Contains("line 1"), Error);
  CHECK(ExperimentConfig::full_grid().node_counts.back() == 10000);
}

TEST_CASE("oversized grids are refused") {
  ExperimentConfig c;
  c.node_counts = {30000};
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("20000"), Error);
  c.node_counts = {100};
  c.budget_secs = -1;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("one topology, one algorithm, five seeds gives five rows") {
  const auto dir = testing::scratch_dir("bench_rows");
  const auto table = run_experiment(tiny(dir));
  REQUIRE(table.rows.size() == 5);
  std::set<std::uint64_t> seeds;
  for (const auto& r : table.rows) {
    CHECK_FALSE(r.failed);
    CHECK(r.topo_id == "n60-d8");
    CHECK(r.algo == "kk");
    seeds.insert(r.seed);
    const RunTrace t = read_trace_csv(dir / r.trace_path);
    CHECK_FALSE(t.samples.empty());
    CHECK(t.iterations == r.iterations);
  }
  CHECK(seeds.size() == 5);
  CHECK(std::filesystem::exists(dir / "topologies" / "n60-d8.topo"));
  const std::string csv = slurp(dir / "scores.csv");
  CHECK(csv.rfind("topo_id,algo,seed,elapsed_ms,sensitivity,specificity", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
}

TEST_CASE("work-clock experiments are byte-identical across runs and worker counts") {
  const auto a = testing::scratch_dir("bench_det_a");
  const auto b = testing::scratch_dir("bench_det_b");
  auto ca = tiny(a);
  ca.algorithms = {Algorithm::kKk, Algorithm::kFr, Algorithm::kKkMs};
  ca.k_percents = {5, 10};
  ca.seeds_per_topology = 2;
  auto cb = ca;
  cb.output_dir = b;
  cb.workers = 3;
  run_experiment(ca);
  run_experiment(cb);
  CHECK(slurp(a / "scores.csv") == slurp(b / "scores.csv"));
  CHECK(slurp(a / "traces" / "n60-d8__kk-ms@10__s1.csv") ==
        slurp(b / "traces" / "n60-d8__kk-ms@10__s1.csv"));
}

TEST_CASE("adding an algorithm leaves the other rows untouched") {
  auto c1 = tiny(testing::scratch_dir("bench_add_1"));
  c1.seeds_per_topology = 2;
  auto c2 = c1;
  c2.output_dir = testing::scratch_dir("bench_add_2");
  c2.algorithms = {Algorithm::kDh, Algorithm::kKk};
  const auto t1 = run_experiment(c1);
  const auto t2 = run_experiment(c2);
  std::vector<const ResultRow*> kk_rows;
  for (const auto& r : t2.rows)
    if (r.algo == "kk") kk_rows.push_back(&r);
  REQUIRE(kk_rows.size() == t1.rows.size());
  for (std::size_t i = 0; i < kk_rows.size(); ++i) {
    CHECK(kk_rows[i]->seed == t1.rows[i].seed);
    CHECK(kk_rows[i]->energy == t1.rows[i].energy);
    CHECK(kk_rows[i]->iterations == t1.rows[i].iterations);
  }
}

TEST_CASE("wall-clock runs respect the budget") {
  auto c = tiny(testing::scratch_dir("bench_wall"));
  c.node_counts = {300};
  c.seeds_per_topology = 1;
  c.algorithms = {Algorithm::kKk, Algorithm::kDh};
  c.clock = ClockMode::kWall;
  c.budget_secs = 0.5;
  const auto table = run_experiment(c);
  for (const auto& r : table.rows) {
    CHECK_FALSE(r.failed);
    CHECK(r.elapsed_ms <= 1.1 * c.budget_secs * 1000.0);
  }
}

TEST_CASE("unreadable topologies become failed rows") {
  const auto topo_dir = testing::scratch_dir("bench_bad_topos");
  write_topology(small_topology(9, 40), topo_dir / "good.topo");
  std::ofstream(topo_dir / "broken.topo") << "NODES 2\nEDGE 0 7 -50\n";
  auto c = tiny(testing::scratch_dir("bench_bad_out"));
  c.topology_dir = topo_dir;
  c.seeds_per_topology = 2;
  std::size_t reported = 0;
  const auto table = run_experiment(c, [&](const BenchProgress& p) {
    CHECK(p.total == 4);
    reported = std::max(reported, p.done);
  });
  CHECK(reported == 4);
  REQUIRE(table.rows.size() == 4);
  std::size_t failed = 0;
  for (const auto& r : table.rows) {
    if (r.topo_id == "broken") {
      CHECK(r.failed);
      CHECK_FALSE(r.error.empty());
      ++failed;
    } else {
      CHECK_FALSE(r.failed);
    }
  }
  CHECK(failed == 2);
  const std::string csv = slurp(c.output_dir / "scores.csv");
  CHECK(csv.find("failed: ") != std::string::npos);
}

TEST_CASE("seeds derive from the master seed and the topology") {
  CHECK(run_seed(1, "n100-d8", 0) == run_seed(1, "n100-d8", 0));
  CHECK(run_seed(1, "n100-d8", 0) != run_seed(1, "n100-d8", 1));
  CHECK(run_seed(1, "n100-d8", 0) != run_seed(2, "n100-d8", 0));
  CHECK(run_seed(1, "n100-d8", 0) != run_seed(1, "n100-d6", 0));
  CHECK(topology_seed(1, "a") != topology_seed(1, "b"));
}

TEST_CASE("racing an algorithm against itself gives a ratio near one") {
  const Topology topo = small_topology(11, 120);
  RunConfig rc;
  rc.algorithm = Algorithm::kKk;
  rc.run.budget_secs = 1.0;
  rc.run.sample_interval_ms = 5.0;
  const RaceResult race = energy_race(topo, rc, rc);
  CHECK(race.ratio >= 0.5);
  CHECK(race.ratio <= 2.0);
  CHECK(race.target_energy == race.a.end_energy);
  CHECK_FALSE(race.a.censored);

  rc.run.clock = ClockMode::kWork;
  const RaceResult exact = energy_race(topo, rc, rc);
  CHECK(exact.ratio == 1.0);
  CHECK(exact.a.time_ms == exact.b.time_ms);
}

TEST_CASE("race edge cases") {
  const Topology topo = small_topology(13, 60);
  RunConfig a;
  a.algorithm = Algorithm::kKk;
  a.run.clock = ClockMode::kWork;
  a.run.budget_secs = 0.2;
  RunConfig b = a;
  b.algorithm = Algorithm::kKkMsDs;

  const RaceResult inf = energy_race(topo, a, b, std::numeric_limits<double>::infinity());
  CHECK(inf.a.time_ms == 0.0);
  CHECK(inf.b.time_ms == 0.0);
  CHECK(inf.ratio == 1.0);

  const RaceResult never = energy_race(topo, a, b, -1.0);
  CHECK(never.a.censored);
  CHECK(never.b.censored);
  CHECK(never.a.time_ms == doctest::Approx(200.0));
  CHECK(never.ratio == doctest::Approx(1.0));

  CHECK_THROWS_AS(energy_race(topo, a, b, std::nan("")), Error);

  RunTrace t;
  t.samples = {{0, 10, 0, 0, 0}, {5, 4, 0, 0, 0}, {9, 1, 0, 0, 0}};
  CHECK(first_crossing(t, 4.0) == 5.0);
  CHECK(first_crossing(t, 50.0) == 0.0);
  CHECK_FALSE(first_crossing(t, 0.5));
}
