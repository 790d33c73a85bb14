#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "kkb/error.hpp"
#include "kkb/kk.hpp"
#include "kkb/layout.hpp"
#include "support.hpp"

using namespace kkb;

TEST_CASE("layout text round trip keeps every bit") {
  Rng rng(173);
  for (int trial = 0; trial < 20; ++trial) {
    auto layout = testing::random_positions(1 + rng.below(50), 600.0, rng);
    layout.frame = {rng.uniform(10.0, 900.0), rng.uniform(10.0, 900.0)};
    std::stringstream buf;
    format_layout(layout, buf, {{"algorithm", "fr"}});
    Metadata meta;
    const Layout back = parse_layout(buf, &meta);
    REQUIRE(back.positions == layout.positions);
    REQUIRE(back.frame.width == layout.frame.width);
    REQUIRE(back.frame.height == layout.frame.height);
    REQUIRE(meta.at("algorithm") == "fr");
    REQUIRE(meta.count("frame") == 0);
  }
}

TEST_CASE("layout files round trip") {
  const auto dir = testing::scratch_dir("layout_io");
  Rng rng(179);
  const auto layout = testing::random_positions(12, 600.0, rng);
  write_layout(layout, dir / "l.txt", {{"seed", "4"}});
  Metadata meta;
  CHECK(read_layout(dir / "l.txt", &meta).positions == layout.positions);
  CHECK(meta.at("seed") == "4");
  CHECK_THROWS_AS(read_layout(dir / "none.txt"), Error);
}

TEST_CASE("malformed layouts are reported with their line") {
  auto parse = [](const char* text) {
    std::istringstream in(text);
    return parse_layout(in);
  };
  CHECK_THROWS_WITH_AS(parse("POS 0 1 2\n"), doctest::Contains("line 1"), Error);
  CHECK_THROWS_WITH_AS(parse("LAYOUT 2\nPOS 0 1 2\n"), doctest::Contains("every node"), Error);
  CHECK_THROWS_WITH_AS(parse("LAYOUT 1\nPOS 0 1 x\n"), doctest::Contains("line 2"), Error);
  CHECK_THROWS_AS(parse("LAYOUT 1\nPOS 3 1 1\n"), Error);
  CHECK_THROWS_AS(parse("LAYOUT 1\nPOS 0 1 1\nPOS 0 1 1\n"), Error);
  CHECK_THROWS_AS(parse("LAYOUT 1\nLAYOUT 1\n"), Error);
  CHECK_THROWS_AS(parse("LAYOUT 1\nPOS 0 inf 1\n"), Error);
  CHECK_THROWS_AS(parse("LAYOUT 1\nEDGE 0 1\n"), Error);
  CHECK_THROWS_AS(parse(""), Error);
  CHECK(parse("# note\nLAYOUT 1\n\nPOS 0 -1.5 2e3 # trailing\n").positions[0] == Point2{-1.5, 2000});
}

TEST_CASE("trace CSV round trip") {
  const auto dir = testing::scratch_dir("trace_io");
  RunTrace trace;
  trace.samples = {{0.0, 1234.5, 0.5, 0.75, 0},
                   {100.0, 99.25, std::nan(""), std::nan(""), 3},
                   {250.5, 1.0, 1.0, 0.0, 9}};
  trace.terminated_by = Termination::kStable;
  trace.iterations = 42;
  write_trace_csv(trace, dir / "t.csv");
  const RunTrace back = read_trace_csv(dir / "t.csv");
  REQUIRE(back.samples.size() == 3);
  CHECK(back.samples[0].energy == 1234.5);
  CHECK(back.samples[2].elapsed_ms == 250.5);
  CHECK(std::isnan(back.samples[1].sensitivity));
  CHECK(back.samples[0].specificity == 0.75);
  CHECK(back.terminated_by == Termination::kStable);
  CHECK(back.iterations == 42);

  std::ofstream(dir / "bad.csv") << "time,energy\n";
  CHECK_THROWS_AS(read_trace_csv(dir / "bad.csv"), Error);
  std::ofstream(dir / "bad2.csv") << "elapsed_ms,energy,sensitivity,specificity\n1,2,3\n";
  CHECK_THROWS_AS(read_trace_csv(dir / "bad2.csv"), Error);
}

TEST_CASE("work clock counts charged pair operations") {
  RunOptions opt;
  opt.clock = ClockMode::kWork;
  opt.budget_secs = 1.0;
  opt.work_per_ms = 1000.0;
  RunClock clock(opt);
  CHECK(clock.elapsed_ms() == 0.0);
  clock.charge(500);
  CHECK(clock.elapsed_ms() == doctest::Approx(0.5));
  CHECK_FALSE(clock.exhausted());
  clock.charge(1'000'000);
  CHECK(clock.exhausted());

  opt.budget_secs = -1.0;
  CHECK_THROWS_AS(RunClock{opt}, Error);
}

TEST_CASE("paused wall time is not counted") {
  RunOptions opt;
  opt.budget_secs = 10.0;
  RunClock clock(opt);
  {
    RunClock::Pause pause(clock);
    std::this_thread::sleep_for(std::chrono::milliseconds(60));
  }
  CHECK(clock.elapsed_ms() < 30.0);
}

TEST_CASE("recorder keeps sample times strictly increasing") {
  RunOptions opt;
  opt.clock = ClockMode::kWork;
  opt.work_per_ms = 1.0;
  opt.sample_interval_ms = 5.0;
  RunClock clock(opt);
  TraceRecorder rec(clock, opt, {});
  Layout layout;
  layout.positions = {{0, 0}};
  for (int i = 0; i < 100; ++i) {
    if (rec.due()) rec.record(layout, 100.0 - i, i);
    clock.charge(i % 3);
  }
  const RunTrace trace = rec.finish(layout, 0.0, 100, Termination::kEpsilon);
  REQUIRE(trace.samples.size() > 5);
  for (std::size_t i = 1; i < trace.samples.size(); ++i)
    REQUIRE(trace.samples[i].elapsed_ms > trace.samples[i - 1].elapsed_ms);
  CHECK(trace.samples.back().energy == 0.0);
  CHECK(trace.iterations == 100);
}

TEST_CASE("energy probe replaces the engine energy in samples") {
  const Topology topo(3, {{0, 1, -50}, {1, 2, -50}});
  const auto model = build_distance_model(all_pairs_graph_distance(topo), 600.0, 1.0);
  KkParams p;
  p.run.clock = ClockMode::kWork;
  p.run.energy_probe = [](const Layout& l) { return -static_cast<double>(l.size()); };
  const auto res = kk_layout(topo, model, p);
  for (const auto& s : res.trace.samples) CHECK(s.energy == -3.0);
}

TEST_CASE("random layouts fill the centred frame") {
  const Layout l = random_layout(500, {200, 100}, 8);
  CHECK(l.frame.width == 200);
  for (const auto& p : l.positions) {
    REQUIRE(std::abs(p.x) <= 100);
    REQUIRE(std::abs(p.y) <= 50);
  }
  CHECK(random_layout(500, {200, 100}, 8).positions == l.positions);
  CHECK(random_layout(500, {200, 100}, 9).positions != l.positions);
}
