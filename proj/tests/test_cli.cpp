#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#ifndef KKB_CLI_PATH
#error "KKB_CLI_PATH must name the kkb executable"
#endif

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
};

// Runs the CLI with stderr folded into the captured output.
Outcome kkb(const std::string& args) {
  const std::string cmd = std::string("\"") + KKB_CLI_PATH + "\" " + args + " 2>&1";
  Outcome o;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe)) o.out += buf;
  const int status = pclose(pipe);
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return o;
}

fs::path fresh_dir(const char* name) {
  auto dir = fs::temp_directory_path() / (std::string("kkb_cli_") + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST_CASE("help lists every subcommand") {
  const auto o = kkb("--help");
  CHECK(o.code == 0);
  for (const char* sub : {"gen", "suite", "layout", "detect", "eval", "bench", "race"})
    CHECK(o.out.find(sub) != std::string::npos);
}

TEST_CASE("generate, lay out, detect and evaluate from the command line") {
  const auto dir = fresh_dir("pipeline");
  auto o = kkb("gen --n 70 --degree 8 --e 0.25 --seed 5 --out " + q(dir / "t.topo"));
  REQUIRE(o.code == 0);
  CHECK(o.out.find("nodes=70") != std::string::npos);

  o = kkb("layout --algo kk-ms-ds --topo " + q(dir / "t.topo") +
          " --budget-secs 0.3 --clock work --seed 2 --k-percent 5 --epsilon-r 0.1 --out-layout " +
          q(dir / "l.txt") + " --out-trace " + q(dir / "tr.csv"));
  REQUIRE(o.code == 0);
  CHECK(slurp(dir / "l.txt").find("# algorithm=kk-ms-ds") != std::string::npos);
  CHECK(slurp(dir / "tr.csv").rfind("elapsed_ms,energy,sensitivity,specificity\n", 0) == 0);

  o = kkb("detect --layout " + q(dir / "l.txt") + " --topo " + q(dir / "t.topo") +
          " --alpha-factor 1.5 --out " + q(dir / "p.csv"));
  REQUIRE(o.code == 0);
  CHECK(slurp(dir / "p.csv").find("node,boundary") != std::string::npos);

  o = kkb("eval --pred " + q(dir / "p.csv") + " --truth-from-topo " + q(dir / "t.topo") +
          " --out " + q(dir / "score.csv"));
  REQUIRE(o.code == 0);
  const std::string score = slurp(dir / "score.csv");
  CHECK(score.rfind("tp,fp,tn,fn,sensitivity,specificity,tpr,fnr\n", 0) == 0);
}

TEST_CASE("work-clock layouts are reproducible") {
  const auto dir = fresh_dir("repro");
  REQUIRE(kkb("gen --n 50 --degree 8 --seed 1 --out " + q(dir / "t.topo")).code == 0);
  for (const char* name : {"a.txt", "b.txt"}) {
    REQUIRE(kkb("layout --algo fr --topo " + q(dir / "t.topo") +
                " --budget-secs 0.2 --clock work --seed 9 --out-layout " + q(dir / name))
                .code == 0);
  }
  CHECK(slurp(dir / "a.txt") == slurp(dir / "b.txt"));
}

TEST_CASE("suite, bench and race") {
  const auto dir = fresh_dir("grid");
  auto o = kkb("suite --from 10 --to 13 --seed 2 --out-dir " + q(dir / "suite"));
  REQUIRE(o.code == 0);
  CHECK(fs::exists(dir / "suite" / "n13.topo"));

  std::ofstream(dir / "bench.cfg") << "# tiny grid\nn=40\ndegrees=8\nalgorithms=kk,kk-ms\n"
                                      "k_percents=5\nseeds=2\nbudget=0.1\nclock=work\n";
  o = kkb("bench --config " + q(dir / "bench.cfg") + " --workers 1 --out-dir " + q(dir / "out"));
  REQUIRE(o.code == 0);
  const std::string csv = slurp(dir / "out" / "scores.csv");
  CHECK(csv.find("n40-d8,kk-ms@5,") != std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);

  o = kkb("race --topo " + q(dir / "suite" / "n13.topo") +
          " --a kk --b kk-ms-ds --budget-secs 0.2 --clock work");
  REQUIRE(o.code == 0);
  CHECK(o.out.find("ratio=") != std::string::npos);
  o = kkb("race --topo " + q(dir / "suite" / "n13.topo") +
          " --a kk --b fr --budget-secs 0.2 --clock work --target-energy inf");
  REQUIRE(o.code == 0);
  CHECK(o.out.find("ratio=1") != std::string::npos);
}

TEST_CASE("failures exit nonzero with a diagnostic") {
  const auto dir = fresh_dir("errors");
  auto o = kkb("layout --algo kk --topo " + q(dir / "missing.topo"));
  CHECK(o.code != 0);
  CHECK(o.out.find("error:") != std::string::npos);

  o = kkb("layout --algo spring --topo x.topo");
  CHECK(o.code != 0);

  o = kkb("bench --n 30000 --degrees 8 --out-dir " + q(dir / "big"));
  CHECK(o.code != 0);
  CHECK(o.out.find("20000") != std::string::npos);

  std::ofstream(dir / "bad.cfg") << "budget 3\n";
  o = kkb("bench --config " + q(dir / "bad.cfg"));
  CHECK(o.code != 0);
  CHECK(o.out.find("line 1") != std::string::npos);

  o = kkb("gen --n 10 --degree 8 --gamma 0.1 --out " + q(dir / "x.topo"));
  CHECK(o.code != 0);

  o = kkb("frobnicate");
  CHECK(o.code != 0);
}
