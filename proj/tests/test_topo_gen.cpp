#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "kkb/error.hpp"
#include "kkb/topo_gen.hpp"
#include "support.hpp"

using namespace kkb;

namespace {

std::string serialized(const Topology& t) {
  std::ostringstream out;
  format_topology(t, out);
  return out.str();
}

}  // namespace

TEST_CASE("nominal parameters follow the node count") {
  const auto c = GenConfig::for_node_count(100, 1);
  CHECK(c.delta == doctest::Approx(0.17));
  CHECK(c.gamma == doctest::Approx(0.07));
  CHECK(c.gamma_b == doctest::Approx(0.7));
}

TEST_CASE("config validation") {
  GenConfig c = GenConfig::for_node_count(50, 1);
  c.gamma_b = 1.5;
  CHECK_THROWS_AS(generate_topology(c), Error);
  c = GenConfig::for_node_count(1, 1);
  CHECK_THROWS_AS(generate_topology(c), Error);
  c = GenConfig::for_node_count(50, 1);
  c.e = -0.1;
  CHECK_THROWS_AS(generate_topology(c), Error);
}

TEST_CASE("same seed gives the same topology") {
  GenConfig c = GenConfig::for_node_count(200, 99);
  c.target_degree = 8.0;
  CHECK(serialized(generate_topology(c)) == serialized(generate_topology(c)));
  GenConfig other = c;
  other.seed = 100;
  CHECK(serialized(generate_topology(c)) != serialized(generate_topology(other)));
}

TEST_CASE("target degree is met") {
  for (double e : {1.0, 0.25}) {
    GenConfig c = GenConfig::for_node_count(500, 7);
    c.e = e;
    c.target_degree = 8.0;
    GenReport report;
    const Topology t = generate_topology(c, &report);
    CAPTURE(e);
    CHECK(t.is_connected());
    CHECK(t.average_degree() >= 7.5);
    CHECK(t.average_degree() <= 8.5);
    CHECK(t.node_count() >= 475);
    REQUIRE(t.true_positions().has_value());
    REQUIRE(t.boundary_truth().has_value());
  }
}

TEST_CASE("rssi follows free-space loss of the true distance") {
  GenConfig c = GenConfig::for_node_count(120, 4);
  c.target_degree = 7.0;
  const Topology t = generate_topology(c);
  const auto& pos = *t.true_positions();
  for (const Edge& e : t.edges()) {
    const double d = distance(pos[e.u], pos[e.v]);
    CHECK(fspl_distance(e.rssi_dbm) == doctest::Approx(std::max(d, 1e-3)).epsilon(1e-9));
  }
}

TEST_CASE("generated topologies pass invariants") {
  Rng rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    GenConfig c = GenConfig::for_node_count(10 + rng.below(90), rng.below(1u << 30));
    c.target_degree = rng.uniform(5.0, 10.0);
    c.e = rng.uniform();
    const Topology t = generate_topology(c);
    REQUIRE(t.is_connected());
    REQUIRE(t.true_positions()->size() == t.node_count());
    REQUIRE(t.boundary_truth()->size() == t.node_count());
    const auto round = [&] {
      std::istringstream in(serialized(t));
      return parse_topology(in);
    }();
    REQUIRE(round == t);
  }
}

TEST_CASE("unreachable connectivity fails cleanly") {
  GenConfig c = GenConfig::for_node_count(300, 1);
  c.gamma = 0.001;
  CHECK_THROWS_WITH_AS(generate_topology(c), doctest::Contains("could not generate connected"),
                       Error);
}

TEST_CASE("small suite") {
  const auto one = generate_small_suite(10, 10, 3);
  CHECK(one.topologies.size() == 1);
  const auto some = generate_small_suite(10, 60, 3);
  CHECK(some.topologies.size() == 51);
  CHECK(some.average_degree >= 3.0);
  CHECK(some.average_degree <= 8.0);
  CHECK_THROWS_AS(generate_small_suite(20, 10, 3), Error);
}
