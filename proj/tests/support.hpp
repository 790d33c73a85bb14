#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "kkb/graph.hpp"
#include "kkb/layout.hpp"
#include "kkb/rng.hpp"

namespace testing {

// Random spanning tree plus extra edges with probability `extra`; rssi drawn
// in [-80, -40] dBm.
kkb::Topology random_connected_graph(std::size_t n, double extra, kkb::Rng& rng);

// Independent oracles.
kkb::DistanceMatrix floyd_warshall(const kkb::Topology& topo, std::span<const double> weights = {});
double naive_kk_energy(const kkb::Layout& layout, const kkb::DistanceMatrix& d, double L0,
                       double K);
std::vector<bool> brute_force_hull(std::span<const kkb::Point2> pts);

kkb::Layout random_positions(std::size_t n, double side, kkb::Rng& rng);

std::filesystem::path scratch_dir(const std::string& name);

double relative_error(double a, double b);

}  // namespace testing
