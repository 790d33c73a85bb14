#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "kkb/geometry.hpp"
#include "kkb/graph.hpp"
#include "kkb/radio.hpp"

namespace kkb {

// Random ad hoc network parameters. Ratios are fractions of the unit square;
// positions are reported in meters (unit square side = field_scale).
//
//   delta     clustering radius scale: a clustered node lands within 2*delta
//             of a previously placed node
//   gamma     communication radius; replaced by bisection when target_degree
//             is set
//   gamma_b   per-pair edge acceptance probability
//   e         probability that a node is placed uniformly (1 = uniform field)
struct GenConfig {
  std::size_t n = 100;
  double delta = 0.17;
  double gamma = 0.07;
  double gamma_b = 0.7;
  double e = 1.0;
  std::optional<double> target_degree;
  double field_scale = 100.0;
  std::uint64_t seed = 1;
  /// Ground-truth alpha as a multiple of the mean true edge length.
  double alpha_factor = 1.5;
  bool holes = false;
  FsplParams radio;

  /// delta = 1.7/sqrt(n), gamma = 0.7/sqrt(n), gamma_b = 0.7.
  static GenConfig for_node_count(std::size_t n, std::uint64_t seed);
  void validate() const;
};

struct GenReport {
  double gamma = 0.0;          // radius actually used (unit-square fraction)
  std::size_t attempts = 0;    // placements tried
  std::size_t dropped = 0;     // nodes removed by the largest-component repair
};

Topology generate_topology(const GenConfig& config, GenReport* report = nullptr);

/// Alpha-shape labels on true positions (see alpha_shape_boundary).
std::vector<bool> ground_truth_boundary(std::span<const Point2> true_positions, double alpha,
                                        bool include_holes = false);

/// Mean Euclidean length of the topology's edges under `positions`.
double mean_edge_length(const Topology& topology, std::span<const Point2> positions);

struct SmallSuite {
  std::vector<Topology> topologies;
  std::vector<std::size_t> node_counts;
  double average_degree = 0.0;  // mean of the per-topology average degrees
};

/// Mean average degree reported for the 991-topology evaluation suite; the
/// suite generator aims each topology at it.
inline constexpr double kSuiteTargetDegree = 7.236054;

GenConfig small_suite_config(std::size_t n, std::uint64_t seed);
SmallSuite generate_small_suite(std::size_t n_from, std::size_t n_to, std::uint64_t seed);

}  // namespace kkb
