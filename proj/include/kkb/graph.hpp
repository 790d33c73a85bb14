#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "kkb/geometry.hpp"

namespace kkb {

using NodeId = std::uint32_t;

struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  double rssi_dbm = 0.0;
};

enum class ConnectivityCheck { kEnforce, kSkip };

// Undirected simple graph with per-edge received signal strength. Node ids are
// dense 0..n-1. Ground-truth positions (meters) and boundary flags are carried
// for evaluation only; layout engines never read them.
class Topology {
 public:
  Topology(std::size_t node_count, std::vector<Edge> edges,
           std::optional<std::vector<Point2>> true_positions = std::nullopt,
           std::optional<std::vector<bool>> boundary_truth = std::nullopt,
           ConnectivityCheck check = ConnectivityCheck::kEnforce);

  std::size_t node_count() const { return node_count_; }
  std::size_t edge_count() const { return edges_.size(); }
  std::span<const Edge> edges() const { return edges_; }

  std::span<const NodeId> neighbors(NodeId v) const {
    return {adjacency_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }
  /// Edge indices aligned with `neighbors(v)`.
  std::span<const std::uint32_t> incident_edges(NodeId v) const {
    return {incident_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }
  std::size_t degree(NodeId v) const { return offsets_[v + 1] - offsets_[v]; }
  double average_degree() const {
    return node_count_ == 0 ? 0.0 : 2.0 * static_cast<double>(edges_.size()) / node_count_;
  }

  bool is_connected() const;

  const std::optional<std::vector<Point2>>& true_positions() const { return true_positions_; }
  const std::optional<std::vector<bool>>& boundary_truth() const { return boundary_truth_; }

  Topology with_boundary_truth(std::vector<bool> flags) const;

  friend bool operator==(const Topology& a, const Topology& b);

 private:
  std::size_t node_count_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> adjacency_;
  std::vector<std::uint32_t> incident_;
  std::optional<std::vector<Point2>> true_positions_;
  std::optional<std::vector<bool>> boundary_truth_;
};

// Dense row-major n x n matrix.
template <typename T>
class SquareMatrix {
 public:
  SquareMatrix() = default;
  SquareMatrix(std::size_t n, T fill) : n_(n), data_(n * n, fill) {}

  std::size_t size() const { return n_; }
  T& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  std::span<const T> row(std::size_t i) const { return {data_.data() + i * n_, n_}; }
  std::span<T> row(std::size_t i) { return {data_.data() + i * n_, n_}; }

 private:
  std::size_t n_ = 0;
  std::vector<T> data_;
};

using DistanceMatrix = SquareMatrix<double>;

/// Shortest-path lengths between all pairs: hop counts (BFS per source) when
/// `edge_weights` is empty, summed edge lengths (Dijkstra per source)
/// otherwise. `edge_weights` is indexed like `Topology::edges()`.
DistanceMatrix all_pairs_graph_distance(const Topology& topology,
                                        std::span<const double> edge_weights = {});

/// Hop-count ball of `radius` around `source`, written into `mark` (value
/// `stamp`). Used for the "within k hops" filters.
void mark_within_hops(const Topology& topology, NodeId source, unsigned radius,
                      std::vector<std::uint32_t>& mark, std::uint32_t stamp);

// Graph distances plus the two spring constants derived from them:
//   ideal length l_ij = L0 * d_ij / max d
//   stiffness    k_ij = K / d_ij^2
// l and k are computed on access so only d is stored.
class DistanceModel {
 public:
  DistanceModel(DistanceMatrix d, double frame_side, double scale_constant);

  std::size_t size() const { return d_.size(); }
  double frame_side() const { return frame_side_; }
  double scale_constant() const { return scale_constant_; }
  double diameter() const { return diameter_; }
  const DistanceMatrix& distances() const { return d_; }

  double d(std::size_t i, std::size_t j) const { return d_(i, j); }
  double ideal_length(std::size_t i, std::size_t j) const { return length_per_unit_ * d_(i, j); }
  double stiffness(std::size_t i, std::size_t j) const {
    const double dij = d_(i, j);
    return scale_constant_ / (dij * dij);
  }
  double length_per_unit() const { return length_per_unit_; }
  double mean_ideal_length() const { return mean_ideal_length_; }

 private:
  DistanceMatrix d_;
  double frame_side_;
  double scale_constant_;
  double diameter_ = 0.0;
  double length_per_unit_ = 0.0;
  double mean_ideal_length_ = 0.0;
};

DistanceModel build_distance_model(DistanceMatrix d, double frame_side, double scale_constant);

Topology read_topology(const std::filesystem::path& path);
void write_topology(const Topology& topology, const std::filesystem::path& path);

// Stream variants, used by the file functions and by tests.
Topology parse_topology(std::istream& in);
void format_topology(const Topology& topology, std::ostream& out);

}  // namespace kkb
