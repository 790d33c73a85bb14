#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace testing {

kkb::Topology random_connected_graph(std::size_t n, double extra, kkb::Rng& rng) {
  std::set<std::pair<kkb::NodeId, kkb::NodeId>> pairs;
  for (kkb::NodeId v = 1; v < n; ++v) {
    const auto u = static_cast<kkb::NodeId>(rng.below(v));
    pairs.emplace(u, v);
  }
  for (kkb::NodeId u = 0; u < n; ++u)
    for (kkb::NodeId v = u + 1; v < n; ++v)
      if (rng.uniform() < extra) pairs.emplace(u, v);
  std::vector<kkb::Edge> edges;
  for (const auto& [u, v] : pairs) edges.push_back({u, v, rng.uniform(-80.0, -40.0)});
  return kkb::Topology(n, std::move(edges));
}

kkb::DistanceMatrix floyd_warshall(const kkb::Topology& topo, std::span<const double> weights) {
  const std::size_t n = topo.node_count();
  const double inf = std::numeric_limits<double>::infinity();
  kkb::DistanceMatrix d(n, inf);
  for (std::size_t i = 0; i < n; ++i) d(i, i) = 0.0;
  for (std::size_t e = 0; e < topo.edge_count(); ++e) {
    const auto& edge = topo.edges()[e];
    const double w = weights.empty() ? 1.0 : weights[e];
    d(edge.u, edge.v) = std::min(d(edge.u, edge.v), w);
    d(edge.v, edge.u) = std::min(d(edge.v, edge.u), w);
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d(i, j) = std::min(d(i, j), d(i, k) + d(k, j));
  return d;
}

double naive_kk_energy(const kkb::Layout& layout, const kkb::DistanceMatrix& d, double L0,
                       double K) {
  const std::size_t n = d.size();
  double dmax = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) dmax = std::max(dmax, d(i, j));
  double e = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double l = L0 * d(i, j) / dmax;
      const double k = K / (d(i, j) * d(i, j));
      const double dx = layout.positions[i].x - layout.positions[j].x;
      const double dy = layout.positions[i].y - layout.positions[j].y;
      const double gap = std::sqrt(dx * dx + dy * dy) - l;
      e += 0.5 * k * gap * gap;
    }
  }
  return e;
}

std::vector<bool> brute_force_hull(std::span<const kkb::Point2> pts) {
  // a point is a hull vertex iff some line through it has every other point
  // strictly on one side, or it is an extreme point of a collinear edge
  const std::size_t n = pts.size();
  std::vector<bool> hull(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      bool left = true;
      for (std::size_t k = 0; k < n && left; ++k) {
        if (k == i || k == j) continue;
        const double cross = (pts[j].x - pts[i].x) * (pts[k].y - pts[i].y) -
                             (pts[j].y - pts[i].y) * (pts[k].x - pts[i].x);
        if (cross < 0.0) left = false;
      }
      if (left) {
        hull[i] = true;
        hull[j] = true;
      }
    }
  }
  return hull;
}

kkb::Layout random_positions(std::size_t n, double side, kkb::Rng& rng) {
  kkb::Layout layout;
  layout.frame = {side, side};
  layout.positions.resize(n);
  for (auto& p : layout.positions) p = {rng.uniform(-side / 2, side / 2), rng.uniform(-side / 2, side / 2)};
  return layout;
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("kkb_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

double relative_error(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

}  // namespace testing
