#include "kkb/topo_gen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "kkb/alpha_shape.hpp"
#include "kkb/error.hpp"
#include "kkb/rng.hpp"

namespace kkb {

GenConfig GenConfig::for_node_count(std::size_t n, std::uint64_t seed) {
  GenConfig c;
  c.n = n;
  const double root = std::sqrt(static_cast<double>(n));
  c.delta = 1.7 / root;
  c.gamma = 0.7 / root;
  c.gamma_b = 0.7;
  c.seed = seed;
  return c;
}

void GenConfig::validate() const {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::kInvalidArgument, what); };
  if (n < 2) bad("generator needs n >= 2");
  if (!(gamma_b >= 0.0 && gamma_b <= 1.0)) bad("gamma_b must lie in [0, 1]");
  if (!(e >= 0.0 && e <= 1.0)) bad("e must lie in [0, 1]");
  if (!(delta > 0.0)) bad("delta must be positive");
  if (!target_degree && !(gamma > 0.0)) bad("gamma must be positive");
  if (target_degree && !(*target_degree > 0.0)) bad("target degree must be positive");
  if (!(field_scale > 0.0)) bad("field scale must be positive");
  if (!(alpha_factor > 0.0)) bad("alpha factor must be positive");
}

namespace {

std::vector<Point2> place_nodes(const GenConfig& c, Rng& rng) {
  std::vector<Point2> pts(c.n);
  const double radius = 2.0 * c.delta;
  for (std::size_t i = 0; i < c.n; ++i) {
    if (i == 0 || rng.uniform() < c.e) {
      pts[i] = {rng.uniform(), rng.uniform()};
      continue;
    }
    const Point2 anchor = pts[rng.below(i)];
    Point2 q{-1.0, -1.0};
    for (int tries = 0; tries < 10000; ++tries) {
      const double r = radius * std::sqrt(rng.uniform());
      const double a = 2.0 * std::numbers::pi * rng.uniform();
      q = {anchor.x + r * std::cos(a), anchor.y + r * std::sin(a)};
      if (q.x >= 0.0 && q.x <= 1.0 && q.y >= 0.0 && q.y <= 1.0) break;
    }
    if (!(q.x >= 0.0 && q.x <= 1.0 && q.y >= 0.0 && q.y <= 1.0)) q = anchor;
    pts[i] = q;
  }
  return pts;
}

// Candidate pairs within a radius, found through a uniform grid.
class PairIndex {
 public:
  PairIndex(const std::vector<Point2>& pts, std::uint64_t seed, double gamma_b)
      : pts_(pts), seed_(seed), gamma_b_(gamma_b) {}

  template <typename Fn>
  void for_each_edge(double radius, Fn&& fn) const {
    const std::size_t n = pts_.size();
    if (radius >= std::sqrt(2.0)) {
      for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = i + 1; j < n; ++j) visit(i, j, radius, fn);
      return;
    }
    const int cells = std::max(1, static_cast<int>(std::floor(1.0 / radius)));
    auto cell_of = [&](double v) { return std::min(cells - 1, static_cast<int>(v * cells)); };
    std::vector<std::vector<std::uint32_t>> grid(static_cast<std::size_t>(cells) * cells);
    for (std::uint32_t i = 0; i < n; ++i) {
      grid[cell_of(pts_[i].y) * cells + cell_of(pts_[i].x)].push_back(i);
    }
    for (std::uint32_t i = 0; i < n; ++i) {
      const int cx = cell_of(pts_[i].x);
      const int cy = cell_of(pts_[i].y);
      for (int gy = std::max(0, cy - 1); gy <= std::min(cells - 1, cy + 1); ++gy) {
        for (int gx = std::max(0, cx - 1); gx <= std::min(cells - 1, cx + 1); ++gx) {
          for (std::uint32_t j : grid[gy * cells + gx]) {
            if (j > i) visit(i, j, radius, fn);
          }
        }
      }
    }
  }

  std::size_t count(double radius) const {
    std::size_t m = 0;
    for_each_edge(radius, [&](std::uint32_t, std::uint32_t, double) { ++m; });
    return m;
  }

 private:
  template <typename Fn>
  void visit(std::uint32_t i, std::uint32_t j, double radius, Fn& fn) const {
    const double dist = distance(pts_[i], pts_[j]);
    if (dist > radius) return;
    // one fixed draw per pair keeps the edge count monotone in the radius
    const std::uint64_t key = (static_cast<std::uint64_t>(i) << 32) | j;
    if (unit_from_bits(derive_seed(seed_, key)) < gamma_b_) fn(i, j, dist);
  }

  const std::vector<Point2>& pts_;
  std::uint64_t seed_;
  double gamma_b_;
};

double solve_radius(const PairIndex& index, std::size_t n, double target_degree,
                    double gamma_b) {
  const double target_edges = target_degree * static_cast<double>(n) / 2.0;
  auto degree_gap = [&](double r) {
    return static_cast<double>(index.count(r)) - target_edges;
  };
  double hi = std::sqrt(target_degree / (std::numbers::pi * n * std::max(gamma_b, 1e-3)));
  while (hi < std::sqrt(2.0) && degree_gap(hi) < 0.0) hi = std::min(std::sqrt(2.0), 2.0 * hi);
  if (degree_gap(hi) < 0.0) return hi;  // unattainable: every candidate pair is in range
  double lo = 0.0;
  for (int it = 0; it < 20; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (degree_gap(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::abs(degree_gap(lo)) < std::abs(degree_gap(hi)) ? lo : hi;
}

struct Candidate {
  std::vector<Point2> unit_pts;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  std::vector<int> component;
  int giant = 0;
  std::size_t giant_size = 0;
  double gamma = 0.0;
};

void label_components(Candidate& c) {
  const std::size_t n = c.unit_pts.size();
  std::vector<std::uint32_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0u);
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& [u, v] : c.edges) parent[find(u)] = find(v);
  std::vector<std::size_t> size(n, 0);
  for (std::uint32_t i = 0; i < n; ++i) ++size[find(i)];
  c.component.resize(n);
  c.giant_size = 0;
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint32_t r = find(i);
    c.component[i] = static_cast<int>(r);
    if (size[r] > c.giant_size || (size[r] == c.giant_size && static_cast<int>(r) < c.giant)) {
      c.giant_size = size[r];
      c.giant = static_cast<int>(r);
    }
  }
}

Candidate make_candidate(const GenConfig& config, std::uint64_t attempt_seed) {
  Rng rng(attempt_seed);
  Candidate c;
  c.unit_pts = place_nodes(config, rng);
  const PairIndex index(c.unit_pts, derive_seed(attempt_seed, 0xed9e), config.gamma_b);
  c.gamma = config.target_degree
                ? solve_radius(index, config.n, *config.target_degree, config.gamma_b)
                : config.gamma;
  index.for_each_edge(c.gamma, [&](std::uint32_t i, std::uint32_t j, double) {
    c.edges.emplace_back(i, j);
  });
  std::sort(c.edges.begin(), c.edges.end());
  label_components(c);
  return c;
}

}  // namespace

Topology generate_topology(const GenConfig& config, GenReport* report) {
  config.validate();
  constexpr std::size_t kAttempts = 50;

  std::optional<Candidate> best;
  std::size_t attempts = 0;
  for (std::size_t a = 0; a < kAttempts; ++a) {
    ++attempts;
    Candidate c = make_candidate(config, derive_seed(config.seed, a));
    const bool connected = c.giant_size == config.n;
    if (!best || c.giant_size > best->giant_size) best = std::move(c);
    if (connected) break;
  }
  if (static_cast<double>(best->giant_size) < 0.95 * static_cast<double>(config.n)) {
    throw Error(ErrorCode::kGeneration, "could not generate connected topology");
  }

  // keep the giant component, relabelled densely in original order
  std::vector<NodeId> relabel(config.n, ~NodeId{0});
  std::vector<Point2> meters;
  for (std::size_t i = 0; i < config.n; ++i) {
    if (best->component[i] == best->giant) {
      relabel[i] = static_cast<NodeId>(meters.size());
      meters.push_back(config.field_scale * best->unit_pts[i]);
    }
  }
  std::vector<Edge> edges;
  edges.reserve(best->edges.size());
  for (const auto& [u, v] : best->edges) {
    if (relabel[u] == ~NodeId{0}) continue;
    const NodeId a = relabel[u];
    const NodeId b = relabel[v];
    const double dist = std::max(distance(meters[a], meters[b]), 1e-3);
    edges.push_back({a, b, fspl_rssi(dist, config.radio)});
  }

  if (report) {
    report->gamma = best->gamma;
    report->attempts = attempts;
    report->dropped = config.n - meters.size();
  }

  Topology topo(meters.size(), std::move(edges), meters);
  const double alpha = config.alpha_factor * mean_edge_length(topo, meters);
  auto truth = ground_truth_boundary(meters, alpha, config.holes);
  return topo.with_boundary_truth(std::move(truth));
}

std::vector<bool> ground_truth_boundary(std::span<const Point2> true_positions, double alpha,
                                        bool include_holes) {
  return alpha_shape_boundary(true_positions, alpha, include_holes);
}

double mean_edge_length(const Topology& topology, std::span<const Point2> positions) {
  if (topology.edge_count() == 0) return 0.0;
  double sum = 0.0;
  for (const Edge& e : topology.edges()) sum += distance(positions[e.u], positions[e.v]);
  return sum / static_cast<double>(topology.edge_count());
}

GenConfig small_suite_config(std::size_t n, std::uint64_t seed) {
  GenConfig c = GenConfig::for_node_count(n, seed);
  c.e = 1.0;
  c.target_degree = kSuiteTargetDegree;
  return c;
}

SmallSuite generate_small_suite(std::size_t n_from, std::size_t n_to, std::uint64_t seed) {
  if (n_from > n_to) throw Error(ErrorCode::kInvalidArgument, "suite range is empty");
  if (n_from < 2) throw Error(ErrorCode::kInvalidArgument, "suite needs n >= 2");
  SmallSuite suite;
  double degree_sum = 0.0;
  for (std::size_t n = n_from; n <= n_to; ++n) {
    suite.topologies.push_back(generate_topology(small_suite_config(n, derive_seed(seed, n))));
    suite.node_counts.push_back(n);
    degree_sum += suite.topologies.back().average_degree();
  }
  suite.average_degree = degree_sum / static_cast<double>(suite.topologies.size());
  return suite;
}

}  // namespace kkb
