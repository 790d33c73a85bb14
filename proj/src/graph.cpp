#include "kkb/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <utility>

#include "kkb/error.hpp"

namespace kkb {

Topology::Topology(std::size_t node_count, std::vector<Edge> edges,
                   std::optional<std::vector<Point2>> true_positions,
                   std::optional<std::vector<bool>> boundary_truth, ConnectivityCheck check)
    : node_count_(node_count),
      edges_(std::move(edges)),
      true_positions_(std::move(true_positions)),
      boundary_truth_(std::move(boundary_truth)) {
  if (node_count_ == 0) {
    throw Error(ErrorCode::kInvalidArgument, "topology must have at least one node");
  }
  std::set<std::pair<NodeId, NodeId>> seen;
  for (const Edge& e : edges_) {
    if (e.u >= node_count_ || e.v >= node_count_) {
      throw Error(ErrorCode::kInvalidArgument,
                  "edge references unknown node id " + std::to_string(std::max(e.u, e.v)));
    }
    if (e.u == e.v) {
      throw Error(ErrorCode::kInvalidArgument, "self-loop on node " + std::to_string(e.u));
    }
    if (!std::isfinite(e.rssi_dbm)) {
      throw Error(ErrorCode::kInvalidArgument, "non-finite rssi on edge " + std::to_string(e.u) +
                                                   " " + std::to_string(e.v));
    }
    if (!seen.emplace(std::min(e.u, e.v), std::max(e.u, e.v)).second) {
      throw Error(ErrorCode::kInvalidArgument,
                  "duplicate edge " + std::to_string(e.u) + " " + std::to_string(e.v));
    }
  }
  if (true_positions_ && true_positions_->size() != node_count_) {
    throw Error(ErrorCode::kInvalidArgument, "true positions do not cover every node");
  }
  if (boundary_truth_ && boundary_truth_->size() != node_count_) {
    throw Error(ErrorCode::kInvalidArgument, "boundary flags do not cover every node");
  }

  // CSR adjacency
  offsets_.assign(node_count_ + 1, 0);
  for (const Edge& e : edges_) {
    ++offsets_[e.u + 1];
    ++offsets_[e.v + 1];
  }
  for (std::size_t i = 0; i < node_count_; ++i) offsets_[i + 1] += offsets_[i];
  adjacency_.resize(offsets_.back());
  incident_.resize(offsets_.back());
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (std::uint32_t idx = 0; idx < edges_.size(); ++idx) {
    const Edge& e = edges_[idx];
    adjacency_[cursor[e.u]] = e.v;
    incident_[cursor[e.u]++] = idx;
    adjacency_[cursor[e.v]] = e.u;
    incident_[cursor[e.v]++] = idx;
  }

  if (check == ConnectivityCheck::kEnforce && !is_connected()) {
    throw Error(ErrorCode::kDisconnected, "disconnected topology");
  }
}

bool Topology::is_connected() const {
  std::vector<char> seen(node_count_, 0);
  std::vector<NodeId> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const NodeId v = stack.back();
    stack.pop_back();
    for (NodeId w : neighbors(v)) {
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  return reached == node_count_;
}

Topology Topology::with_boundary_truth(std::vector<bool> flags) const {
  return Topology(node_count_, edges_, true_positions_, std::move(flags), ConnectivityCheck::kSkip);
}

bool operator==(const Topology& a, const Topology& b) {
  if (a.node_count_ != b.node_count_ || a.edges_.size() != b.edges_.size()) return false;
  for (std::size_t i = 0; i < a.edges_.size(); ++i) {
    const Edge& x = a.edges_[i];
    const Edge& y = b.edges_[i];
    if (x.u != y.u || x.v != y.v || x.rssi_dbm != y.rssi_dbm) return false;
  }
  return a.true_positions_ == b.true_positions_ && a.boundary_truth_ == b.boundary_truth_;
}

namespace {

constexpr double kUnreached = std::numeric_limits<double>::infinity();

void bfs_row(const Topology& g, NodeId source, std::span<double> row) {
  std::fill(row.begin(), row.end(), kUnreached);
  std::vector<NodeId> frontier{source};
  std::vector<NodeId> next;
  row[source] = 0.0;
  double level = 0.0;
  while (!frontier.empty()) {
    level += 1.0;
    next.clear();
    for (NodeId v : frontier) {
      for (NodeId w : g.neighbors(v)) {
        if (row[w] == kUnreached) {
          row[w] = level;
          next.push_back(w);
        }
      }
    }
    frontier.swap(next);
  }
}

void dijkstra_row(const Topology& g, std::span<const double> weights, NodeId source,
                  std::span<double> row) {
  std::fill(row.begin(), row.end(), kUnreached);
  using Item = std::pair<double, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  row[source] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    const auto [dist, v] = heap.top();
    heap.pop();
    if (dist > row[v]) continue;
    const auto nbrs = g.neighbors(v);
    const auto edges = g.incident_edges(v);
    for (std::size_t k = 0; k < nbrs.size(); ++k) {
      const double cand = dist + weights[edges[k]];
      if (cand < row[nbrs[k]]) {
        row[nbrs[k]] = cand;
        heap.emplace(cand, nbrs[k]);
      }
    }
  }
}

}  // namespace

DistanceMatrix all_pairs_graph_distance(const Topology& topology,
                                        std::span<const double> edge_weights) {
  const std::size_t n = topology.node_count();
  if (!edge_weights.empty()) {
    if (edge_weights.size() != topology.edge_count()) {
      throw Error(ErrorCode::kInvalidArgument, "edge weight count does not match edge count");
    }
    for (double w : edge_weights) {
      if (!(w > 0.0) || !std::isfinite(w)) {
        throw Error(ErrorCode::kInvalidArgument, "edge weights must be positive and finite");
      }
    }
  }

  DistanceMatrix d(n, 0.0);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t s = begin; s < end; ++s) {
      if (edge_weights.empty()) {
        bfs_row(topology, static_cast<NodeId>(s), d.row(s));
      } else {
        dijkstra_row(topology, edge_weights, static_cast<NodeId>(s), d.row(s));
      }
    }
  };

  // Rows are independent, so the split does not affect the result.
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers = n >= 1024 ? std::min<unsigned>(hw, 8) : 1;
  if (workers == 1) {
    work(0, n);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(n, begin + chunk);
      if (begin < end) pool.emplace_back(work, begin, end);
    }
  }

  for (std::size_t j = 0; j < n; ++j) {
    if (d(0, j) == kUnreached) {
      throw Error(ErrorCode::kDisconnected,
                  "disconnected topology: node " + std::to_string(j) + " unreachable from node 0");
    }
  }
  // summation order differs between the two directions of a weighted path
  if (!edge_weights.empty()) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) d(i, j) = d(j, i) = std::min(d(i, j), d(j, i));
    }
  }
  return d;
}

void mark_within_hops(const Topology& topology, NodeId source, unsigned radius,
                      std::vector<std::uint32_t>& mark, std::uint32_t stamp) {
  // `mark` may already hold `stamp` from other sources, so the search keeps
  // its own visited set
  std::vector<char> seen(topology.node_count(), 0);
  std::vector<NodeId> frontier{source};
  std::vector<NodeId> next;
  seen[source] = 1;
  mark[source] = stamp;
  for (unsigned level = 0; level < radius && !frontier.empty(); ++level) {
    next.clear();
    for (NodeId v : frontier) {
      for (NodeId w : topology.neighbors(v)) {
        if (!seen[w]) {
          seen[w] = 1;
          mark[w] = stamp;
          next.push_back(w);
        }
      }
    }
    frontier.swap(next);
  }
}

DistanceModel::DistanceModel(DistanceMatrix d, double frame_side, double scale_constant)
    : d_(std::move(d)), frame_side_(frame_side), scale_constant_(scale_constant) {
  const std::size_t n = d_.size();
  if (n < 2) throw Error(ErrorCode::kDegenerate, "degenerate topology: fewer than two nodes");
  if (!(frame_side > 0.0) || !(scale_constant > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "frame side and scale constant must be positive");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dij = d_(i, j);
      if (!(dij > 0.0) || !std::isfinite(dij) || dij != d_(j, i)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "distance matrix must be symmetric with positive finite off-diagonal entries");
      }
      diameter_ = std::max(diameter_, dij);
      sum += dij;
    }
  }
  length_per_unit_ = frame_side_ / diameter_;
  mean_ideal_length_ = length_per_unit_ * sum / (0.5 * static_cast<double>(n) * (n - 1));
}

DistanceModel build_distance_model(DistanceMatrix d, double frame_side, double scale_constant) {
  return DistanceModel(std::move(d), frame_side, scale_constant);
}

// ---------------------------------------------------------------------------
// Text format

namespace {

[[noreturn]] void parse_fail(std::size_t line, const std::string& msg) {
  throw Error(ErrorCode::kParse, "line " + std::to_string(line) + ": " + msg);
}

template <typename T>
T parse_number(std::string_view token, std::size_t line) {
  T value{};
  const auto* first = token.data();
  const auto* last = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    parse_fail(line, "invalid number '" + std::string(token) + "'");
  }
  return value;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

Topology parse_topology(std::istream& in) {
  enum class Section { kHeader, kNodes, kEdges, kBounds };
  Section section = Section::kHeader;
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<Edge> edges;
  std::vector<Point2> positions;
  std::vector<char> has_position;
  std::size_t position_count = 0;
  std::vector<bool> bounds;
  bool any_bound = false;

  std::string raw;
  std::size_t line_no = 0;
  auto check_id = [&](std::string_view tok) {
    const auto id = parse_number<std::uint64_t>(tok, line_no);
    if (id >= n) parse_fail(line_no, "unknown node id " + std::to_string(id));
    return static_cast<NodeId>(id);
  };

  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line(raw);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto tok = split_ws(line);
    if (tok.empty()) continue;

    if (section == Section::kHeader) {
      if (tok[0] != "TOPO" || tok.size() != 3) parse_fail(line_no, "expected 'TOPO <n> <m>'");
      n = parse_number<std::size_t>(tok[1], line_no);
      m = parse_number<std::size_t>(tok[2], line_no);
      if (n == 0) parse_fail(line_no, "node count must be positive");
      positions.assign(n, {});
      has_position.assign(n, 0);
      bounds.assign(n, false);
      edges.reserve(m);
      section = Section::kNodes;
    } else if (tok[0] == "NODE") {
      if (section != Section::kNodes) parse_fail(line_no, "NODE after EDGE lines");
      if (tok.size() != 4) parse_fail(line_no, "expected 'NODE <id> <x> <y>'");
      const NodeId id = check_id(tok[1]);
      if (has_position[id]) parse_fail(line_no, "duplicate NODE " + std::to_string(id));
      positions[id] = {parse_number<double>(tok[2], line_no), parse_number<double>(tok[3], line_no)};
      has_position[id] = 1;
      ++position_count;
    } else if (tok[0] == "EDGE") {
      if (section == Section::kBounds) parse_fail(line_no, "EDGE after BOUND lines");
      section = Section::kEdges;
      if (tok.size() != 4) parse_fail(line_no, "expected 'EDGE <u> <v> <rssi_dbm>'");
      if (edges.size() == m) parse_fail(line_no, "more than " + std::to_string(m) + " EDGE lines");
      const NodeId u = check_id(tok[1]);
      const NodeId v = check_id(tok[2]);
      if (u == v) parse_fail(line_no, "self-loop on node " + std::to_string(u));
      edges.push_back({u, v, parse_number<double>(tok[3], line_no)});
    } else if (tok[0] == "BOUND") {
      if (edges.size() != m) parse_fail(line_no, "BOUND before all EDGE lines");
      section = Section::kBounds;
      if (tok.size() != 2) parse_fail(line_no, "expected 'BOUND <id>'");
      bounds[check_id(tok[1])] = true;
      any_bound = true;
    } else {
      parse_fail(line_no, "unknown record '" + std::string(tok[0]) + "'");
    }
  }
  if (section == Section::kHeader) parse_fail(line_no, "missing TOPO header");
  if (edges.size() != m) {
    parse_fail(line_no, "expected " + std::to_string(m) + " EDGE lines, found " +
                            std::to_string(edges.size()));
  }
  if (position_count != 0 && position_count != n) {
    parse_fail(line_no, "NODE lines cover " + std::to_string(position_count) + " of " +
                            std::to_string(n) + " nodes");
  }

  std::optional<std::vector<Point2>> pos;
  if (position_count == n) pos = std::move(positions);
  std::optional<std::vector<bool>> truth;
  if (any_bound) truth = std::move(bounds);
  return Topology(n, std::move(edges), std::move(pos), std::move(truth));
}

void format_topology(const Topology& topology, std::ostream& out) {
  out << std::setprecision(17);
  out << "TOPO " << topology.node_count() << ' ' << topology.edge_count() << '\n';
  if (const auto& pos = topology.true_positions()) {
    for (std::size_t i = 0; i < pos->size(); ++i) {
      out << "NODE " << i << ' ' << (*pos)[i].x << ' ' << (*pos)[i].y << '\n';
    }
  }
  for (const Edge& e : topology.edges()) {
    out << "EDGE " << e.u << ' ' << e.v << ' ' << e.rssi_dbm << '\n';
  }
  if (const auto& truth = topology.boundary_truth()) {
    for (std::size_t i = 0; i < truth->size(); ++i) {
      if ((*truth)[i]) out << "BOUND " << i << '\n';
    }
  }
}

Topology read_topology(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  try {
    return parse_topology(in);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void write_topology(const Topology& topology, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  format_topology(topology, out);
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

}  // namespace kkb
