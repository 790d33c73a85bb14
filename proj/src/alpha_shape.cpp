#include "kkb/alpha_shape.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <utility>

#include "kkb/error.hpp"

namespace kkb {

namespace {

constexpr int kGhost = -1;
constexpr int kNone = -1;

using Real = long double;

Real orient(Point2 a, Point2 b, Point2 c) {
  const Real abx = static_cast<Real>(b.x) - a.x;
  const Real aby = static_cast<Real>(b.y) - a.y;
  const Real acx = static_cast<Real>(c.x) - a.x;
  const Real acy = static_cast<Real>(c.y) - a.y;
  return abx * acy - aby * acx;
}

// > 0 when d lies strictly inside the circumcircle of ccw triangle abc.
Real incircle(Point2 a, Point2 b, Point2 c, Point2 d) {
  const Real adx = static_cast<Real>(a.x) - d.x, ady = static_cast<Real>(a.y) - d.y;
  const Real bdx = static_cast<Real>(b.x) - d.x, bdy = static_cast<Real>(b.y) - d.y;
  const Real cdx = static_cast<Real>(c.x) - d.x, cdy = static_cast<Real>(c.y) - d.y;
  const Real alift = adx * adx + ady * ady;
  const Real blift = bdx * bdx + bdy * bdy;
  const Real clift = cdx * cdx + cdy * cdy;
  return alift * (bdx * cdy - cdx * bdy) + blift * (cdx * ady - adx * cdy) +
         clift * (adx * bdy - bdx * ady);
}

// Bowyer-Watson with ghost triangles: every hull edge (a, b) carries a ghost
// triangle (a, b, kGhost) on its exterior side, so points outside the current
// hull are inserted by the same cavity procedure as interior points.
class Delaunay {
 public:
  explicit Delaunay(std::span<const Point2> pts) : pts_(pts) {}

  bool build(std::vector<int> order) {
    // seed with the first non-degenerate triple
    const int a = order[0];
    const int b = order[1];
    std::size_t k = 2;
    while (k < order.size() && orient(pts_[a], pts_[b], pts_[order[k]]) == 0) ++k;
    if (k == order.size()) return false;
    int c = order[k];
    order.erase(order.begin() + static_cast<std::ptrdiff_t>(k));
    if (orient(pts_[a], pts_[b], pts_[c]) > 0) {
      seed(a, b, c);
    } else {
      seed(a, c, b);
    }
    for (std::size_t i = 2; i < order.size(); ++i) insert(order[i]);
    return true;
  }

  std::vector<std::array<int, 3>> real_triangles() const {
    std::vector<std::array<int, 3>> out;
    for (const Tri& t : tris_) {
      if (t.alive && !is_ghost(t)) out.push_back(t.v);
    }
    return out;
  }

 private:
  struct Tri {
    std::array<int, 3> v;   // ccw; ghosts store kGhost in v[2]
    std::array<int, 3> nb;  // nb[i] is across the edge opposite v[i]
    bool alive = true;
  };

  static bool is_ghost(const Tri& t) { return t.v[2] == kGhost; }

  int add(int a, int b, int c) {
    Tri t;
    // keep the ghost vertex in slot 2
    if (a == kGhost) {
      t.v = {b, c, a};
    } else if (b == kGhost) {
      t.v = {c, a, b};
    } else {
      t.v = {a, b, c};
    }
    t.nb = {kNone, kNone, kNone};
    tris_.push_back(t);
    return static_cast<int>(tris_.size()) - 1;
  }

  void seed(int a, int b, int c) {
    const int t = add(a, b, c);
    const int g0 = add(b, a, kGhost);
    const int g1 = add(c, b, kGhost);
    const int g2 = add(a, c, kGhost);
    link_all({t, g0, g1, g2});
    last_ = t;
  }

  // Link the shared edges among a set of triangles (pairs are matched by
  // reversed directed edges).
  void link_all(const std::vector<int>& ids) {
    std::map<std::pair<int, int>, std::pair<int, int>> open;
    for (int id : ids) {
      for (int i = 0; i < 3; ++i) {
        const int p = tris_[id].v[(i + 1) % 3];
        const int q = tris_[id].v[(i + 2) % 3];
        if (auto it = open.find({q, p}); it != open.end()) {
          const auto [oid, oi] = it->second;
          tris_[id].nb[i] = oid;
          tris_[oid].nb[oi] = id;
          open.erase(it);
        } else {
          open[{p, q}] = {id, i};
        }
      }
    }
  }

  bool conflicts(const Tri& t, int p) const {
    const Point2 q = pts_[p];
    if (is_ghost(t)) {
      const Point2 a = pts_[t.v[0]];
      const Point2 b = pts_[t.v[1]];
      const Real o = orient(a, b, q);
      if (o > 0) return true;
      if (o < 0) return false;
      // collinear: inside the open hull segment
      const Real dot = (static_cast<Real>(q.x) - a.x) * (static_cast<Real>(b.x) - a.x) +
                       (static_cast<Real>(q.y) - a.y) * (static_cast<Real>(b.y) - a.y);
      const Real len2 = (static_cast<Real>(b.x) - a.x) * (static_cast<Real>(b.x) - a.x) +
                        (static_cast<Real>(b.y) - a.y) * (static_cast<Real>(b.y) - a.y);
      return dot > 0 && dot < len2;
    }
    return incircle(pts_[t.v[0]], pts_[t.v[1]], pts_[t.v[2]], q) > 0;
  }

  int locate(int p) {
    const Point2 q = pts_[p];
    int cur = last_;
    while (!tris_[cur].alive) --cur;
    if (is_ghost(tris_[cur])) cur = tris_[cur].nb[2];
    std::size_t guard = 0;
    unsigned rot = 0;
    while (true) {
      const Tri& t = tris_[cur];
      if (is_ghost(t)) return cur;
      int next = kNone;
      for (int j = 0; j < 3; ++j) {
        const int i = static_cast<int>((j + rot) % 3);
        if (orient(pts_[t.v[(i + 1) % 3]], pts_[t.v[(i + 2) % 3]], q) < 0) {
          next = t.nb[i];
          break;
        }
      }
      if (next == kNone) return cur;
      cur = next;
      ++rot;
      if (++guard > 4 * tris_.size() + 16) return linear_search(p);
    }
  }

  int linear_search(int p) const {
    for (std::size_t i = 0; i < tris_.size(); ++i) {
      if (tris_[i].alive && conflicts(tris_[i], p)) return static_cast<int>(i);
    }
    throw Error(ErrorCode::kDegenerate, "delaunay: no conflicting triangle");
  }

  void insert(int p) {
    int start = locate(p);
    if (!conflicts(tris_[start], p)) start = linear_search(p);

    // cavity = all triangles whose circumcircle contains p (connected)
    std::vector<int> cavity{start};
    std::vector<char> in_cavity_flag;
    stamp_.resize(tris_.size(), 0);
    ++epoch_;
    stamp_[start] = epoch_;
    for (std::size_t k = 0; k < cavity.size(); ++k) {
      const Tri& t = tris_[cavity[k]];
      for (int nb : t.nb) {
        if (stamp_[nb] == epoch_) continue;
        if (conflicts(tris_[nb], p)) {
          stamp_[nb] = epoch_;
          cavity.push_back(nb);
        }
      }
    }

    // boundary edges (directed as in the cavity triangle) and their outer nbr
    struct BEdge {
      int a, b, outside, outside_slot;
    };
    std::vector<BEdge> boundary;
    for (int id : cavity) {
      const Tri& t = tris_[id];
      for (int i = 0; i < 3; ++i) {
        const int nb = t.nb[i];
        if (stamp_[nb] == epoch_) continue;
        const int a = t.v[(i + 1) % 3];
        const int b = t.v[(i + 2) % 3];
        int slot = 0;
        while (tris_[nb].nb[slot] != id) ++slot;
        boundary.push_back({a, b, nb, slot});
      }
    }
    for (int id : cavity) tris_[id].alive = false;

    std::map<int, int> by_start;  // edge start vertex -> new triangle
    std::map<int, int> by_end;
    std::vector<int> created;
    created.reserve(boundary.size());
    for (const BEdge& e : boundary) {
      const int id = add(e.a, e.b, p);
      created.push_back(id);
      Tri& t = tris_[id];
      // find slot opposite p (edge a-b) after normalization
      for (int i = 0; i < 3; ++i) {
        if (t.v[i] == p) {
          t.nb[i] = e.outside;
          break;
        }
      }
      tris_[e.outside].nb[e.outside_slot] = id;
      by_start[e.a] = id;
      by_end[e.b] = id;
    }
    for (std::size_t k = 0; k < boundary.size(); ++k) {
      const BEdge& e = boundary[k];
      Tri& t = tris_[created[k]];
      for (int i = 0; i < 3; ++i) {
        if (t.v[i] == e.a) t.nb[i] = by_start.at(e.b);  // edge (b, p)
        if (t.v[i] == e.b) t.nb[i] = by_end.at(e.a);    // edge (p, a)
      }
    }
    stamp_.resize(tris_.size(), 0);
    for (int id : created) {
      if (!is_ghost(tris_[id])) last_ = id;
    }
  }

  std::span<const Point2> pts_;
  std::vector<Tri> tris_;
  std::vector<unsigned> stamp_;
  unsigned epoch_ = 0;
  int last_ = 0;
};

double circumradius(Point2 a, Point2 b, Point2 c) {
  const double ab = distance(a, b);
  const double bc = distance(b, c);
  const double ca = distance(c, a);
  const double area2 = std::abs(static_cast<double>(orient(a, b, c)));
  if (area2 == 0.0) return std::numeric_limits<double>::infinity();
  return ab * bc * ca / (2.0 * area2);
}

}  // namespace

Triangulation delaunay_triangulate(std::span<const Point2> points) {
  Triangulation out;
  const int n = static_cast<int>(points.size());
  out.representative.resize(points.size());
  std::vector<int> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (points[a].x != points[b].x) return points[a].x < points[b].x;
    if (points[a].y != points[b].y) return points[a].y < points[b].y;
    return a < b;
  });
  std::vector<int> unique;
  for (int k = 0; k < n; ++k) {
    const int i = order[k];
    if (!unique.empty() && points[unique.back()] == points[i]) {
      out.representative[i] = unique.back();
    } else {
      out.representative[i] = i;
      unique.push_back(i);
    }
  }
  for (int i : unique) {
    if (!std::isfinite(points[i].x) || !std::isfinite(points[i].y)) {
      throw Error(ErrorCode::kInvalidArgument, "triangulation input must be finite");
    }
  }
  if (unique.size() < 3) return out;

  Delaunay dt(points);
  if (!dt.build(std::move(unique))) return out;
  out.triangles = dt.real_triangles();
  return out;
}

std::vector<bool> alpha_shape_boundary(std::span<const Point2> points, double alpha,
                                       bool include_holes) {
  const std::size_t n = points.size();
  std::vector<bool> boundary(n, true);
  if (!(alpha > 0.0)) throw Error(ErrorCode::kInvalidArgument, "alpha must be positive");
  const Triangulation tri = delaunay_triangulate(points);
  if (tri.triangles.empty()) return boundary;

  const auto& tris = tri.triangles;
  const std::size_t t_count = tris.size();

  // edge adjacency between real triangles
  std::vector<std::array<int, 3>> nb(t_count, {kNone, kNone, kNone});
  {
    std::map<std::pair<int, int>, std::pair<int, int>> open;
    for (std::size_t t = 0; t < t_count; ++t) {
      for (int i = 0; i < 3; ++i) {
        const int p = tris[t][(i + 1) % 3];
        const int q = tris[t][(i + 2) % 3];
        if (auto it = open.find({q, p}); it != open.end()) {
          nb[t][i] = it->second.first;
          nb[it->second.first][it->second.second] = static_cast<int>(t);
          open.erase(it);
        } else {
          open[{p, q}] = {static_cast<int>(t), i};
        }
      }
    }
  }

  std::vector<char> kept(t_count, 0);
  for (std::size_t t = 0; t < t_count; ++t) {
    kept[t] = circumradius(points[tris[t][0]], points[tris[t][1]], points[tris[t][2]]) <= alpha;
  }

  // largest kept component (ties: the one found first)
  std::vector<int> comp(t_count, kNone);
  int best = kNone;
  std::size_t best_size = 0;
  int comp_count = 0;
  for (std::size_t s = 0; s < t_count; ++s) {
    if (!kept[s] || comp[s] != kNone) continue;
    std::vector<int> stack{static_cast<int>(s)};
    comp[s] = comp_count;
    std::size_t size = 0;
    while (!stack.empty()) {
      const int t = stack.back();
      stack.pop_back();
      ++size;
      for (int u : nb[t]) {
        if (u != kNone && kept[u] && comp[u] == kNone) {
          comp[u] = comp_count;
          stack.push_back(u);
        }
      }
    }
    if (size > best_size) {
      best_size = size;
      best = comp_count;
    }
    ++comp_count;
  }
  if (best == kNone) return boundary;  // nothing survives: every point is exposed

  auto in_main = [&](int t) { return t != kNone && comp[t] == best; };

  // exterior region: non-main triangles reachable from the hull
  std::vector<char> exterior(t_count, 0);
  std::vector<int> stack;
  for (std::size_t t = 0; t < t_count; ++t) {
    if (in_main(static_cast<int>(t))) continue;
    if (std::find(nb[t].begin(), nb[t].end(), kNone) != nb[t].end()) {
      exterior[t] = 1;
      stack.push_back(static_cast<int>(t));
    }
  }
  while (!stack.empty()) {
    const int t = stack.back();
    stack.pop_back();
    for (int u : nb[t]) {
      if (u != kNone && !in_main(u) && !exterior[u]) {
        exterior[u] = 1;
        stack.push_back(u);
      }
    }
  }

  std::vector<char> flag(n, 0);
  std::vector<char> in_main_vertex(n, 0);
  for (std::size_t t = 0; t < t_count; ++t) {
    if (!in_main(static_cast<int>(t))) continue;
    for (int i = 0; i < 3; ++i) {
      in_main_vertex[tris[t][i]] = 1;
      const int u = nb[t][i];
      if (in_main(u)) continue;
      const bool outer = (u == kNone) || exterior[u];
      if (outer || include_holes) {
        flag[tris[t][(i + 1) % 3]] = 1;
        flag[tris[t][(i + 2) % 3]] = 1;
      }
    }
  }
  // stragglers outside the main component
  for (std::size_t t = 0; t < t_count; ++t) {
    if (in_main(static_cast<int>(t))) continue;
    if (!exterior[t] && !include_holes) continue;
    for (int v : tris[t]) {
      if (!in_main_vertex[v]) flag[v] = 1;
    }
  }

  for (std::size_t i = 0; i < n; ++i) boundary[i] = flag[tri.representative[i]] != 0;
  return boundary;
}

}  // namespace kkb
