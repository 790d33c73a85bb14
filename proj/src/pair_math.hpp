#pragma once

#include <cmath>
#include <numbers>

#include "kkb/geometry.hpp"
#include "kkb/graph.hpp"
#include "kkb/rng.hpp"

namespace kkb::detail {

struct Separation {
  double dx;
  double dy;
  double r;
};

// p_i - p_j and its length. Coincident nodes are separated by a fixed
// pseudo-random vector of length 1e-6 * frame_side derived from the pair ids,
// antisymmetric in (i, j), so runs stay deterministic.
inline Separation separation(NodeId i, NodeId j, Point2 pi, Point2 pj, double frame_side) {
  const double dx = pi.x - pj.x;
  const double dy = pi.y - pj.y;
  const double r = std::sqrt(dx * dx + dy * dy);
  if (r > 1e-12 * frame_side) return {dx, dy, r};
  const NodeId lo = i < j ? i : j;
  const NodeId hi = i < j ? j : i;
  const double angle =
      2.0 * std::numbers::pi * unit_from_bits(mix64((std::uint64_t{lo} << 32) | hi));
  const double len = 1e-6 * frame_side;
  const double sign = i < j ? 1.0 : -1.0;
  return {sign * len * std::cos(angle), sign * len * std::sin(angle), len};
}

}  // namespace kkb::detail
