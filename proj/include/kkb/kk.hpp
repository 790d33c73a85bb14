#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include "kkb/graph.hpp"
#include "kkb/layout.hpp"

namespace kkb {

struct KkParams {
  double K = 1.0;
  double L0 = 600.0;
  double epsilon = 1e-2;
  double energy_stop = 1.0;
  int newton_cap = 50;
  std::uint64_t seed = 1;
  RunOptions run;
  // Keep every node's gradient up to date in O(n) per move instead of
  // recomputing all of them before each selection.
  bool incremental = false;
};

// Which spring terms of a node are active, and how they are weighted.
//   partners        nodes that interact with the moving node (empty = all)
//   node_weight     per-node stiffness multiplier; the moving node's weight
//                   scales each of its springs
//   symmetric       use w_i * w_j instead of w_i
struct SpringScope {
  std::span<const NodeId> partners;
  std::span<const double> node_weight;
  bool symmetric = false;
};

struct NodeGradient {
  double gx = 0.0;
  double gy = 0.0;
  double delta = 0.0;
};

/// Sum over i<j of 0.5 k_ij (|p_i - p_j| - l_ij)^2.
double kk_energy(const Layout& layout, const DistanceModel& model);
/// Energy restricted to pairs inside `members`.
double kk_energy(const Layout& layout, const DistanceModel& model,
                 std::span<const NodeId> members);

NodeGradient kk_gradient(NodeId m, const Layout& layout, const DistanceModel& model,
                         const SpringScope& scope = {});

/// One Newton-Raphson displacement for node m (gradient-descent fallback when
/// the 2x2 Hessian is singular).
Point2 kk_newton_step(NodeId m, const Layout& layout, const DistanceModel& model,
                      const SpringScope& scope = {});

struct NewtonOutcome {
  int steps = 0;
  NodeGradient final;
};

/// Repeats Newton steps on node m until its delta is <= epsilon or `cap` steps
/// were taken. `pair_ops`, when given, accumulates the partner evaluations.
NewtonOutcome kk_newton_update(NodeId m, Layout& layout, const DistanceModel& model,
                               double epsilon, int cap = 50, const SpringScope& scope = {},
                               std::uint64_t* pair_ops = nullptr);

struct KkObserver {
  std::function<void(NodeId)> on_select;
};

/// Kamada-Kawai: repeatedly move the node with the largest delta.
LayoutResult kk_layout(const Topology& topology, const DistanceModel& model,
                       const KkParams& params, const TraceHook& hook = {},
                       const KkObserver* observer = nullptr);

/// Same, from a caller-supplied starting layout.
LayoutResult kk_layout_from(Layout initial, const DistanceModel& model, const KkParams& params,
                            const TraceHook& hook = {}, const KkObserver* observer = nullptr);

}  // namespace kkb
