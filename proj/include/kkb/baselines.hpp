#pragma once

#include <cstdint>
#include <functional>

#include "kkb/graph.hpp"
#include "kkb/layout.hpp"

namespace kkb {

struct FrParams {
  double attraction = 0.75;  // a
  double repulsion = 0.75;   // r
  double width = 600.0;
  double height = 600.0;
  int max_iteration = 1000;
  double epsilon = 1e-6;
  std::uint64_t seed = 1;
  RunOptions run;
};

/// Displacement scale after `iterations` updates: (W/10) * prod_{j<=it}(1 - j/max).
double fr_scale_after(const FrParams& params, int iterations);

// Energy reported in FR traces, since FR has no objective of its own.
using EnergyProbe = std::function<double(const Layout&)>;

/// Fruchterman-Reingold: repulsion k_r^2/d between all pairs, attraction
/// d^2/k_a along edges, moves capped by the cooling scale s.
LayoutResult fr_layout(const Topology& topology, const FrParams& params,
                       const TraceHook& hook = {}, const EnergyProbe& energy = {});
LayoutResult fr_layout_from(const Topology& topology, Layout initial, const FrParams& params,
                            const TraceHook& hook = {}, const EnergyProbe& energy = {});

struct DhParams {
  double t_initial = 180.0;      // 0.3 W
  double cooling = 0.95;         // t_c
  double disk_radius = 60.0;     // W / 10
  double radius_shrink = 0.95;   // r_c
  double boltzmann_k = 1.0;
  int itmax_factor = 20;
  double epsilon = 1e-3;
  double width = 600.0;
  double height = 600.0;
  std::uint64_t seed = 1;
  RunOptions run;
};

/// Sum over pairs of y^2 + 1/(y+1)^2, y the Euclidean distance.
double dh_energy(const Layout& layout);

/// Metropolis acceptance probability exp(-(E'-E)/(k T)), 1 for downhill moves.
double dh_acceptance_probability(double delta_energy, double boltzmann_k, double temperature);

struct DhObserver {
  // Called after each accepted move with the tracked energy.
  std::function<void(const Layout&, double energy)> on_accept;
};

/// Davidson-Harel simulated annealing.
LayoutResult dh_layout(const Topology& topology, const DhParams& params,
                       const TraceHook& hook = {}, const DhObserver* observer = nullptr);

}  // namespace kkb
