#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "kkb/graph.hpp"
#include "kkb/kk.hpp"
#include "kkb/layout.hpp"
#include "kkb/radio.hpp"

namespace kkb {

/// Per-edge length estimates (meters) from the received signal strength.
std::vector<double> fspl_edge_lengths(const Topology& topology, const FsplParams& fspl = {});

/// Distance model over signal-strength path lengths instead of hop counts.
DistanceModel kk_ss_model(const Topology& topology, const FsplParams& fspl, double L0, double K);

/// Scale constant that gives an edge of average estimated length the same
/// stiffness K has for a single hop.
double ss_equivalent_scale(const Topology& topology, const FsplParams& fspl, double K);

// Per-node decaying stiffness m in [0, 1] and selection counts t.
struct DecayState {
  std::vector<double> m;
  std::vector<std::uint32_t> t;
  double p = 0.05;
  double rested_value = 0.1;

  static DecayState fresh(std::size_t n) {
    DecayState s;
    s.m.assign(n, 1.0);
    s.t.assign(n, 0);
    return s;
  }
};

/// m' = clamp(m - z p^t, 0, 1), then t is incremented. Returns m'.
double update_decaying_stiffness(DecayState& state, NodeId v, double z);

struct StabilityState {
  double me = 0.0;
  double sigma = 0.0;
  double r = 0.0;
  std::uint32_t tt = 100;
  double epsilon_r = 0.1;
  std::uint32_t stall_window = 3;
};

/// Edge-length fit of the layout against reference lengths after removing the
/// drawing scale. `edges` index into topology.edges(); empty means all edges.
/// Only me, sigma and r of the returned state are computed.
StabilityState stability_ratio(const Layout& layout, const Topology& topology,
                               std::span<const double> reference_lengths,
                               std::span<const std::uint32_t> edges = {});

struct StartingArea {
  std::vector<NodeId> members;  // sorted
  std::uint32_t generation = 0;
};

struct MsObserver {
  std::function<void(NodeId)> on_select;
  std::function<void(std::uint64_t selections)> on_refill;
};

struct MsParams {
  double k_percent = 5.0;
  unsigned hop_filter = 3;  // 0 disables the "within three hops" exclusion
};

/// KK with multi-node selection, optionally weighted by decaying stiffness
/// and restricted to a starting area.
LayoutResult kk_ms_layout(const Topology& topology, const DistanceModel& model,
                          const MsParams& ms, const KkParams& params, DecayState* decay = nullptr,
                          const StartingArea* area = nullptr, const TraceHook& hook = {},
                          const MsObserver* observer = nullptr);
LayoutResult kk_ms_layout_from(const Topology& topology, Layout initial,
                               const DistanceModel& model, const MsParams& ms,
                               const KkParams& params, DecayState* decay = nullptr,
                               const StartingArea* area = nullptr, const TraceHook& hook = {},
                               const MsObserver* observer = nullptr);

enum class DsBaseModel { kSignalStrength, kHopCount };

struct DsParams {
  double k_percent = 5.0;
  unsigned hop_filter = 3;
  StabilityState stability;
  std::uint32_t fine_tune_tt = 10;
  double improvement = 0.01;  // relative r improvement that resets the stall count
  double decay_rate = 0.05;
  double rested_value = 0.1;
  DsBaseModel base = DsBaseModel::kSignalStrength;
  bool symmetric_decay = false;       // k_ij * m_i * m_j
  bool neighbor_max_stiffness = false;  // new nodes take their neighbours' largest m
  FsplParams fspl;
};

struct DsPhaseRecord {
  std::uint32_t phase = 1;
  std::size_t area_size = 0;
  std::uint64_t selections = 0;
  double elapsed_ms = 0.0;
};

struct DsObserver {
  std::function<void(const StartingArea&, const DecayState&)> on_round;
  std::function<void(const StartingArea&)> on_expand;
};

struct DsResult {
  LayoutResult result;
  std::vector<DsPhaseRecord> phases;  // one record per area change / phase switch
  std::size_t expansions = 0;
  std::uint32_t final_phase = 1;
};

/// Multi-node selection with a growing starting area and decaying stiffness.
DsResult kk_ms_ds_layout(const Topology& topology, const DsParams& ds, const KkParams& params,
                         const TraceHook& hook = {}, const DsObserver* observer = nullptr);

/// Model a DS run optimises (also used for its trace energy).
DistanceModel ds_base_model(const Topology& topology, const DsParams& ds, const KkParams& params);

/// Node of highest degree (smallest id on ties) and everything within 2 hops.
StartingArea initial_starting_area(const Topology& topology);
/// Adds every node within 2 hops of the area.
void expand_starting_area(const Topology& topology, StartingArea& area);

}  // namespace kkb
