#include "kkb/kk_accel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "kkb/error.hpp"
#include "pair_math.hpp"

namespace kkb {

std::vector<double> fspl_edge_lengths(const Topology& topology, const FsplParams& fspl) {
  std::vector<double> lengths;
  lengths.reserve(topology.edge_count());
  for (const Edge& e : topology.edges()) lengths.push_back(fspl_distance(e.rssi_dbm, fspl));
  return lengths;
}

DistanceModel kk_ss_model(const Topology& topology, const FsplParams& fspl, double L0, double K) {
  const auto lengths = fspl_edge_lengths(topology, fspl);
  return build_distance_model(all_pairs_graph_distance(topology, lengths), L0, K);
}

double ss_equivalent_scale(const Topology& topology, const FsplParams& fspl, double K) {
  const auto lengths = fspl_edge_lengths(topology, fspl);
  if (lengths.empty()) return K;
  const double mean = std::accumulate(lengths.begin(), lengths.end(), 0.0) /
                      static_cast<double>(lengths.size());
  return K * mean * mean;
}

double update_decaying_stiffness(DecayState& state, NodeId v, double z) {
  if (!(z >= 0.0 && z <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "z must lie in [0, 1]");
  const double m = state.m[v] - z * std::pow(state.p, static_cast<double>(state.t[v]));
  state.m[v] = std::clamp(m, 0.0, 1.0);
  ++state.t[v];
  return state.m[v];
}

StabilityState stability_ratio(const Layout& layout, const Topology& topology,
                               std::span<const double> reference_lengths,
                               std::span<const std::uint32_t> edges) {
  if (reference_lengths.size() != topology.edge_count()) {
    throw Error(ErrorCode::kMismatch, "reference lengths must cover every edge");
  }
  std::vector<std::uint32_t> all;
  if (edges.empty()) {
    all.resize(topology.edge_count());
    std::iota(all.begin(), all.end(), 0u);
    edges = all;
  }
  if (edges.empty()) throw Error(ErrorCode::kDegenerate, "no edges in scope");

  double cross = 0.0, drawn_sq = 0.0;
  std::vector<double> drawn(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Edge& e = topology.edges()[edges[i]];
    drawn[i] = distance(layout.positions[e.u], layout.positions[e.v]);
    cross += drawn[i] * reference_lengths[edges[i]];
    drawn_sq += drawn[i] * drawn[i];
  }
  const double c = drawn_sq > 0.0 ? cross / drawn_sq : 0.0;
  const double count = static_cast<double>(edges.size());
  double sum = 0.0, abs_sum = 0.0;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const double diff = c * drawn[i] - reference_lengths[edges[i]];
    sum += diff;
    abs_sum += std::abs(diff);
  }
  StabilityState s;
  s.me = sum / count;
  double var = 0.0;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const double dev = c * drawn[i] - reference_lengths[edges[i]] - s.me;
    var += dev * dev;
  }
  s.sigma = std::sqrt(var / count);
  // relative to the reference scale, a spread this small is rounding noise
  const double ref_scale = std::abs(cross) / std::max(std::sqrt(drawn_sq), 1e-300) / count;
  s.r = s.sigma > 1e-12 * ref_scale ? (abs_sum / count) / s.sigma : 0.0;
  return s;
}

StartingArea initial_starting_area(const Topology& topology) {
  NodeId start = 0;
  for (NodeId v = 1; v < topology.node_count(); ++v) {
    if (topology.degree(v) > topology.degree(start)) start = v;
  }
  std::vector<std::uint32_t> mark(topology.node_count(), 0);
  mark_within_hops(topology, start, 2, mark, 1);
  StartingArea area;
  for (NodeId v = 0; v < topology.node_count(); ++v)
    if (mark[v]) area.members.push_back(v);
  return area;
}

void expand_starting_area(const Topology& topology, StartingArea& area) {
  std::vector<std::uint32_t> mark(topology.node_count(), 0);
  for (NodeId v : area.members) mark[v] = 1;
  std::vector<NodeId> frontier = area.members;
  for (int hop = 0; hop < 2; ++hop) {
    std::vector<NodeId> next;
    for (NodeId v : frontier) {
      for (NodeId w : topology.neighbors(v)) {
        if (!mark[w]) {
          mark[w] = 1;
          next.push_back(w);
        }
      }
    }
    frontier.swap(next);
  }
  area.members.clear();
  for (NodeId v = 0; v < topology.node_count(); ++v)
    if (mark[v]) area.members.push_back(v);
  ++area.generation;
}

namespace {

// Algorithm core shared by KK-MS and KK-MS-DS: a queue of the top-k nodes by
// selection key, refilled from every node in scope after sqrt(|scope|)
// selections.
class MultiSelect {
 public:
  struct RefillStats {
    double max_delta = 0.0;
    double energy = 0.0;
    bool settled = false;  // no queued node would move
  };

  MultiSelect(const Topology& topology, const DistanceModel& model, Layout& layout,
              const MsParams& ms, const KkParams& params, RunClock& clock,
              const MsObserver* observer)
      : topology_(topology),
        model_(model),
        layout_(layout),
        ms_(ms),
        params_(params),
        clock_(clock),
        observer_(observer),
        n_(model.size()),
        delta_(n_, 0.0),
        gx_(n_, 0.0),
        gy_(n_, 0.0),
        hop_mark_(n_, 0) {
    if (!(ms.k_percent > 0.0 && ms.k_percent <= 100.0)) {
      throw Error(ErrorCode::kInvalidArgument, "k percent must lie in (0, 100]");
    }
    std::vector<NodeId> all(n_);
    std::iota(all.begin(), all.end(), 0u);
    set_scope(all, /*restricted=*/false);
  }

  void set_scope(std::vector<NodeId> members, bool restricted) {
    members_ = std::move(members);
    restricted_ = restricted;
    const double s = static_cast<double>(members_.size());
    k_count_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(ms_.k_percent / 100.0 * s)));
    period_ = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(std::sqrt(s))));
    refill_due_ = true;
  }

  void set_decay(DecayState* decay, const std::vector<char>* active, bool symmetric) {
    decay_ = decay;
    active_ = active;
    symmetric_ = symmetric;
    refill_due_ = true;
  }

  bool refill_due() const { return refill_due_; }
  std::uint64_t selections() const { return selections_; }
  std::uint64_t rounds() const { return rounds_; }
  const std::vector<NodeId>& members() const { return members_; }

  RefillStats refill() {
    if (cursor_ > 0) ++rounds_;  // the refill closes the current pass
    sweep();
    RefillStats stats;
    stats.energy = scope_energy_;
    for (NodeId v : members_) stats.max_delta = std::max(stats.max_delta, delta_[v]);
    max_delta_ = stats.max_delta;

    std::vector<std::pair<double, NodeId>> ranked;
    ranked.reserve(members_.size());
    for (NodeId v : members_) ranked.emplace_back(key(v), v);
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    queue_.clear();
    ++stamp_;
    for (const auto& [k, v] : ranked) {
      if (queue_.size() >= k_count_) break;
      if (ms_.hop_filter > 0 && hop_mark_[v] == stamp_) continue;
      queue_.push_back(v);
      if (ms_.hop_filter > 0) mark_within_hops(topology_, v, ms_.hop_filter, hop_mark_, stamp_);
    }
    stats.settled = true;
    for (NodeId v : queue_) {
      if (weight(v) * delta_[v] > params_.epsilon) stats.settled = false;
    }
    cursor_ = 0;
    round_moved_ = false;
    refill_due_ = false;
    next_refill_ = selections_ + period_;
    if (observer_ && observer_->on_refill) observer_->on_refill(selections_);
    return stats;
  }

  // Pops the next queued node and updates it. Returns false when the round
  // ended without any node moving, in which case a refill is scheduled.
  bool select_next() {
    if (cursor_ == queue_.size()) {
      ++rounds_;
      if (!round_moved_) {
        cursor_ = 0;
        selections_ = next_refill_;
        refill_due_ = true;
        return false;
      }
      std::stable_sort(queue_.begin(), queue_.end(), [&](NodeId a, NodeId b) {
        const double ka = key(a), kb = key(b);
        return ka != kb ? ka > kb : a < b;
      });
      cursor_ = 0;
      round_moved_ = false;
    }
    const NodeId v = queue_[cursor_++];
    update(v);
    ++selections_;
    if (selections_ >= next_refill_) refill_due_ = true;
    return true;
  }

  double scope_energy() const {
    return restricted_ ? kk_energy(layout_, model_, members_) : kk_energy(layout_, model_);
  }

 private:
  double weight(NodeId v) const { return decay_ ? decay_->m[v] : 1.0; }

  double key(NodeId v) const {
    if (!decay_) return delta_[v];
    return max_delta_ > 0.0 ? decay_->m[v] * delta_[v] / max_delta_ : 0.0;
  }

  SpringScope spring_scope(bool weighted) const {
    SpringScope s;
    if (restricted_) s.partners = members_;
    if (weighted && decay_) {
      s.node_weight = decay_->m;
      s.symmetric = symmetric_;
    }
    return s;
  }

  std::uint64_t partner_count() const { return members_.size() - 1; }

  void update(NodeId v) {
    double pre = delta_[v];
    if (decay_) {
      pre = kk_gradient(v, layout_, model_, spring_scope(false)).delta;
      clock_.charge(partner_count());
    }
    const double gate = decay_ && !symmetric_ ? decay_->m[v] * pre : pre;
    if (gate <= params_.epsilon && !symmetric_) {
      delta_[v] = pre;
      return;
    }
    std::uint64_t ops = 0;
    const auto outcome = kk_newton_update(v, layout_, model_, params_.epsilon, params_.newton_cap,
                                          spring_scope(true), &ops);
    clock_.charge(ops);
    if (outcome.steps == 0) {
      delta_[v] = pre;
      return;
    }
    round_moved_ = true;
    if (observer_ && observer_->on_select) observer_->on_select(v);
    if (decay_) {
      delta_[v] = kk_gradient(v, layout_, model_, spring_scope(false)).delta;
      clock_.charge(partner_count());
      if (!active_ || (*active_)[v]) {
        const double top = std::max(max_delta_, pre);
        update_decaying_stiffness(*decay_, v, top > 0.0 ? pre / top : 0.0);
      }
    } else {
      delta_[v] = outcome.final.delta;
    }
  }

  // Unweighted gradients of every member and the energy among members.
  void sweep() {
    const double lpu = model_.length_per_unit();
    const double K = model_.scale_constant();
    const double L0 = model_.frame_side();
    const auto& pos = layout_.positions;
    for (NodeId v : members_) gx_[v] = gy_[v] = 0.0;
    double energy = 0.0;
    for (std::size_t a = 0; a < members_.size(); ++a) {
      const NodeId i = members_[a];
      const auto d = model_.distances().row(i);
      double gx = 0.0, gy = 0.0, e = 0.0;
      for (std::size_t b = a + 1; b < members_.size(); ++b) {
        const NodeId j = members_[b];
        const auto s = detail::separation(i, j, pos[i], pos[j], L0);
        const double k = K / (d[j] * d[j]);
        const double gap = s.r - lpu * d[j];
        const double f = k * gap / s.r;
        gx += f * s.dx;
        gy += f * s.dy;
        gx_[j] -= f * s.dx;
        gy_[j] -= f * s.dy;
        e += k * gap * gap;
      }
      gx_[i] += gx;
      gy_[i] += gy;
      energy += 0.5 * e;
    }
    for (NodeId v : members_) delta_[v] = std::hypot(gx_[v], gy_[v]);
    scope_energy_ = energy;
    const std::uint64_t s = members_.size();
    clock_.charge(s * (s - 1) / 2);
  }

  const Topology& topology_;
  const DistanceModel& model_;
  Layout& layout_;
  MsParams ms_;
  KkParams params_;
  RunClock& clock_;
  const MsObserver* observer_;
  std::size_t n_;

  std::vector<NodeId> members_;
  bool restricted_ = false;
  std::size_t k_count_ = 1;
  std::uint64_t period_ = 1;

  DecayState* decay_ = nullptr;
  const std::vector<char>* active_ = nullptr;
  bool symmetric_ = false;

  std::vector<double> delta_;
  std::vector<double> gx_, gy_;
  double max_delta_ = 0.0;
  double scope_energy_ = 0.0;

  std::vector<NodeId> queue_;
  std::size_t cursor_ = 0;
  bool round_moved_ = false;
  bool refill_due_ = true;
  std::uint64_t selections_ = 0;
  std::uint64_t rounds_ = 0;
  std::uint64_t next_refill_ = 0;

  std::vector<std::uint32_t> hop_mark_;
  std::uint32_t stamp_ = 0;
};

void check_model(const Topology& topology, const DistanceModel& model, const Layout& layout) {
  if (topology.node_count() != model.size() || layout.size() != model.size()) {
    throw Error(ErrorCode::kMismatch, "topology, layout and distance model sizes differ");
  }
}

}  // namespace

LayoutResult kk_ms_layout(const Topology& topology, const DistanceModel& model,
                          const MsParams& ms, const KkParams& params, DecayState* decay,
                          const StartingArea* area, const TraceHook& hook,
                          const MsObserver* observer) {
  Layout initial = random_layout(model.size(), {params.L0, params.L0}, params.seed);
  return kk_ms_layout_from(topology, std::move(initial), model, ms, params, decay, area, hook,
                           observer);
}

LayoutResult kk_ms_layout_from(const Topology& topology, Layout layout,
                               const DistanceModel& model, const MsParams& ms,
                               const KkParams& params, DecayState* decay,
                               const StartingArea* area, const TraceHook& hook,
                               const MsObserver* observer) {
  check_model(topology, model, layout);
  if (decay && (decay->m.size() != model.size() || decay->t.size() != model.size())) {
    throw Error(ErrorCode::kMismatch, "decay state does not cover every node");
  }
  RunClock clock(params.run);
  TraceRecorder recorder(clock, params.run, hook);
  MultiSelect engine(topology, model, layout, ms, params, clock, observer);
  if (area) {
    if (area->members.empty()) throw Error(ErrorCode::kInvalidArgument, "starting area is empty");
    engine.set_scope(area->members, area->members.size() < model.size());
  }
  engine.set_decay(decay, nullptr, false);

  auto energy_now = [&] {
    RunClock::Pause pause(clock);
    return engine.scope_energy();
  };

  for (;;) {
    if (engine.refill_due()) {
      const auto stats = engine.refill();
      if (recorder.due()) recorder.record(layout, stats.energy, engine.selections());
      Termination why;
      if (clock.exhausted()) {
        why = Termination::kBudget;
      } else if (stats.energy < params.energy_stop) {
        why = Termination::kEnergy;
      } else if (stats.max_delta <= params.epsilon) {
        why = Termination::kEpsilon;
      } else if (stats.settled) {
        why = Termination::kStable;
      } else {
        continue;
      }
      return {layout, recorder.finish(layout, stats.energy, engine.selections(), why)};
    }
    engine.select_next();
    if (recorder.due()) recorder.record(layout, energy_now(), engine.selections());
    if (clock.exhausted()) {
      return {layout, recorder.finish(layout, energy_now(), engine.selections(),
                                      Termination::kBudget)};
    }
  }
}

DistanceModel ds_base_model(const Topology& topology, const DsParams& ds, const KkParams& params) {
  if (ds.base == DsBaseModel::kHopCount) {
    return build_distance_model(all_pairs_graph_distance(topology), params.L0, params.K);
  }
  return kk_ss_model(topology, ds.fspl, params.L0, ss_equivalent_scale(topology, ds.fspl, params.K));
}

DsResult kk_ms_ds_layout(const Topology& topology, const DsParams& ds, const KkParams& params,
                         const TraceHook& hook, const DsObserver* observer) {
  const std::size_t n = topology.node_count();
  if (n < 2) throw Error(ErrorCode::kDegenerate, "degenerate topology: fewer than two nodes");
  if (!(ds.decay_rate > 0.0 && ds.decay_rate < 1.0) ||
      !(ds.rested_value >= 0.0 && ds.rested_value <= 1.0) || ds.stability.tt == 0 ||
      ds.fine_tune_tt == 0 || ds.stability.stall_window == 0 || !(ds.stability.epsilon_r >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid KK-MS-DS parameters");
  }
  const DistanceModel model = ds_base_model(topology, ds, params);
  const auto reference = fspl_edge_lengths(topology, ds.fspl);
  Layout layout = random_layout(n, {params.L0, params.L0}, params.seed);

  RunClock clock(params.run);
  TraceRecorder recorder(clock, params.run, hook);
  MsParams ms{ds.k_percent, ds.hop_filter};
  MultiSelect engine(topology, model, layout, ms, params, clock, nullptr);

  DecayState decay = DecayState::fresh(n);
  decay.p = ds.decay_rate;
  decay.rested_value = ds.rested_value;
  std::vector<char> active(n, 0);
  std::vector<char> in_area(n, 0);

  StartingArea area = initial_starting_area(topology);
  for (NodeId v : area.members) in_area[v] = active[v] = 1;
  engine.set_scope(area.members, area.members.size() < n);
  engine.set_decay(&decay, &active, ds.symmetric_decay);

  DsResult out;
  std::uint32_t phase = 1;
  std::uint32_t tt = ds.stability.tt;
  double best_r = std::numeric_limits<double>::infinity();
  std::uint32_t stall = 0;
  std::uint64_t next_check = tt;

  auto area_edges = [&] {
    std::vector<std::uint32_t> edges;
    for (std::uint32_t e = 0; e < topology.edge_count(); ++e) {
      const Edge& edge = topology.edges()[e];
      if (in_area[edge.u] && in_area[edge.v]) edges.push_back(e);
    }
    return edges;
  };
  std::vector<std::uint32_t> scope_edges = area_edges();
  auto log_phase = [&] {
    out.phases.push_back({phase, area.members.size(), engine.selections(), clock.elapsed_ms()});
  };
  auto full_energy = [&] {
    RunClock::Pause pause(clock);
    return kk_energy(layout, model);
  };
  auto finish = [&](Termination why) {
    out.final_phase = phase;
    out.result = {layout, recorder.finish(layout, full_energy(), engine.selections(), why)};
    return out;
  };
  // Moves the run forward once the current area counts as stable.
  auto advance_phase = [&]() -> bool {
    if (phase == 4) return false;
    if (area.members.size() == n) {
      phase = 4;
      engine.set_decay(nullptr, nullptr, false);
      tt = ds.fine_tune_tt;
    } else {
      std::vector<NodeId> before = area.members;
      expand_starting_area(topology, area);
      ++out.expansions;
      for (NodeId v : before) {
        decay.m[v] = ds.rested_value;
        active[v] = 0;
      }
      for (NodeId v : area.members) {
        if (in_area[v]) continue;
        double m = 1.0;
        if (ds.neighbor_max_stiffness) {
          m = 0.0;
          for (NodeId w : topology.neighbors(v))
            if (in_area[w]) m = std::max(m, decay.m[w]);
        }
        decay.m[v] = m;
        decay.t[v] = 0;
        active[v] = 1;
      }
      for (NodeId v : area.members) in_area[v] = 1;
      engine.set_scope(area.members, area.members.size() < n);
      scope_edges = area_edges();
      phase = 3;
      if (observer && observer->on_expand) observer->on_expand(area);
    }
    best_r = std::numeric_limits<double>::infinity();
    stall = 0;
    next_check = engine.rounds() + tt;
    log_phase();
    return true;
  };

  log_phase();
  for (;;) {
    if (recorder.due()) recorder.record(layout, full_energy(), engine.selections());
    if (clock.exhausted()) return finish(Termination::kBudget);

    bool stable = false;
    if (engine.refill_due()) {
      const auto stats = engine.refill();
      if (phase == 4 && stats.max_delta <= params.epsilon) return finish(Termination::kEpsilon);
      if (area.members.size() == n && stats.energy < params.energy_stop) {
        return finish(Termination::kEnergy);
      }
      stable = stats.settled || stats.max_delta <= params.epsilon;
    } else {
      engine.select_next();
    }
    if (observer && observer->on_round) observer->on_round(area, decay);

    if (!stable && engine.rounds() >= next_check) {
      next_check = engine.rounds() + tt;
      if (!scope_edges.empty()) {
        const auto s = stability_ratio(layout, topology, reference, scope_edges);
        clock.charge(scope_edges.size());
        if (s.r < best_r * (1.0 - ds.improvement)) {
          best_r = s.r;
          stall = 0;
        } else {
          ++stall;
        }
        stable = s.r < ds.stability.epsilon_r || stall >= ds.stability.stall_window;
      }
    }
    if (stable && !advance_phase()) return finish(Termination::kStable);
  }
}

}  // namespace kkb
