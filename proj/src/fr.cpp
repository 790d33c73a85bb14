#include <algorithm>
#include <cmath>
#include <limits>

#include "kkb/baselines.hpp"
#include "kkb/error.hpp"
#include "pair_math.hpp"

namespace kkb {

namespace {

void validate(const FrParams& p) {
  if (!(p.attraction > 0.0) || !(p.repulsion > 0.0) || !(p.width > 0.0) || !(p.height > 0.0) ||
      p.max_iteration < 1 || !(p.epsilon > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid FR parameters");
  }
}

}  // namespace

double fr_scale_after(const FrParams& params, int iterations) {
  double s = params.width / 10.0;
  for (int it = 1; it <= iterations; ++it) {
    s *= 1.0 - static_cast<double>(it) / params.max_iteration;
  }
  return s;
}

LayoutResult fr_layout(const Topology& topology, const FrParams& params, const TraceHook& hook,
                       const EnergyProbe& energy) {
  validate(params);
  Layout initial =
      random_layout(topology.node_count(), {params.width, params.height}, params.seed);
  return fr_layout_from(topology, std::move(initial), params, hook, energy);
}

LayoutResult fr_layout_from(const Topology& topology, Layout layout, const FrParams& params,
                            const TraceHook& hook, const EnergyProbe& energy) {
  validate(params);
  const std::size_t n = topology.node_count();
  if (layout.size() != n) throw Error(ErrorCode::kMismatch, "layout and topology sizes differ");
  layout.frame = {params.width, params.height};

  RunClock clock(params.run);
  TraceRecorder recorder(clock, params.run, hook);
  auto current_energy = [&] {
    if (!energy) return std::numeric_limits<double>::quiet_NaN();
    RunClock::Pause pause(clock);
    return energy(layout);
  };

  const double area_root = std::sqrt(params.width * params.height / static_cast<double>(n));
  const double k_rep = params.repulsion * area_root;
  const double k_att = params.attraction * area_root;
  const double frame = std::max(params.width, params.height);
  const double half_w = params.width / 2.0;
  const double half_h = params.height / 2.0;

  std::vector<Point2> disp(n);
  double s = params.width / 10.0;
  int it = 0;
  for (;;) {
    if (recorder.due()) recorder.record(layout, current_energy(), static_cast<std::uint64_t>(it));
    Termination why;
    if (clock.exhausted()) {
      why = Termination::kBudget;
    } else if (s < params.epsilon) {
      why = Termination::kEpsilon;
    } else {
      std::fill(disp.begin(), disp.end(), Point2{});
      auto& pos = layout.positions;
      for (NodeId u = 0; u < n; ++u) {
        for (NodeId v = u + 1; v < n; ++v) {
          const auto sep = detail::separation(u, v, pos[u], pos[v], frame);
          // k^2/d along the unit vector, i.e. k^2/d^2 times (dx, dy)
          const double f = k_rep * k_rep / (sep.r * sep.r);
          disp[u].x += sep.dx * f;
          disp[u].y += sep.dy * f;
          disp[v].x -= sep.dx * f;
          disp[v].y -= sep.dy * f;
        }
      }
      for (const Edge& e : topology.edges()) {
        const auto sep = detail::separation(e.u, e.v, pos[e.u], pos[e.v], frame);
        const double f = sep.r / k_att;  // d^2/k along the unit vector
        disp[e.u].x -= sep.dx * f;
        disp[e.u].y -= sep.dy * f;
        disp[e.v].x += sep.dx * f;
        disp[e.v].y += sep.dy * f;
      }
      for (NodeId v = 0; v < n; ++v) {
        const double len = std::hypot(disp[v].x, disp[v].y);
        if (len > 0.0) {
          const double move = std::min(len, s) / len;
          pos[v].x += disp[v].x * move;
          pos[v].y += disp[v].y * move;
        }
        pos[v].x = std::clamp(pos[v].x, -half_w, half_w);
        pos[v].y = std::clamp(pos[v].y, -half_h, half_h);
      }
      clock.charge(n * (n - 1) / 2 + topology.edge_count() + n);
      ++it;
      s *= 1.0 - static_cast<double>(it) / params.max_iteration;
      continue;
    }
    return {layout, recorder.finish(layout, current_energy(), static_cast<std::uint64_t>(it), why)};
  }
}

}  // namespace kkb
