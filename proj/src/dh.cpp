#include <cmath>
#include <numbers>

#include "kkb/baselines.hpp"
#include "kkb/error.hpp"
#include "kkb/rng.hpp"

namespace kkb {

namespace {

double pair_energy(double y) {
  const double inv = 1.0 / (y + 1.0);
  return y * y + inv * inv;
}

double node_energy(const std::vector<Point2>& pos, NodeId v, Point2 at) {
  double e = 0.0;
  for (NodeId j = 0; j < pos.size(); ++j) {
    if (j != v) e += pair_energy(distance(at, pos[j]));
  }
  return e;
}

}  // namespace

double dh_energy(const Layout& layout) {
  const auto& pos = layout.positions;
  double e = 0.0;
  for (std::size_t i = 0; i < pos.size(); ++i)
    for (std::size_t j = i + 1; j < pos.size(); ++j) e += pair_energy(distance(pos[i], pos[j]));
  return e;
}

double dh_acceptance_probability(double delta_energy, double boltzmann_k, double temperature) {
  if (delta_energy <= 0.0) return 1.0;
  return std::exp(-delta_energy / (boltzmann_k * temperature));
}

LayoutResult dh_layout(const Topology& topology, const DhParams& params, const TraceHook& hook,
                       const DhObserver* observer) {
  if (!(params.cooling > 0.0 && params.cooling < 1.0) ||
      !(params.radius_shrink > 0.0 && params.radius_shrink < 1.0) ||
      !(params.t_initial > 0.0) || !(params.disk_radius > 0.0) || !(params.boltzmann_k > 0.0) ||
      params.itmax_factor < 1 || !(params.epsilon > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid DH parameters");
  }
  const std::size_t n = topology.node_count();
  Layout layout = random_layout(n, {params.width, params.height}, params.seed);
  Rng rng(derive_seed(params.seed, 0xd4));
  auto& pos = layout.positions;

  RunClock clock(params.run);
  TraceRecorder recorder(clock, params.run, hook);
  const std::uint64_t itmax = static_cast<std::uint64_t>(params.itmax_factor) * n;

  double energy = dh_energy(layout);
  clock.charge(n * (n - 1) / 2);
  double temperature = params.t_initial;
  double radius = params.disk_radius;
  std::uint64_t iteration = 0;
  Termination why = Termination::kEpsilon;
  bool out_of_time = false;
  while (!out_of_time) {
    if (recorder.due()) recorder.record(layout, energy, iteration);
    if (clock.exhausted()) {
      why = Termination::kBudget;
      break;
    }
    if (temperature < params.epsilon) {
      why = Termination::kEpsilon;
      break;
    }
    for (std::uint64_t i = 0; i < itmax; ++i) {
      const auto v = static_cast<NodeId>(rng.below(n));
      const double angle = 2.0 * std::numbers::pi * rng.uniform();
      const Point2 candidate{pos[v].x + radius * std::cos(angle),
                             pos[v].y + radius * std::sin(angle)};
      const double delta = node_energy(pos, v, candidate) - node_energy(pos, v, pos[v]);
      clock.charge(2 * (n - 1));
      ++iteration;
      bool accept = delta <= 0.0;
      if (!accept) {
        const double phi = rng.uniform();
        accept = phi <= dh_acceptance_probability(delta, params.boltzmann_k, temperature);
      }
      if (accept) {
        pos[v] = candidate;
        energy += delta;
        if (observer && observer->on_accept) observer->on_accept(layout, energy);
      }
      if ((iteration & 255) == 0) {
        if (recorder.due()) recorder.record(layout, energy, iteration);
        if (clock.exhausted()) {
          why = Termination::kBudget;
          out_of_time = true;
          break;
        }
      }
    }
    if (out_of_time) break;
    energy = dh_energy(layout);  // drop accumulated rounding
    clock.charge(n * (n - 1) / 2);
    temperature *= params.cooling;
    radius *= params.radius_shrink;
  }
  return {layout, recorder.finish(layout, energy, iteration, why)};
}

}  // namespace kkb
