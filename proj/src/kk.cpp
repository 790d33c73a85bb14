#include "kkb/kk.hpp"

#include <cmath>

#include "kkb/error.hpp"
#include "pair_math.hpp"

namespace kkb {

namespace {

struct NodeTerms {
  double gx = 0.0, gy = 0.0;
  double hxx = 0.0, hyy = 0.0, hxy = 0.0;
};

template <bool kHessian>
NodeTerms accumulate(NodeId m, const Layout& layout, const DistanceModel& model,
                     const SpringScope& scope) {
  const auto d = model.distances().row(m);
  const auto& pos = layout.positions;
  const Point2 pm = pos[m];
  const double lpu = model.length_per_unit();
  const double K = model.scale_constant();
  const double L0 = model.frame_side();
  const double wm = scope.node_weight.empty() ? 1.0 : scope.node_weight[m];
  NodeTerms t;
  auto term = [&](NodeId j) {
    const double dij = d[j];
    double k = K / (dij * dij) * wm;
    if (scope.symmetric && !scope.node_weight.empty()) k *= scope.node_weight[j];
    const double l = lpu * dij;
    const auto s = detail::separation(m, j, pm, pos[j], L0);
    const double ratio = l / s.r;
    t.gx += k * (s.dx - ratio * s.dx);
    t.gy += k * (s.dy - ratio * s.dy);
    if constexpr (kHessian) {
      const double lr3 = ratio / (s.r * s.r);
      t.hxx += k * (1.0 - lr3 * s.dy * s.dy);
      t.hyy += k * (1.0 - lr3 * s.dx * s.dx);
      t.hxy += k * lr3 * s.dx * s.dy;
    }
  };
  if (scope.partners.empty()) {
    const auto n = static_cast<NodeId>(model.size());
    for (NodeId j = 0; j < n; ++j)
      if (j != m) term(j);
  } else {
    for (NodeId j : scope.partners)
      if (j != m) term(j);
  }
  return t;
}

NodeGradient as_gradient(const NodeTerms& t) {
  return {t.gx, t.gy, std::sqrt(t.gx * t.gx + t.gy * t.gy)};
}

Point2 newton_displacement(const NodeTerms& t, const DistanceModel& model) {
  const double det = t.hxx * t.hyy - t.hxy * t.hxy;
  const double scale = t.hxx * t.hxx + t.hyy * t.hyy + t.hxy * t.hxy;
  if (std::isfinite(det) && t.hxx > 0.0 && det > 1e-12 * scale) {
    return {(-t.gx * t.hyy + t.gy * t.hxy) / det, (-t.gy * t.hxx + t.gx * t.hxy) / det};
  }
  // An indefinite Hessian would send Newton towards a saddle (three collinear
  // nodes, for instance). Divide by |lambda| along each eigenvector instead,
  // which turns the negative-curvature component downhill, and cap the step
  // at a tenth of the mean ideal length.
  const double delta = std::sqrt(t.gx * t.gx + t.gy * t.gy);
  if (delta == 0.0 || !std::isfinite(delta)) return {0.0, 0.0};
  const double half_trace = 0.5 * (t.hxx + t.hyy);
  const double radius = std::hypot(0.5 * (t.hxx - t.hyy), t.hxy);
  const double cap = model.mean_ideal_length() / 10.0;
  // eigenvector of the larger eigenvalue
  const double angle = 0.5 * std::atan2(2.0 * t.hxy, t.hxx - t.hyy);
  const Point2 u{std::cos(angle), std::sin(angle)};
  const Point2 w{-u.y, u.x};
  const double floor = 1e-9 * std::max(std::abs(half_trace) + radius, 1e-300);
  const double gu = t.gx * u.x + t.gy * u.y;
  const double gw = t.gx * w.x + t.gy * w.y;
  const double cu = -gu / std::max(std::abs(half_trace + radius), floor);
  const double cw = -gw / std::max(std::abs(half_trace - radius), floor);
  Point2 step{cu * u.x + cw * w.x, cu * u.y + cw * w.y};
  const double len = norm(step);
  if (!(len <= cap)) step = (cap / len) * step;
  if (!std::isfinite(step.x) || !std::isfinite(step.y)) {
    return {-t.gx / delta * cap, -t.gy / delta * cap};
  }
  return step;
}

std::size_t partner_count(const SpringScope& scope, std::size_t n) {
  return scope.partners.empty() ? n - 1 : scope.partners.size();
}

void check_sizes(const Layout& layout, const DistanceModel& model) {
  if (layout.size() != model.size()) {
    throw Error(ErrorCode::kMismatch, "layout and distance model sizes differ");
  }
}

}  // namespace

double kk_energy(const Layout& layout, const DistanceModel& model) {
  check_sizes(layout, model);
  const std::size_t n = model.size();
  const double lpu = model.length_per_unit();
  const double K = model.scale_constant();
  double energy = 0.0;
  for (NodeId i = 0; i < n; ++i) {
    const auto d = model.distances().row(i);
    double row = 0.0;
    for (NodeId j = i + 1; j < n; ++j) {
      const auto s = detail::separation(i, j, layout.positions[i], layout.positions[j],
                                        model.frame_side());
      const double gap = s.r - lpu * d[j];
      row += K / (d[j] * d[j]) * gap * gap;
    }
    energy += 0.5 * row;
  }
  return energy;
}

double kk_energy(const Layout& layout, const DistanceModel& model,
                 std::span<const NodeId> members) {
  check_sizes(layout, model);
  const double lpu = model.length_per_unit();
  const double K = model.scale_constant();
  double energy = 0.0;
  for (std::size_t a = 0; a < members.size(); ++a) {
    const NodeId i = members[a];
    const auto d = model.distances().row(i);
    for (std::size_t b = a + 1; b < members.size(); ++b) {
      const NodeId j = members[b];
      const auto s = detail::separation(i, j, layout.positions[i], layout.positions[j],
                                        model.frame_side());
      const double gap = s.r - lpu * d[j];
      energy += 0.5 * K / (d[j] * d[j]) * gap * gap;
    }
  }
  return energy;
}

NodeGradient kk_gradient(NodeId m, const Layout& layout, const DistanceModel& model,
                         const SpringScope& scope) {
  check_sizes(layout, model);
  return as_gradient(accumulate<false>(m, layout, model, scope));
}

Point2 kk_newton_step(NodeId m, const Layout& layout, const DistanceModel& model,
                      const SpringScope& scope) {
  check_sizes(layout, model);
  return newton_displacement(accumulate<true>(m, layout, model, scope), model);
}

NewtonOutcome kk_newton_update(NodeId m, Layout& layout, const DistanceModel& model,
                               double epsilon, int cap, const SpringScope& scope,
                               std::uint64_t* pair_ops) {
  check_sizes(layout, model);
  const std::size_t per_pass = partner_count(scope, model.size());
  NewtonOutcome out;
  for (;;) {
    const NodeTerms t = accumulate<true>(m, layout, model, scope);
    if (pair_ops) *pair_ops += per_pass;
    out.final = as_gradient(t);
    if (out.final.delta <= epsilon || out.steps >= cap) break;
    const Point2 step = newton_displacement(t, model);
    layout.positions[m] = layout.positions[m] + step;
    ++out.steps;
  }
  return out;
}

namespace {

// All node gradients plus the total energy in one symmetric sweep.
class GradientField {
 public:
  GradientField(const DistanceModel& model) : model_(model), g_(model.size()) {}

  void recompute(const Layout& layout) {
    const std::size_t n = model_.size();
    const double lpu = model_.length_per_unit();
    const double K = model_.scale_constant();
    const double L0 = model_.frame_side();
    for (auto& g : g_) g = {0.0, 0.0};
    energy_ = 0.0;
    for (NodeId i = 0; i < n; ++i) {
      const auto d = model_.distances().row(i);
      const Point2 pi = layout.positions[i];
      double gx = 0.0, gy = 0.0, e = 0.0;
      for (NodeId j = i + 1; j < n; ++j) {
        const auto s = detail::separation(i, j, pi, layout.positions[j], L0);
        const double k = K / (d[j] * d[j]);
        const double gap = s.r - lpu * d[j];
        const double f = k * gap / s.r;
        gx += f * s.dx;
        gy += f * s.dy;
        g_[j].x -= f * s.dx;
        g_[j].y -= f * s.dy;
        e += k * gap * gap;
      }
      g_[i].x += gx;
      g_[i].y += gy;
      energy_ += 0.5 * e;
    }
  }

  // Node m moved from `before` to its current position.
  void moved(const Layout& layout, NodeId m, Point2 before) {
    const std::size_t n = model_.size();
    const double lpu = model_.length_per_unit();
    const double K = model_.scale_constant();
    const double L0 = model_.frame_side();
    const auto d = model_.distances().row(m);
    const Point2 after = layout.positions[m];
    double gx = 0.0, gy = 0.0;
    for (NodeId j = 0; j < n; ++j) {
      if (j == m) continue;
      const double k = K / (d[j] * d[j]);
      const double l = lpu * d[j];
      const auto s0 = detail::separation(m, j, before, layout.positions[j], L0);
      const auto s1 = detail::separation(m, j, after, layout.positions[j], L0);
      const double gap0 = s0.r - l;
      const double gap1 = s1.r - l;
      const double f0 = k * gap0 / s0.r;
      const double f1 = k * gap1 / s1.r;
      g_[j].x += f0 * s0.dx - f1 * s1.dx;
      g_[j].y += f0 * s0.dy - f1 * s1.dy;
      gx += f1 * s1.dx;
      gy += f1 * s1.dy;
      energy_ += 0.5 * k * (gap1 * gap1 - gap0 * gap0);
    }
    g_[m] = {gx, gy};
  }

  double delta(NodeId i) const { return std::hypot(g_[i].x, g_[i].y); }
  double energy() const { return energy_; }

 private:
  const DistanceModel& model_;
  std::vector<Point2> g_;
  double energy_ = 0.0;
};

}  // namespace

LayoutResult kk_layout_from(Layout layout, const DistanceModel& model, const KkParams& params,
                            const TraceHook& hook, const KkObserver* observer) {
  check_sizes(layout, model);
  if (!(params.epsilon > 0.0) || !(params.energy_stop >= 0.0) || params.newton_cap < 1) {
    throw Error(ErrorCode::kInvalidArgument, "invalid KK parameters");
  }
  const std::size_t n = model.size();
  RunClock clock(params.run);
  TraceRecorder recorder(clock, params.run, hook);
  GradientField field(model);
  const std::uint64_t sweep_ops = n * (n - 1) / 2;

  std::uint64_t iteration = 0;
  std::uint64_t since_refresh = n;
  for (;;) {
    if (!params.incremental || since_refresh >= n) {
      field.recompute(layout);
      clock.charge(sweep_ops);
      since_refresh = 0;
    }
    NodeId m = 0;
    double max_delta = -1.0;
    for (NodeId i = 0; i < n; ++i) {
      const double delta = field.delta(i);
      if (delta > max_delta) {
        max_delta = delta;
        m = i;
      }
    }
    if (params.incremental) clock.charge(n);
    const double energy = field.energy();

    if (recorder.due()) recorder.record(layout, energy, iteration);
    const bool stop = energy < params.energy_stop || max_delta <= params.epsilon;
    if (stop && since_refresh != 0 && !clock.exhausted()) {
      since_refresh = n;  // confirm against exact gradients before stopping
      continue;
    }
    Termination why;
    if (clock.exhausted()) {
      why = Termination::kBudget;
    } else if (energy < params.energy_stop) {
      why = Termination::kEnergy;
    } else if (max_delta <= params.epsilon) {
      why = Termination::kEpsilon;
    } else {
      if (observer && observer->on_select) observer->on_select(m);
      const Point2 before = layout.positions[m];
      std::uint64_t ops = 0;
      kk_newton_update(m, layout, model, params.epsilon, params.newton_cap, {}, &ops);
      clock.charge(ops);
      if (params.incremental) {
        field.moved(layout, m, before);
        clock.charge(n);
        ++since_refresh;
      }
      ++iteration;
      continue;
    }
    return {layout, recorder.finish(layout, energy, iteration, why)};
  }
}

LayoutResult kk_layout(const Topology& topology, const DistanceModel& model,
                       const KkParams& params, const TraceHook& hook,
                       const KkObserver* observer) {
  if (topology.node_count() != model.size()) {
    throw Error(ErrorCode::kMismatch, "topology and distance model sizes differ");
  }
  Layout initial = random_layout(model.size(), {params.L0, params.L0}, params.seed);
  return kk_layout_from(std::move(initial), model, params, hook, observer);
}

}  // namespace kkb
