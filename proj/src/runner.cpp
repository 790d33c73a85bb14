#include "kkb/runner.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "kkb/baselines.hpp"
#include "kkb/error.hpp"
#include "kkb/kk.hpp"

namespace kkb {

namespace {

constexpr std::array<const char*, 6> kNames = {"kk", "fr", "dh", "kk-ss", "kk-ms", "kk-ms-ds"};

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

DistanceModel hop_model(const Topology& topology, const RunConfig& config) {
  return build_distance_model(all_pairs_graph_distance(topology), config.L0, config.K);
}

KkParams kk_params(const RunConfig& config, const RunOptions& run) {
  KkParams p;
  p.K = config.K;
  p.L0 = config.L0;
  p.seed = config.seed;
  p.incremental = config.incremental;
  p.run = run;
  return p;
}

// True when the engine already minimises the plain hop-count KK energy.
bool optimises_hop_energy(const RunConfig& config) {
  switch (config.algorithm) {
    case Algorithm::kKk:
    case Algorithm::kKkMs:
      return true;
    case Algorithm::kKkMsDs:
      return config.ds_base == DsBaseModel::kHopCount;
    default:
      return false;
  }
}

}  // namespace

const char* to_string(Algorithm a) { return kNames[static_cast<std::size_t>(a)]; }

Algorithm parse_algorithm(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (name == kNames[i]) return kAllAlgorithms[i];
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown algorithm '" + std::string(name) + "'");
}

RunOutput run_layout(const Topology& topology, const RunConfig& config) {
  if (topology.node_count() < 2) {
    throw Error(ErrorCode::kDegenerate, "degenerate topology: fewer than two nodes");
  }
  const TraceHook hook =
      config.trace_detection ? boundary_trace_hook(topology, config.alpha_factor) : TraceHook{};

  // FR has no objective of its own, so it is always traced with the hop
  // energy; the other engines only when a common yardstick is requested.
  std::optional<DistanceModel> hop;
  RunOptions run = config.run;
  const bool want_probe = config.algorithm == Algorithm::kFr ||
                          (config.yardstick == EnergyYardstick::kHopCount &&
                           !optimises_hop_energy(config));
  if (want_probe) {
    hop.emplace(hop_model(topology, config));
    const DistanceModel* model = &*hop;
    run.energy_probe = [model](const Layout& layout) { return kk_energy(layout, *model); };
  }

  RunOutput out;
  switch (config.algorithm) {
    case Algorithm::kKk: {
      const DistanceModel model = hop_model(topology, config);
      out.result = kk_layout(topology, model, kk_params(config, run), hook);
      break;
    }
    case Algorithm::kKkSs: {
      const double k_eff = ss_equivalent_scale(topology, config.fspl, config.K);
      const DistanceModel model = kk_ss_model(topology, config.fspl, config.L0, k_eff);
      out.result = kk_layout(topology, model, kk_params(config, run), hook);
      break;
    }
    case Algorithm::kKkMs: {
      const DistanceModel model = hop_model(topology, config);
      const MsParams ms{config.k_percent, config.hop_filter};
      out.result = kk_ms_layout(topology, model, ms, kk_params(config, run), nullptr, nullptr, hook);
      break;
    }
    case Algorithm::kKkMsDs: {
      DsParams ds;
      ds.k_percent = config.k_percent;
      ds.hop_filter = config.hop_filter;
      ds.stability.epsilon_r = config.epsilon_r;
      ds.base = config.ds_base;
      ds.fspl = config.fspl;
      out.result = kk_ms_ds_layout(topology, ds, kk_params(config, run), hook).result;
      break;
    }
    case Algorithm::kFr: {
      FrParams p;
      p.width = p.height = config.L0;
      p.seed = config.seed;
      p.run = run;
      out.result = fr_layout(topology, p, hook);
      break;
    }
    case Algorithm::kDh: {
      DhParams p;
      p.width = p.height = config.L0;
      p.t_initial = 0.3 * config.L0;
      p.disk_radius = config.L0 / 10.0;
      p.seed = config.seed;
      p.run = run;
      out.result = dh_layout(topology, p, hook);
      break;
    }
  }

  if (topology.boundary_truth()) {
    out.predicted = detect_boundary(out.result.layout, topology, config.alpha_factor);
    out.score = score(*out.predicted, *topology.boundary_truth());
  }
  return out;
}

Metadata run_metadata(const RunConfig& config, const RunTrace& trace) {
  Metadata m;
  m["algorithm"] = to_string(config.algorithm);
  m["seed"] = std::to_string(config.seed);
  m["budget_secs"] = number(config.run.budget_secs);
  if (config.algorithm == Algorithm::kKkMs || config.algorithm == Algorithm::kKkMsDs) {
    m["k_percent"] = number(config.k_percent);
  }
  if (config.algorithm == Algorithm::kKkMsDs) {
    m["epsilon_r"] = number(config.epsilon_r);
    m["ds_base"] = config.ds_base == DsBaseModel::kHopCount ? "hop" : "ss";
  }
  m["terminated_by"] = to_string(trace.terminated_by);
  m["iterations"] = std::to_string(trace.iterations);
  if (!trace.samples.empty()) {
    m["elapsed_ms"] = number(trace.samples.back().elapsed_ms);
    m["energy"] = number(trace.samples.back().energy);
  }
  return m;
}

std::optional<double> first_crossing(const RunTrace& trace, double target) {
  for (const TraceSample& s : trace.samples) {
    if (s.energy <= target) return s.elapsed_ms;
  }
  return std::nullopt;
}

RaceResult energy_race(const Topology& topology, const RunConfig& a, const RunConfig& b,
                       std::optional<double> target_energy) {
  if (target_energy && std::isnan(*target_energy)) {
    throw Error(ErrorCode::kInvalidArgument, "target energy is NaN");
  }
  RaceResult race;
  if (target_energy && std::isinf(*target_energy) && *target_energy > 0.0) {
    // every state already satisfies the target
    race.target_energy = *target_energy;
    race.ratio = 1.0;
    return race;
  }

  auto leg = [&](const RunConfig& config, const RunTrace& trace, double target) {
    RaceLeg l;
    l.end_energy = trace.samples.back().energy;
    l.iterations = trace.iterations;
    l.terminated_by = trace.terminated_by;
    if (auto t = first_crossing(trace, target)) {
      l.time_ms = *t;
    } else {
      l.censored = true;
      l.time_ms = config.run.budget_secs * 1000.0;
    }
    return l;
  };

  RunConfig ca = a, cb = b;
  ca.trace_detection = cb.trace_detection = false;
  const RunTrace ta = run_layout(topology, ca).result.trace;
  const RunTrace tb = run_layout(topology, cb).result.trace;
  race.target_energy = target_energy.value_or(ta.samples.back().energy);
  race.a = leg(ca, ta, race.target_energy);
  race.b = leg(cb, tb, race.target_energy);
  if (race.b.time_ms > 0.0) {
    race.ratio = race.a.time_ms / race.b.time_ms;
  } else {
    race.ratio = race.a.time_ms > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
  }
  return race;
}

}  // namespace kkb
