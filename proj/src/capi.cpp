#include "kkb/kkb.h"

#include <cmath>
#include <filesystem>
#include <new>
#include <string>

#include "kkb/bench.hpp"
#include "kkb/boundary.hpp"
#include "kkb/error.hpp"
#include "kkb/runner.hpp"
#include "kkb/topo_gen.hpp"

struct kkb_topology {
  kkb::Topology value;
};
struct kkb_layout {
  kkb::Layout value;
  kkb::Metadata metadata;
};
struct kkb_trace {
  kkb::RunTrace value;
};
struct kkb_labels {
  kkb::BoundaryLabeling value;
};
struct kkb_experiment {
  kkb::ExperimentConfig value;
};

namespace {

thread_local std::string last_error;

kkb_status to_status(kkb::ErrorCode code) {
  switch (code) {
    case kkb::ErrorCode::kInvalidArgument: return KKB_ERR_INVALID_ARGUMENT;
    case kkb::ErrorCode::kParse: return KKB_ERR_PARSE;
    case kkb::ErrorCode::kIo: return KKB_ERR_IO;
    case kkb::ErrorCode::kDisconnected: return KKB_ERR_DISCONNECTED;
    case kkb::ErrorCode::kDegenerate: return KKB_ERR_DEGENERATE;
    case kkb::ErrorCode::kGeneration: return KKB_ERR_GENERATION;
    case kkb::ErrorCode::kMismatch: return KKB_ERR_MISMATCH;
  }
  return KKB_ERR_INTERNAL;
}

kkb_status fail(kkb_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

template <typename F>
kkb_status guarded(F&& body) {
  try {
    body();
    return KKB_OK;
  } catch (const kkb::Error& ex) {
    return fail(to_status(ex.code()), ex.what());
  } catch (const std::bad_alloc&) {
    return fail(KKB_ERR_INTERNAL, "out of memory");
  } catch (const std::filesystem::filesystem_error& ex) {
    return fail(KKB_ERR_IO, ex.what());
  } catch (const std::exception& ex) {
    return fail(KKB_ERR_INTERNAL, ex.what());
  }
}

#define KKB_REQUIRE(ptr)                                                       \
  do {                                                                         \
    if (!(ptr)) return fail(KKB_ERR_INVALID_ARGUMENT, #ptr " must not be NULL"); \
  } while (0)

kkb::RunConfig to_run_config(const kkb_run_config& c) {
  kkb::RunConfig r;
  if (c.algorithm < KKB_ALGO_KK || c.algorithm > KKB_ALGO_KK_MS_DS) {
    throw kkb::Error(kkb::ErrorCode::kInvalidArgument, "unknown algorithm");
  }
  r.algorithm = kkb::kAllAlgorithms[static_cast<std::size_t>(c.algorithm)];
  r.seed = c.seed;
  r.run.budget_secs = c.budget_secs;
  r.run.clock = c.clock == KKB_CLOCK_WORK ? kkb::ClockMode::kWork : kkb::ClockMode::kWall;
  r.run.sample_interval_ms = c.sample_interval_ms;
  r.k_percent = c.k_percent;
  r.hop_filter = c.hop_filter;
  r.epsilon_r = c.epsilon_r;
  r.alpha_factor = c.alpha_factor;
  r.trace_detection = c.trace_detection != 0;
  r.incremental = c.incremental != 0;
  r.ds_base = c.ds_base == KKB_DS_HOP_COUNT ? kkb::DsBaseModel::kHopCount
                                            : kkb::DsBaseModel::kSignalStrength;
  r.yardstick = c.yardstick == KKB_ENERGY_HOP_COUNT ? kkb::EnergyYardstick::kHopCount
                                                    : kkb::EnergyYardstick::kOwn;
  if (!(r.run.budget_secs >= 0.0)) {
    throw kkb::Error(kkb::ErrorCode::kInvalidArgument, "budget must be nonnegative");
  }
  return r;
}

kkb_race_leg to_leg(const kkb::RaceLeg& l) {
  return {l.time_ms, l.censored ? 1 : 0, l.end_energy, l.iterations};
}

}  // namespace

extern "C" {

const char* kkb_last_error(void) { return last_error.c_str(); }

const char* kkb_status_name(kkb_status status) {
  switch (status) {
    case KKB_OK: return "ok";
    case KKB_ERR_INVALID_ARGUMENT: return "invalid argument";
    case KKB_ERR_PARSE: return "parse error";
    case KKB_ERR_IO: return "i/o error";
    case KKB_ERR_DISCONNECTED: return "disconnected topology";
    case KKB_ERR_DEGENERATE: return "degenerate input";
    case KKB_ERR_GENERATION: return "generation failed";
    case KKB_ERR_MISMATCH: return "size mismatch";
    case KKB_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void kkb_gen_config_default(size_t n, uint64_t seed, kkb_gen_config* out) {
  if (!out) return;
  const kkb::GenConfig g = kkb::GenConfig::for_node_count(n, seed);
  *out = {g.n, g.delta, g.gamma, g.gamma_b, g.e, 0.0, g.field_scale, g.alpha_factor, g.holes ? 1 : 0,
          g.seed};
}

kkb_status kkb_topology_generate(const kkb_gen_config* config, kkb_topology** out) {
  KKB_REQUIRE(config);
  KKB_REQUIRE(out);
  return guarded([&] {
    kkb::GenConfig g;
    g.n = config->n;
    g.delta = config->delta;
    g.gamma = config->gamma;
    g.gamma_b = config->gamma_b;
    g.e = config->e;
    if (config->target_degree > 0.0) g.target_degree = config->target_degree;
    g.field_scale = config->field_scale;
    g.alpha_factor = config->alpha_factor;
    g.holes = config->holes != 0;
    g.seed = config->seed;
    *out = new kkb_topology{kkb::generate_topology(g)};
  });
}

kkb_status kkb_topology_read(const char* path, kkb_topology** out) {
  KKB_REQUIRE(path);
  KKB_REQUIRE(out);
  return guarded([&] { *out = new kkb_topology{kkb::read_topology(path)}; });
}

kkb_status kkb_topology_write(const kkb_topology* topology, const char* path) {
  KKB_REQUIRE(topology);
  KKB_REQUIRE(path);
  return guarded([&] { kkb::write_topology(topology->value, path); });
}

void kkb_topology_free(kkb_topology* topology) { delete topology; }

size_t kkb_topology_node_count(const kkb_topology* topology) {
  return topology ? topology->value.node_count() : 0;
}

size_t kkb_topology_edge_count(const kkb_topology* topology) {
  return topology ? topology->value.edge_count() : 0;
}

int kkb_topology_has_truth(const kkb_topology* topology) {
  return topology && topology->value.boundary_truth() ? 1 : 0;
}

kkb_status kkb_suite_generate(size_t from, size_t to, uint64_t seed, const char* out_dir,
                              kkb_suite_summary* summary) {
  KKB_REQUIRE(out_dir);
  return guarded([&] {
    const kkb::SmallSuite suite = kkb::generate_small_suite(from, to, seed);
    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    for (std::size_t i = 0; i < suite.topologies.size(); ++i) {
      kkb::write_topology(suite.topologies[i],
                          dir / ("n" + std::to_string(suite.node_counts[i]) + ".topo"));
    }
    if (summary) *summary = {suite.topologies.size(), suite.average_degree};
  });
}

kkb_status kkb_algorithm_parse(const char* name, kkb_algorithm* out) {
  KKB_REQUIRE(name);
  KKB_REQUIRE(out);
  return guarded([&] {
    *out = static_cast<kkb_algorithm>(static_cast<int>(kkb::parse_algorithm(name)));
  });
}

const char* kkb_algorithm_name(kkb_algorithm algorithm) {
  if (algorithm < KKB_ALGO_KK || algorithm > KKB_ALGO_KK_MS_DS) return "unknown";
  return kkb::to_string(kkb::kAllAlgorithms[static_cast<std::size_t>(algorithm)]);
}

void kkb_run_config_default(kkb_run_config* out) {
  if (!out) return;
  const kkb::RunConfig r;
  *out = {KKB_ALGO_KK,
          r.seed,
          r.run.budget_secs,
          KKB_CLOCK_WALL,
          r.run.sample_interval_ms,
          r.k_percent,
          r.hop_filter,
          r.epsilon_r,
          r.alpha_factor,
          r.trace_detection ? 1 : 0,
          r.incremental ? 1 : 0,
          KKB_DS_SIGNAL_STRENGTH,
          KKB_ENERGY_OWN};
}

kkb_status kkb_layout_run(const kkb_topology* topology, const kkb_run_config* config,
                          kkb_layout** layout, kkb_trace** trace) {
  KKB_REQUIRE(topology);
  KKB_REQUIRE(config);
  return guarded([&] {
    const kkb::RunConfig rc = to_run_config(*config);
    kkb::RunOutput out = kkb::run_layout(topology->value, rc);
    kkb::Metadata meta = kkb::run_metadata(rc, out.result.trace);
    if (layout) *layout = new kkb_layout{std::move(out.result.layout), std::move(meta)};
    if (trace) *trace = new kkb_trace{std::move(out.result.trace)};
  });
}

kkb_status kkb_layout_read(const char* path, kkb_layout** out) {
  KKB_REQUIRE(path);
  KKB_REQUIRE(out);
  return guarded([&] {
    auto handle = new kkb_layout{};
    try {
      handle->value = kkb::read_layout(path, &handle->metadata);
    } catch (...) {
      delete handle;
      throw;
    }
    *out = handle;
  });
}

kkb_status kkb_layout_write(const kkb_layout* layout, const char* path) {
  KKB_REQUIRE(layout);
  KKB_REQUIRE(path);
  return guarded([&] { kkb::write_layout(layout->value, path, layout->metadata); });
}

void kkb_layout_free(kkb_layout* layout) { delete layout; }

size_t kkb_layout_node_count(const kkb_layout* layout) { return layout ? layout->value.size() : 0; }

kkb_status kkb_layout_position(const kkb_layout* layout, size_t node, double* x, double* y) {
  KKB_REQUIRE(layout);
  KKB_REQUIRE(x);
  KKB_REQUIRE(y);
  if (node >= layout->value.size()) return fail(KKB_ERR_INVALID_ARGUMENT, "node out of range");
  *x = layout->value.positions[node].x;
  *y = layout->value.positions[node].y;
  return KKB_OK;
}

kkb_status kkb_trace_write(const kkb_trace* trace, const char* path) {
  KKB_REQUIRE(trace);
  KKB_REQUIRE(path);
  return guarded([&] { kkb::write_trace_csv(trace->value, path); });
}

void kkb_trace_free(kkb_trace* trace) { delete trace; }

size_t kkb_trace_sample_count(const kkb_trace* trace) {
  return trace ? trace->value.samples.size() : 0;
}

kkb_status kkb_trace_sample_at(const kkb_trace* trace, size_t index, kkb_trace_sample* out) {
  KKB_REQUIRE(trace);
  KKB_REQUIRE(out);
  if (index >= trace->value.samples.size()) return fail(KKB_ERR_INVALID_ARGUMENT, "sample out of range");
  const kkb::TraceSample& s = trace->value.samples[index];
  *out = {s.elapsed_ms, s.energy, s.sensitivity, s.specificity};
  return KKB_OK;
}

const char* kkb_trace_termination(const kkb_trace* trace) {
  return trace ? kkb::to_string(trace->value.terminated_by) : "";
}

uint64_t kkb_trace_iterations(const kkb_trace* trace) { return trace ? trace->value.iterations : 0; }

kkb_status kkb_detect_boundary(const kkb_layout* layout, const kkb_topology* topology,
                               double alpha_factor, kkb_labels** out) {
  KKB_REQUIRE(layout);
  KKB_REQUIRE(topology);
  KKB_REQUIRE(out);
  return guarded([&] {
    if (layout->value.size() != topology->value.node_count()) {
      throw kkb::Error(kkb::ErrorCode::kMismatch, "layout and topology sizes differ");
    }
    if (!(alpha_factor > 0.0)) {
      throw kkb::Error(kkb::ErrorCode::kInvalidArgument, "alpha factor must be positive");
    }
    *out = new kkb_labels{kkb::detect_boundary(layout->value, topology->value, alpha_factor)};
  });
}

kkb_status kkb_labels_from_truth(const kkb_topology* topology, kkb_labels** out) {
  KKB_REQUIRE(topology);
  KKB_REQUIRE(out);
  if (!topology->value.boundary_truth()) {
    return fail(KKB_ERR_INVALID_ARGUMENT, "topology carries no boundary truth");
  }
  return guarded([&] { *out = new kkb_labels{*topology->value.boundary_truth()}; });
}

kkb_status kkb_labels_read(const char* path, kkb_labels** out) {
  KKB_REQUIRE(path);
  KKB_REQUIRE(out);
  return guarded([&] { *out = new kkb_labels{kkb::read_labels(path)}; });
}

kkb_status kkb_labels_write(const kkb_labels* labels, const char* path) {
  KKB_REQUIRE(labels);
  KKB_REQUIRE(path);
  return guarded([&] { kkb::write_labels(labels->value, path); });
}

void kkb_labels_free(kkb_labels* labels) { delete labels; }

size_t kkb_labels_count(const kkb_labels* labels) { return labels ? labels->value.size() : 0; }

int kkb_labels_get(const kkb_labels* labels, size_t node) {
  if (!labels || node >= labels->value.size()) return -1;
  return labels->value[node] ? 1 : 0;
}

kkb_status kkb_score_labels(const kkb_labels* predicted, const kkb_labels* truth, kkb_score* out) {
  KKB_REQUIRE(predicted);
  KKB_REQUIRE(truth);
  KKB_REQUIRE(out);
  return guarded([&] {
    const kkb::Score s = kkb::score(predicted->value, truth->value);
    *out = {s.counts.tp, s.counts.fp, s.counts.tn, s.counts.fn,
            s.sensitivity, s.specificity, s.tpr, s.fnr};
  });
}

kkb_status kkb_experiment_create(int full, kkb_experiment** out) {
  KKB_REQUIRE(out);
  return guarded([&] {
    *out = new kkb_experiment{full ? kkb::ExperimentConfig::full_grid() : kkb::ExperimentConfig{}};
  });
}

kkb_status kkb_experiment_load(kkb_experiment* experiment, const char* path) {
  KKB_REQUIRE(experiment);
  KKB_REQUIRE(path);
  return guarded([&] {
    experiment->value = kkb::read_experiment_config(path, experiment->value);
  });
}

kkb_status kkb_experiment_set(kkb_experiment* experiment, const char* key, const char* value) {
  KKB_REQUIRE(experiment);
  KKB_REQUIRE(key);
  KKB_REQUIRE(value);
  return guarded([&] { experiment->value.set(key, value); });
}

void kkb_experiment_free(kkb_experiment* experiment) { delete experiment; }

kkb_status kkb_experiment_run(const kkb_experiment* experiment, kkb_progress_fn progress,
                              void* user, kkb_bench_summary* summary) {
  KKB_REQUIRE(experiment);
  return guarded([&] {
    std::function<void(const kkb::BenchProgress&)> cb;
    if (progress) {
      cb = [&](const kkb::BenchProgress& p) {
        progress(p.done, p.total, p.row->topo_id.c_str(), p.row->algo.c_str(),
                 p.row->failed ? p.row->error.c_str() : nullptr, user);
      };
    }
    const kkb::ResultTable table = kkb::run_experiment(experiment->value, cb);
    if (summary) {
      summary->rows = table.rows.size();
      summary->failed = 0;
      for (const auto& r : table.rows) summary->failed += r.failed ? 1 : 0;
    }
  });
}

kkb_status kkb_energy_race(const kkb_topology* topology, const kkb_run_config* a,
                           const kkb_run_config* b, double target_energy, kkb_race_result* out) {
  KKB_REQUIRE(topology);
  KKB_REQUIRE(a);
  KKB_REQUIRE(b);
  KKB_REQUIRE(out);
  return guarded([&] {
    std::optional<double> target;
    if (!std::isnan(target_energy)) target = target_energy;
    const kkb::RaceResult r =
        kkb::energy_race(topology->value, to_run_config(*a), to_run_config(*b), target);
    *out = {r.target_energy, to_leg(r.a), to_leg(r.b), r.ratio};
  });
}

}  // extern "C"
