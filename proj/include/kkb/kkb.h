#ifndef KKB_KKB_H
#define KKB_KKB_H

/* C interface to the layout library. Every fallible call returns a
 * kkb_status; on failure kkb_last_error() describes the problem for the
 * calling thread until its next failing call. Handles are owned by the caller
 * and released with the matching *_free function (NULL is accepted). */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define KKB_API __declspec(dllexport)
#else
#define KKB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum kkb_status {
  KKB_OK = 0,
  KKB_ERR_INVALID_ARGUMENT = 1,
  KKB_ERR_PARSE = 2,
  KKB_ERR_IO = 3,
  KKB_ERR_DISCONNECTED = 4,
  KKB_ERR_DEGENERATE = 5,
  KKB_ERR_GENERATION = 6,
  KKB_ERR_MISMATCH = 7,
  KKB_ERR_INTERNAL = 8
} kkb_status;

KKB_API const char* kkb_last_error(void);
KKB_API const char* kkb_status_name(kkb_status status);

typedef struct kkb_topology kkb_topology;
typedef struct kkb_layout kkb_layout;
typedef struct kkb_trace kkb_trace;
typedef struct kkb_labels kkb_labels;
typedef struct kkb_experiment kkb_experiment;

/* ---- topologies ---- */

typedef struct kkb_gen_config {
  size_t n;
  double delta;
  double gamma;
  double gamma_b;
  double e;
  double target_degree; /* <= 0 keeps gamma as given */
  double field_scale;   /* meters per unit-square side */
  double alpha_factor;  /* ground-truth alpha over mean true edge length */
  int holes;            /* nonzero also labels hole perimeters */
  uint64_t seed;
} kkb_gen_config;

/* Defaults scaled to n: delta = 1.7/sqrt(n), gamma = 0.7/sqrt(n). */
KKB_API void kkb_gen_config_default(size_t n, uint64_t seed, kkb_gen_config* out);
KKB_API kkb_status kkb_topology_generate(const kkb_gen_config* config, kkb_topology** out);
KKB_API kkb_status kkb_topology_read(const char* path, kkb_topology** out);
KKB_API kkb_status kkb_topology_write(const kkb_topology* topology, const char* path);
KKB_API void kkb_topology_free(kkb_topology* topology);
KKB_API size_t kkb_topology_node_count(const kkb_topology* topology);
KKB_API size_t kkb_topology_edge_count(const kkb_topology* topology);
KKB_API int kkb_topology_has_truth(const kkb_topology* topology);

typedef struct kkb_suite_summary {
  size_t topologies;
  double average_degree;
} kkb_suite_summary;

/* One topology per node count in [from, to], written as n<count>.topo. */
KKB_API kkb_status kkb_suite_generate(size_t from, size_t to, uint64_t seed, const char* out_dir,
                                      kkb_suite_summary* summary);

/* ---- layout runs ---- */

typedef enum kkb_algorithm {
  KKB_ALGO_KK = 0,
  KKB_ALGO_FR = 1,
  KKB_ALGO_DH = 2,
  KKB_ALGO_KK_SS = 3,
  KKB_ALGO_KK_MS = 4,
  KKB_ALGO_KK_MS_DS = 5
} kkb_algorithm;

KKB_API kkb_status kkb_algorithm_parse(const char* name, kkb_algorithm* out);
KKB_API const char* kkb_algorithm_name(kkb_algorithm algorithm);

typedef enum kkb_clock { KKB_CLOCK_WALL = 0, KKB_CLOCK_WORK = 1 } kkb_clock;
typedef enum kkb_ds_base { KKB_DS_SIGNAL_STRENGTH = 0, KKB_DS_HOP_COUNT = 1 } kkb_ds_base;
typedef enum kkb_yardstick { KKB_ENERGY_OWN = 0, KKB_ENERGY_HOP_COUNT = 1 } kkb_yardstick;

typedef struct kkb_run_config {
  kkb_algorithm algorithm;
  uint64_t seed;
  double budget_secs;
  kkb_clock clock;
  double sample_interval_ms;
  double k_percent;
  unsigned hop_filter;
  double epsilon_r;
  double alpha_factor;
  int trace_detection;
  int incremental;
  kkb_ds_base ds_base;
  kkb_yardstick yardstick;
} kkb_run_config;

KKB_API void kkb_run_config_default(kkb_run_config* out);

/* Either output pointer may be NULL. */
KKB_API kkb_status kkb_layout_run(const kkb_topology* topology, const kkb_run_config* config,
                                  kkb_layout** layout, kkb_trace** trace);
KKB_API kkb_status kkb_layout_read(const char* path, kkb_layout** out);
KKB_API kkb_status kkb_layout_write(const kkb_layout* layout, const char* path);
KKB_API void kkb_layout_free(kkb_layout* layout);
KKB_API size_t kkb_layout_node_count(const kkb_layout* layout);
KKB_API kkb_status kkb_layout_position(const kkb_layout* layout, size_t node, double* x, double* y);

typedef struct kkb_trace_sample {
  double elapsed_ms;
  double energy;
  double sensitivity; /* NaN without ground truth */
  double specificity;
} kkb_trace_sample;

KKB_API kkb_status kkb_trace_write(const kkb_trace* trace, const char* path);
KKB_API void kkb_trace_free(kkb_trace* trace);
KKB_API size_t kkb_trace_sample_count(const kkb_trace* trace);
KKB_API kkb_status kkb_trace_sample_at(const kkb_trace* trace, size_t index, kkb_trace_sample* out);
/* "budget", "energy", "epsilon" or "stable". */
KKB_API const char* kkb_trace_termination(const kkb_trace* trace);
KKB_API uint64_t kkb_trace_iterations(const kkb_trace* trace);

/* ---- boundary labels and scoring ---- */

KKB_API kkb_status kkb_detect_boundary(const kkb_layout* layout, const kkb_topology* topology,
                                       double alpha_factor, kkb_labels** out);
KKB_API kkb_status kkb_labels_from_truth(const kkb_topology* topology, kkb_labels** out);
KKB_API kkb_status kkb_labels_read(const char* path, kkb_labels** out);
KKB_API kkb_status kkb_labels_write(const kkb_labels* labels, const char* path);
KKB_API void kkb_labels_free(kkb_labels* labels);
KKB_API size_t kkb_labels_count(const kkb_labels* labels);
KKB_API int kkb_labels_get(const kkb_labels* labels, size_t node);

typedef struct kkb_score {
  size_t tp, fp, tn, fn;
  double sensitivity;
  double specificity;
  double tpr;
  double fnr;
} kkb_score;

KKB_API kkb_status kkb_score_labels(const kkb_labels* predicted, const kkb_labels* truth,
                                    kkb_score* out);

/* ---- experiments ---- */

/* Desk-scale grid; `full` selects node counts 500 to 10000. */
KKB_API kkb_status kkb_experiment_create(int full, kkb_experiment** out);
KKB_API kkb_status kkb_experiment_load(kkb_experiment* experiment, const char* path);
/* Keys mirror the bench flags, e.g. "budget_secs", "algorithms", "workers". */
KKB_API kkb_status kkb_experiment_set(kkb_experiment* experiment, const char* key,
                                      const char* value);
KKB_API void kkb_experiment_free(kkb_experiment* experiment);

typedef struct kkb_bench_summary {
  size_t rows;
  size_t failed;
} kkb_bench_summary;

/* Called after every finished run; `error` is NULL for successful rows. */
typedef void (*kkb_progress_fn)(size_t done, size_t total, const char* topo_id, const char* algo,
                                const char* error, void* user);

KKB_API kkb_status kkb_experiment_run(const kkb_experiment* experiment, kkb_progress_fn progress,
                                      void* user, kkb_bench_summary* summary);

/* ---- energy race ---- */

typedef struct kkb_race_leg {
  double time_ms;
  int censored;
  double end_energy;
  uint64_t iterations;
} kkb_race_leg;

typedef struct kkb_race_result {
  double target_energy;
  kkb_race_leg a;
  kkb_race_leg b;
  double ratio;
} kkb_race_result;

/* A NaN target means "the energy a holds when it stops". */
KKB_API kkb_status kkb_energy_race(const kkb_topology* topology, const kkb_run_config* a,
                                   const kkb_run_config* b, double target_energy,
                                   kkb_race_result* out);

#ifdef __cplusplus
}
#endif

#endif
