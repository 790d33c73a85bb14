#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "kkb/runner.hpp"

namespace kkb {

struct ExperimentConfig {
  std::vector<std::size_t> node_counts = {100, 500, 1000, 2000};
  std::vector<double> degrees = {6, 8, 10, 12, 15};
  double e = 0.25;
  double gamma_b = 0.7;
  std::size_t seeds_per_topology = 5;
  double budget_secs = 60.0;
  std::vector<Algorithm> algorithms = {kAllAlgorithms.begin(), kAllAlgorithms.end()};
  std::vector<double> k_percents = {1, 3, 5, 10, 15};  // kk-ms only
  double ds_k_percent = 5.0;
  double epsilon_r = 0.1;
  double alpha_factor = 1.5;
  DsBaseModel ds_base = DsBaseModel::kSignalStrength;
  ClockMode clock = ClockMode::kWall;
  double sample_interval_ms = 100.0;
  std::uint64_t master_seed = 1;
  unsigned workers = 1;
  bool write_layouts = false;
  // When set, every *.topo file in this directory is used instead of the
  // generated grid.
  std::filesystem::path topology_dir;
  std::filesystem::path output_dir = "bench-out";

  /// Node counts 500 to 10000 as in the original protocol.
  static ExperimentConfig full_grid();
  void validate() const;
  /// Applies one `key=value` setting; keys mirror the bench CLI flags.
  void set(const std::string& key, const std::string& value);
};

// Flat `key=value` text, one per line, '#' comments.
ExperimentConfig parse_experiment_config(std::istream& in, ExperimentConfig base = {});
ExperimentConfig read_experiment_config(const std::filesystem::path& path,
                                        ExperimentConfig base = {});

inline constexpr std::size_t kMaxBenchNodes = 20000;

struct ResultRow {
  std::string topo_id;
  std::string algo;  // kk-ms rows carry their selection size, e.g. "kk-ms@5"
  std::uint64_t seed = 0;
  double elapsed_ms = 0.0;
  Score score;
  double energy = 0.0;
  std::string terminated_by;
  std::uint64_t iterations = 0;
  std::string trace_path;  // relative to the output directory
  bool failed = false;
  std::string error;
};

struct ResultTable {
  std::vector<ResultRow> rows;  // sorted by (topo_id, algo, seed)
};

struct BenchProgress {
  std::size_t done = 0;
  std::size_t total = 0;
  const ResultRow* row = nullptr;
};

/// Generates (or loads) the topologies, runs every (topology, algorithm,
/// seed) triple, and writes topologies/, traces/ and scores.csv under the
/// output directory. Failed runs become failed rows.
ResultTable run_experiment(const ExperimentConfig& config,
                           const std::function<void(const BenchProgress&)>& progress = {});

void write_scores_csv(const ResultTable& table, const std::filesystem::path& path);

/// Seed for the run with the given index on a topology; shared by every
/// algorithm so they start from the same placement.
std::uint64_t run_seed(std::uint64_t master_seed, const std::string& topo_id, std::size_t index);
std::uint64_t topology_seed(std::uint64_t master_seed, const std::string& topo_id);

}  // namespace kkb
