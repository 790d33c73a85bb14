#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

#include "kkb/boundary.hpp"
#include "kkb/graph.hpp"
#include "kkb/kk_accel.hpp"
#include "kkb/layout.hpp"
#include "kkb/radio.hpp"

namespace kkb {

enum class Algorithm { kKk, kFr, kDh, kKkSs, kKkMs, kKkMsDs };

inline constexpr std::array<Algorithm, 6> kAllAlgorithms = {
    Algorithm::kKk,   Algorithm::kFr,   Algorithm::kDh,
    Algorithm::kKkSs, Algorithm::kKkMs, Algorithm::kKkMsDs};

/// "kk", "fr", "dh", "kk-ss", "kk-ms", "kk-ms-ds".
const char* to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view name);

// Which energy goes into trace samples. kHopCount measures every engine with
// the plain KK objective so traces of different engines are comparable.
enum class EnergyYardstick { kOwn, kHopCount };

struct RunConfig {
  Algorithm algorithm = Algorithm::kKk;
  std::uint64_t seed = 1;
  RunOptions run;
  double k_percent = 5.0;
  unsigned hop_filter = 3;
  double epsilon_r = 0.1;
  double alpha_factor = 1.5;
  bool trace_detection = true;  // score snapshots when the topology has ground truth
  bool incremental = false;
  DsBaseModel ds_base = DsBaseModel::kSignalStrength;
  EnergyYardstick yardstick = EnergyYardstick::kOwn;
  double K = 1.0;
  double L0 = 600.0;
  FsplParams fspl;
};

struct RunOutput {
  LayoutResult result;
  std::optional<BoundaryLabeling> predicted;  // set when the topology has ground truth
  std::optional<Score> score;
};

/// Lays out `topology` with the configured engine from a random placement
/// seeded by `config.seed`, then scores the result against ground truth when
/// the topology carries it.
RunOutput run_layout(const Topology& topology, const RunConfig& config);

/// Metadata written alongside a layout produced by `config`.
Metadata run_metadata(const RunConfig& config, const RunTrace& trace);

struct RaceLeg {
  double time_ms = 0.0;  // first sample at or below the target; the budget when censored
  bool censored = false;
  double end_energy = 0.0;
  std::uint64_t iterations = 0;
  Termination terminated_by = Termination::kBudget;
};

struct RaceResult {
  double target_energy = 0.0;
  RaceLeg a, b;
  double ratio = 1.0;  // time_a / time_b; 0/0 counts as 1
};

/// Time at which `trace` first reaches `target`, or nullopt.
std::optional<double> first_crossing(const RunTrace& trace, double target);

/// Runs both configurations on `topology` and compares when each first
/// reaches the target energy. Without a target, the energy `a` holds when it
/// stops is used. Energies are read from the traces, so both configurations
/// should share a yardstick.
RaceResult energy_race(const Topology& topology, const RunConfig& a, const RunConfig& b,
                       std::optional<double> target_energy = std::nullopt);

}  // namespace kkb
