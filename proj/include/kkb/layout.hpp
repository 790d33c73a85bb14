#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kkb/geometry.hpp"

namespace kkb {

struct Frame {
  double width = 600.0;
  double height = 600.0;
};

// Visual positions in drawing units; the frame is centred on the origin.
struct Layout {
  std::vector<Point2> positions;
  Frame frame;

  std::size_t size() const { return positions.size(); }
};

/// Uniform random placement inside the frame.
Layout random_layout(std::size_t n, Frame frame, std::uint64_t seed);

enum class Termination { kBudget, kEnergy, kEpsilon, kStable };

const char* to_string(Termination t);

struct TraceSample {
  double elapsed_ms = 0.0;
  double energy = 0.0;
  double sensitivity = 0.0;  // NaN when no ground truth is attached
  double specificity = 0.0;
  std::uint64_t iteration = 0;
};

struct RunTrace {
  std::vector<TraceSample> samples;
  Termination terminated_by = Termination::kBudget;
  std::uint64_t iterations = 0;
};

// Run time is either wall-clock (instrumentation excluded) or deterministic
// work units, where one unit is charged per pair interaction and
// `work_per_ms` units count as one millisecond.
enum class ClockMode { kWall, kWork };

struct RunOptions {
  double budget_secs = 60.0;
  ClockMode clock = ClockMode::kWall;
  double sample_interval_ms = 100.0;
  double work_per_ms = 2.0e5;
  // Replaces the engine's own energy in trace samples, so runs of different
  // engines can be compared on one objective. Evaluated with the clock paused.
  std::function<double(const Layout&)> energy_probe;
};

class RunClock {
 public:
  explicit RunClock(const RunOptions& options);

  double elapsed_ms() const;
  bool exhausted() const { return elapsed_ms() >= budget_ms_; }
  double budget_ms() const { return budget_ms_; }
  void charge(std::uint64_t pair_ops) { work_ += pair_ops; }

  // Excludes the enclosed wall time from elapsed_ms().
  class Pause {
   public:
    explicit Pause(RunClock& clock);
    ~Pause();
    Pause(const Pause&) = delete;
    Pause& operator=(const Pause&) = delete;

   private:
    RunClock& clock_;
    std::chrono::steady_clock::time_point start_;
  };

 private:
  using SteadyClock = std::chrono::steady_clock;
  ClockMode mode_;
  double budget_ms_;
  double work_per_ms_;
  std::uint64_t work_ = 0;
  SteadyClock::time_point start_;
  SteadyClock::duration paused_{};
};

struct DetectionScore {
  double sensitivity;
  double specificity;
};

// Called on layout snapshots; returns boundary scores when ground truth is
// available.
using TraceHook = std::function<std::optional<DetectionScore>(const Layout&)>;

class TraceRecorder {
 public:
  TraceRecorder(RunClock& clock, const RunOptions& options, TraceHook hook);

  bool due() const { return clock_.elapsed_ms() >= next_ms_; }
  void record(const Layout& layout, double energy, std::uint64_t iteration);
  /// Final sample; replaces the last one when no time has passed since it.
  RunTrace finish(const Layout& layout, double energy, std::uint64_t iteration,
                  Termination why);

 private:
  TraceSample make(const Layout& layout, double energy, std::uint64_t iteration);

  RunClock& clock_;
  double interval_ms_;
  std::function<double(const Layout&)> probe_;
  double next_ms_ = 0.0;
  TraceHook hook_;
  std::vector<TraceSample> samples_;
};

struct LayoutResult {
  Layout layout;
  RunTrace trace;
};

// Layout file: `LAYOUT <n>` then `POS <id> <x> <y>`; '#' starts a comment.
// Comment lines of the form `# key=value` carry run metadata.
using Metadata = std::map<std::string, std::string>;

void write_layout(const Layout& layout, const std::filesystem::path& path,
                  const Metadata& metadata = {});
Layout read_layout(const std::filesystem::path& path, Metadata* metadata = nullptr);
void format_layout(const Layout& layout, std::ostream& out, const Metadata& metadata = {});
Layout parse_layout(std::istream& in, Metadata* metadata = nullptr);

// Trace CSV: `elapsed_ms,energy,sensitivity,specificity`, then a trailing
// `# terminated_by=... iterations=...` comment.
void write_trace_csv(const RunTrace& trace, const std::filesystem::path& path);
RunTrace read_trace_csv(const std::filesystem::path& path);

}  // namespace kkb
