#include "kkb/layout.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "kkb/error.hpp"
#include "kkb/rng.hpp"

namespace kkb {

Layout random_layout(std::size_t n, Frame frame, std::uint64_t seed) {
  Rng rng(seed);
  Layout layout;
  layout.frame = frame;
  layout.positions.resize(n);
  for (auto& p : layout.positions) {
    p.x = rng.uniform(-frame.width / 2, frame.width / 2);
    p.y = rng.uniform(-frame.height / 2, frame.height / 2);
  }
  return layout;
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::kBudget: return "budget";
    case Termination::kEnergy: return "energy";
    case Termination::kEpsilon: return "epsilon";
    case Termination::kStable: return "stable";
  }
  return "unknown";
}

RunClock::RunClock(const RunOptions& options)
    : mode_(options.clock),
      budget_ms_(options.budget_secs * 1000.0),
      work_per_ms_(options.work_per_ms),
      start_(SteadyClock::now()) {
  if (!(options.budget_secs >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "budget must be non-negative");
  }
  if (!(work_per_ms_ > 0.0)) throw Error(ErrorCode::kInvalidArgument, "work rate must be positive");
}

double RunClock::elapsed_ms() const {
  if (mode_ == ClockMode::kWork) return static_cast<double>(work_) / work_per_ms_;
  const auto active = SteadyClock::now() - start_ - paused_;
  return std::chrono::duration<double, std::milli>(active).count();
}

RunClock::Pause::Pause(RunClock& clock) : clock_(clock), start_(SteadyClock::now()) {}
RunClock::Pause::~Pause() { clock_.paused_ += SteadyClock::now() - start_; }

TraceRecorder::TraceRecorder(RunClock& clock, const RunOptions& options, TraceHook hook)
    : clock_(clock),
      interval_ms_(options.sample_interval_ms),
      probe_(options.energy_probe),
      hook_(std::move(hook)) {
  if (!(interval_ms_ > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "sample interval must be positive");
  }
}

TraceSample TraceRecorder::make(const Layout& layout, double energy, std::uint64_t iteration) {
  TraceSample s;
  s.elapsed_ms = clock_.elapsed_ms();
  s.energy = energy;
  s.iteration = iteration;
  s.sensitivity = std::numeric_limits<double>::quiet_NaN();
  s.specificity = std::numeric_limits<double>::quiet_NaN();
  if (probe_) {
    RunClock::Pause pause(clock_);
    s.energy = probe_(layout);
  }
  if (hook_) {
    RunClock::Pause pause(clock_);
    if (auto score = hook_(layout)) {
      s.sensitivity = score->sensitivity;
      s.specificity = score->specificity;
    }
  }
  return s;
}

void TraceRecorder::record(const Layout& layout, double energy, std::uint64_t iteration) {
  TraceSample s = make(layout, energy, iteration);
  if (!samples_.empty() && s.elapsed_ms <= samples_.back().elapsed_ms) {
    samples_.back() = s;
  } else {
    samples_.push_back(s);
  }
  while (next_ms_ <= s.elapsed_ms) next_ms_ += interval_ms_;
}

RunTrace TraceRecorder::finish(const Layout& layout, double energy, std::uint64_t iteration,
                               Termination why) {
  record(layout, energy, iteration);
  RunTrace trace;
  trace.samples = std::move(samples_);
  trace.terminated_by = why;
  trace.iterations = iteration;
  return trace;
}

// ---------------------------------------------------------------------------

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
  throw Error(ErrorCode::kParse, "line " + std::to_string(line) + ": " + msg);
}

double to_double(const std::string& tok, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) fail(line, "invalid number '" + tok + "'");
  return v;
}

void read_metadata_comment(std::string_view comment, Metadata* metadata) {
  if (!metadata) return;
  std::istringstream ss{std::string(comment)};
  std::string word;
  while (ss >> word) {
    const auto eq = word.find('=');
    if (eq != std::string::npos && eq > 0) (*metadata)[word.substr(0, eq)] = word.substr(eq + 1);
  }
}

}  // namespace

void format_layout(const Layout& layout, std::ostream& out, const Metadata& metadata) {
  out << std::setprecision(17);
  for (const auto& [key, value] : metadata) out << "# " << key << '=' << value << '\n';
  out << "# frame=" << layout.frame.width << 'x' << layout.frame.height << '\n';
  out << "LAYOUT " << layout.size() << '\n';
  for (std::size_t i = 0; i < layout.size(); ++i) {
    out << "POS " << i << ' ' << layout.positions[i].x << ' ' << layout.positions[i].y << '\n';
  }
}

Layout parse_layout(std::istream& in, Metadata* metadata) {
  Layout layout;
  std::vector<char> seen;
  std::size_t count = 0;
  bool header = false;
  std::string raw;
  std::size_t line_no = 0;
  Metadata local;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line(raw);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      read_metadata_comment(line.substr(hash + 1), &local);
      line = line.substr(0, hash);
    }
    std::istringstream ss{std::string(line)};
    std::string kind;
    if (!(ss >> kind)) continue;
    if (kind == "LAYOUT") {
      if (header) fail(line_no, "duplicate LAYOUT header");
      std::size_t n = 0;
      if (!(ss >> n)) fail(line_no, "expected 'LAYOUT <n>'");
      layout.positions.assign(n, {});
      seen.assign(n, 0);
      header = true;
    } else if (kind == "POS") {
      if (!header) fail(line_no, "POS before LAYOUT header");
      std::size_t id = 0;
      std::string xs, ys;
      if (!(ss >> id >> xs >> ys)) fail(line_no, "expected 'POS <id> <x> <y>'");
      if (id >= layout.size()) fail(line_no, "unknown node id " + std::to_string(id));
      if (seen[id]) fail(line_no, "duplicate POS " + std::to_string(id));
      layout.positions[id] = {to_double(xs, line_no), to_double(ys, line_no)};
      if (!std::isfinite(layout.positions[id].x) || !std::isfinite(layout.positions[id].y)) {
        fail(line_no, "non-finite position");
      }
      seen[id] = 1;
      ++count;
    } else {
      fail(line_no, "unknown record '" + kind + "'");
    }
  }
  if (!header) fail(line_no, "missing LAYOUT header");
  if (count != layout.size()) fail(line_no, "POS lines do not cover every node");
  if (auto it = local.find("frame"); it != local.end()) {
    const auto x = it->second.find('x');
    if (x != std::string::npos) {
      layout.frame.width = to_double(it->second.substr(0, x), 0);
      layout.frame.height = to_double(it->second.substr(x + 1), 0);
    }
    local.erase(it);
  }
  if (metadata) *metadata = std::move(local);
  return layout;
}

void write_layout(const Layout& layout, const std::filesystem::path& path,
                  const Metadata& metadata) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  format_layout(layout, out, metadata);
}

Layout read_layout(const std::filesystem::path& path, Metadata* metadata) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return parse_layout(in, metadata);
}

void write_trace_csv(const RunTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << "elapsed_ms,energy,sensitivity,specificity\n";
  out << std::setprecision(10);
  for (const TraceSample& s : trace.samples) {
    out << s.elapsed_ms << ',' << s.energy << ',' << s.sensitivity << ',' << s.specificity << '\n';
  }
  out << "# terminated_by=" << to_string(trace.terminated_by)
      << " iterations=" << trace.iterations << '\n';
}

RunTrace read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  RunTrace trace;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line) || line != "elapsed_ms,energy,sensitivity,specificity") {
    fail(1, "unexpected trace header");
  }
  ++line_no;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      Metadata md;
      read_metadata_comment(std::string_view(line).substr(1), &md);
      if (auto it = md.find("iterations"); it != md.end()) {
        trace.iterations = std::stoull(it->second);
      }
      if (auto it = md.find("terminated_by"); it != md.end()) {
        for (auto t : {Termination::kBudget, Termination::kEnergy, Termination::kEpsilon,
                       Termination::kStable}) {
          if (it->second == to_string(t)) trace.terminated_by = t;
        }
      }
      continue;
    }
    std::vector<double> cols;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      cols.push_back(cell == "nan" || cell == "-nan" ? std::numeric_limits<double>::quiet_NaN()
                                                     : to_double(cell, line_no));
    }
    if (cols.size() != 4) fail(line_no, "expected 4 columns");
    trace.samples.push_back({cols[0], cols[1], cols[2], cols[3], 0});
  }
  return trace;
}

}  // namespace kkb
