#include "kkb/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "kkb/error.hpp"
#include "kkb/rng.hpp"
#include "kkb/topo_gen.hpp"

namespace kkb {

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorCode::kInvalidArgument, msg); }

std::uint64_t hash_string(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) h = (h ^ c) * 0x100000001b3ULL;
  return h;
}

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad(key + ": invalid number '" + v + "'");
  return out;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad(key + ": invalid integer '" + v + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  bad(key + ": expected a boolean, got '" + v + "'");
}

std::string degree_label(double d) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", d);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + '"';
}

struct TopologySlot {
  std::string id;
  std::optional<Topology> topology;
  std::string error;
};

struct Job {
  std::size_t topo = 0;
  Algorithm algorithm = Algorithm::kKk;
  double k_percent = 5.0;
  std::string label;
  std::size_t seed_index = 0;
};

std::vector<TopologySlot> prepare_topologies(const ExperimentConfig& config) {
  std::vector<TopologySlot> slots;
  const auto topo_dir = config.output_dir / "topologies";
  std::filesystem::create_directories(topo_dir);

  if (!config.topology_dir.empty()) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(config.topology_dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".topo") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) bad("no .topo files in " + config.topology_dir.string());
    for (const auto& f : files) {
      TopologySlot slot;
      slot.id = f.stem().string();
      try {
        slot.topology = read_topology(f);
        if (slot.topology->node_count() > kMaxBenchNodes) {
          slot.topology.reset();
          slot.error = "topology exceeds " + std::to_string(kMaxBenchNodes) + " nodes";
        }
      } catch (const std::exception& ex) {
        slot.error = ex.what();
      }
      slots.push_back(std::move(slot));
    }
    return slots;
  }

  for (std::size_t n : config.node_counts) {
    for (double d : config.degrees) {
      TopologySlot slot;
      slot.id = "n" + std::to_string(n) + "-d" + degree_label(d);
      try {
        GenConfig gen = GenConfig::for_node_count(n, topology_seed(config.master_seed, slot.id));
        gen.e = config.e;
        gen.gamma_b = config.gamma_b;
        gen.target_degree = d;
        slot.topology = generate_topology(gen);
        write_topology(*slot.topology, topo_dir / (slot.id + ".topo"));
      } catch (const std::exception& ex) {
        slot.topology.reset();
        slot.error = ex.what();
      }
      slots.push_back(std::move(slot));
    }
  }
  return slots;
}

ResultRow execute(const ExperimentConfig& config, const TopologySlot& slot, const Job& job) {
  ResultRow row;
  row.topo_id = slot.id;
  row.algo = job.label;
  row.seed = run_seed(config.master_seed, slot.id, job.seed_index);
  const std::string stem = slot.id + "__" + job.label + "__s" + std::to_string(job.seed_index);
  try {
    if (!slot.topology) throw Error(ErrorCode::kGeneration, slot.error);
    RunConfig rc;
    rc.algorithm = job.algorithm;
    rc.seed = row.seed;
    rc.run.budget_secs = config.budget_secs;
    rc.run.clock = config.clock;
    rc.run.sample_interval_ms = config.sample_interval_ms;
    rc.k_percent = job.k_percent;
    rc.epsilon_r = config.epsilon_r;
    rc.alpha_factor = config.alpha_factor;
    rc.ds_base = config.ds_base;
    const RunOutput out = run_layout(*slot.topology, rc);
    const RunTrace& trace = out.result.trace;

    row.trace_path = "traces/" + stem + ".csv";
    write_trace_csv(trace, config.output_dir / row.trace_path);
    if (config.write_layouts) {
      write_layout(out.result.layout, config.output_dir / "layouts" / (stem + ".layout"),
                   run_metadata(rc, trace));
    }
    row.elapsed_ms = trace.samples.back().elapsed_ms;
    row.energy = trace.samples.back().energy;
    row.terminated_by = to_string(trace.terminated_by);
    row.iterations = trace.iterations;
    if (out.score) {
      row.score = *out.score;
    } else {
      row.score.sensitivity = row.score.specificity = std::nan("");
      row.score.tpr = row.score.fnr = std::nan("");
    }
  } catch (const std::exception& ex) {
    row.failed = true;
    row.error = ex.what();
  }
  return row;
}

}  // namespace

ExperimentConfig ExperimentConfig::full_grid() {
  ExperimentConfig c;
  c.node_counts = {500, 1000, 2000, 3000, 5000, 7000, 10000};
  return c;
}

void ExperimentConfig::validate() const {
  if (topology_dir.empty()) {
    if (node_counts.empty() || degrees.empty()) bad("node_counts and degrees must be nonempty");
    for (std::size_t n : node_counts) {
      if (n < 3) bad("node counts must be at least 3");
      if (n > kMaxBenchNodes) {
        bad("node count " + std::to_string(n) + " exceeds the limit of " +
            std::to_string(kMaxBenchNodes));
      }
    }
    for (double d : degrees)
      if (!(d > 0.0)) bad("degrees must be positive");
  }
  if (algorithms.empty()) bad("algorithms must be nonempty");
  if (seeds_per_topology == 0) bad("seeds_per_topology must be positive");
  if (!(budget_secs > 0.0)) bad("budget must be positive");
  if (k_percents.empty()) bad("k_percents must be nonempty");
  for (double k : k_percents)
    if (!(k > 0.0 && k <= 100.0)) bad("k percent must lie in (0, 100]");
  if (!(ds_k_percent > 0.0 && ds_k_percent <= 100.0)) bad("ds_k_percent must lie in (0, 100]");
  if (!(sample_interval_ms > 0.0)) bad("sample interval must be positive");
  if (workers == 0) bad("workers must be positive");
  if (!(e >= 0.0 && e <= 1.0) || !(gamma_b > 0.0 && gamma_b <= 1.0)) bad("e and gamma_b out of range");
}

void ExperimentConfig::set(const std::string& raw_key, const std::string& raw_value) {
  std::string key = trim(raw_key);
  std::replace(key.begin(), key.end(), '-', '_');
  const std::string value = trim(raw_value);
  if (key == "node_counts" || key == "n") {
    node_counts.clear();
    for (const auto& v : split_list(value)) node_counts.push_back(parse_unsigned(key, v));
  } else if (key == "degrees" || key == "degree") {
    degrees.clear();
    for (const auto& v : split_list(value)) degrees.push_back(parse_double(key, v));
  } else if (key == "e") {
    e = parse_double(key, value);
  } else if (key == "gamma_b") {
    gamma_b = parse_double(key, value);
  } else if (key == "seeds" || key == "seeds_per_topology") {
    seeds_per_topology = parse_unsigned(key, value);
  } else if (key == "budget" || key == "budget_secs") {
    budget_secs = parse_double(key, value);
  } else if (key == "algorithms" || key == "algos") {
    algorithms.clear();
    for (const auto& v : split_list(value)) algorithms.push_back(parse_algorithm(v));
  } else if (key == "k_percents" || key == "k_percent") {
    k_percents.clear();
    for (const auto& v : split_list(value)) k_percents.push_back(parse_double(key, v));
  } else if (key == "ds_k_percent") {
    ds_k_percent = parse_double(key, value);
  } else if (key == "epsilon_r") {
    epsilon_r = parse_double(key, value);
  } else if (key == "alpha_factor") {
    alpha_factor = parse_double(key, value);
  } else if (key == "ds_base") {
    if (value == "ss") ds_base = DsBaseModel::kSignalStrength;
    else if (value == "hop") ds_base = DsBaseModel::kHopCount;
    else bad("ds_base must be 'ss' or 'hop'");
  } else if (key == "clock") {
    if (value == "wall") clock = ClockMode::kWall;
    else if (value == "work") clock = ClockMode::kWork;
    else bad("clock must be 'wall' or 'work'");
  } else if (key == "sample_interval_ms") {
    sample_interval_ms = parse_double(key, value);
  } else if (key == "seed" || key == "master_seed") {
    master_seed = parse_unsigned(key, value);
  } else if (key == "workers") {
    workers = static_cast<unsigned>(parse_unsigned(key, value));
  } else if (key == "write_layouts") {
    write_layouts = parse_bool(key, value);
  } else if (key == "topology_dir" || key == "topo_dir") {
    topology_dir = value;
  } else if (key == "out_dir" || key == "output_dir") {
    output_dir = value;
  } else if (key == "full") {
    if (parse_bool(key, value)) node_counts = full_grid().node_counts;
  } else {
    bad("unknown setting '" + raw_key + "'");
  }
}

ExperimentConfig parse_experiment_config(std::istream& in, ExperimentConfig base) {
  std::string line;
  std::size_t number_of_line = 0;
  while (std::getline(in, line)) {
    ++number_of_line;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kParse, "line " + std::to_string(number_of_line) + ": expected key=value");
    }
    try {
      base.set(line.substr(0, eq), line.substr(eq + 1));
    } catch (const Error& ex) {
      throw Error(ErrorCode::kParse, "line " + std::to_string(number_of_line) + ": " + ex.what());
    }
  }
  return base;
}

ExperimentConfig read_experiment_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return parse_experiment_config(in, std::move(base));
}

std::uint64_t topology_seed(std::uint64_t master_seed, const std::string& topo_id) {
  return derive_seed(master_seed, hash_string(topo_id));
}

std::uint64_t run_seed(std::uint64_t master_seed, const std::string& topo_id, std::size_t index) {
  return derive_seed(topology_seed(master_seed, topo_id), 0x5eed0000ULL + index);
}

ResultTable run_experiment(const ExperimentConfig& config,
                           const std::function<void(const BenchProgress&)>& progress) {
  config.validate();
  std::filesystem::create_directories(config.output_dir / "traces");
  if (config.write_layouts) std::filesystem::create_directories(config.output_dir / "layouts");
  const std::vector<TopologySlot> slots = prepare_topologies(config);

  std::vector<Job> jobs;
  for (std::size_t t = 0; t < slots.size(); ++t) {
    for (Algorithm a : config.algorithms) {
      std::vector<std::pair<double, std::string>> variants;
      if (a == Algorithm::kKkMs) {
        for (double k : config.k_percents) {
          variants.emplace_back(k, std::string(to_string(a)) + "@" + degree_label(k));
        }
      } else {
        variants.emplace_back(config.ds_k_percent, to_string(a));
      }
      for (const auto& [k, label] : variants) {
        for (std::size_t s = 0; s < config.seeds_per_topology; ++s) {
          jobs.push_back({t, a, k, label, s});
        }
      }
    }
  }

  std::vector<ResultRow> rows(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex progress_mutex;
  std::size_t done = 0;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      rows[i] = execute(config, slots[jobs[i].topo], jobs[i]);
      std::lock_guard<std::mutex> lock(progress_mutex);
      ++done;
      if (progress) progress({done, jobs.size(), &rows[i]});
    }
  };
  const unsigned count = std::min<unsigned>(config.workers, static_cast<unsigned>(jobs.size()));
  std::vector<std::thread> threads;
  for (unsigned w = 1; w < count; ++w) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();

  std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    if (a.topo_id != b.topo_id) return a.topo_id < b.topo_id;
    if (a.algo != b.algo) return a.algo < b.algo;
    return a.seed < b.seed;
  });
  ResultTable table{std::move(rows)};
  write_scores_csv(table, config.output_dir / "scores.csv");
  return table;
}

void write_scores_csv(const ResultTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << "topo_id,algo,seed,elapsed_ms,sensitivity,specificity,tp,fp,tn,fn,"
         "energy,terminated_by,iterations,trace,status\n";
  for (const ResultRow& r : table.rows) {
    out << csv_field(r.topo_id) << ',' << r.algo << ',' << r.seed << ',';
    if (r.failed) {
      out << "nan,nan,nan,0,0,0,0,nan,,0,," << csv_field("failed: " + r.error) << '\n';
      continue;
    }
    const ConfusionCounts& c = r.score.counts;
    out << number(r.elapsed_ms) << ',' << number(r.score.sensitivity) << ','
        << number(r.score.specificity) << ',' << c.tp << ',' << c.fp << ',' << c.tn << ','
        << c.fn << ',' << number(r.energy) << ',' << r.terminated_by << ',' << r.iterations
        << ',' << csv_field(r.trace_path) << ",ok\n";
  }
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

}  // namespace kkb
