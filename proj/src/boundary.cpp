#include "kkb/boundary.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "kkb/alpha_shape.hpp"
#include "kkb/error.hpp"
#include "kkb/topo_gen.hpp"

namespace kkb {

BoundaryLabeling detect_boundary(const Layout& layout, const Topology& topology,
                                 double alpha_factor) {
  if (layout.size() != topology.node_count()) {
    throw Error(ErrorCode::kMismatch, "layout and topology sizes differ");
  }
  if (!(alpha_factor > 0.0)) throw Error(ErrorCode::kInvalidArgument, "alpha factor must be positive");
  for (const Point2& p : layout.positions) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw Error(ErrorCode::kInvalidArgument, "layout has non-finite positions");
    }
  }
  const double mean = mean_edge_length(topology, layout.positions);
  if (!(mean > 0.0)) return BoundaryLabeling(layout.size(), true);
  return alpha_shape_boundary(layout.positions, alpha_factor * mean);
}

Score score(const BoundaryLabeling& predicted, const BoundaryLabeling& truth) {
  if (predicted.size() != truth.size()) {
    throw Error(ErrorCode::kMismatch, "predicted and true labelings cover different node sets (" +
                                          std::to_string(predicted.size()) + " vs " +
                                          std::to_string(truth.size()) + ")");
  }
  Score s;
  auto& c = s.counts;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i]) {
      predicted[i] ? ++c.tp : ++c.fn;
    } else {
      predicted[i] ? ++c.fp : ++c.tn;
    }
  }
  s.no_boundary_truth = c.tp + c.fn == 0;
  s.no_interior_truth = c.tn + c.fp == 0;
  if (!s.no_boundary_truth) {
    s.sensitivity = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    s.fnr = static_cast<double>(c.fn) / static_cast<double>(c.tp + c.fn);
  } else {
    std::clog << "kkb: no true boundary nodes; sensitivity defined as 1\n";
  }
  if (!s.no_interior_truth) {
    s.specificity = static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp);
  } else {
    std::clog << "kkb: no true interior nodes; specificity defined as 1\n";
  }
  s.tpr = s.sensitivity;
  return s;
}

TraceHook boundary_trace_hook(const Topology& topology, double alpha_factor) {
  if (!topology.boundary_truth()) return {};
  return [&topology, alpha_factor](const Layout& layout) -> std::optional<DetectionScore> {
    const Score s = score(detect_boundary(layout, topology, alpha_factor), *topology.boundary_truth());
    return DetectionScore{s.sensitivity, s.specificity};
  };
}

void write_labels(const BoundaryLabeling& labels, const std::filesystem::path& path,
                  const Metadata& metadata) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  for (const auto& [key, value] : metadata) out << "# " << key << '=' << value << '\n';
  out << "node,boundary\n";
  for (std::size_t i = 0; i < labels.size(); ++i) out << i << ',' << (labels[i] ? 1 : 0) << '\n';
}

BoundaryLabeling read_labels(const std::filesystem::path& path, Metadata* metadata) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  BoundaryLabeling labels;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  auto fail = [&](const std::string& msg) {
    throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (metadata) {
        std::istringstream ss(line.substr(1));
        std::string word;
        while (ss >> word) {
          const auto eq = word.find('=');
          if (eq != std::string::npos && eq > 0) (*metadata)[word.substr(0, eq)] = word.substr(eq + 1);
        }
      }
      continue;
    }
    if (!header) {
      if (line != "node,boundary") fail("expected header 'node,boundary'");
      header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) fail("expected 'node,boundary'");
    std::size_t id = 0;
    int flag = 0;
    try {
      std::size_t used = 0;
      id = std::stoul(line.substr(0, comma), &used);
      if (used != comma) fail("invalid node id");
      flag = std::stoi(line.substr(comma + 1));
    } catch (const std::logic_error&) {
      fail("invalid number");
    }
    if (id != labels.size()) fail("node ids must be listed in order starting at 0");
    if (flag != 0 && flag != 1) fail("boundary flag must be 0 or 1");
    labels.push_back(flag == 1);
  }
  if (!header) fail("missing header");
  return labels;
}

}  // namespace kkb
