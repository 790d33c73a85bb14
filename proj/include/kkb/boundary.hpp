#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "kkb/graph.hpp"
#include "kkb/layout.hpp"

namespace kkb {

using BoundaryLabeling = std::vector<bool>;

/// Alpha-shape boundary of the layout with alpha = alpha_factor times the mean
/// drawn edge length.
BoundaryLabeling detect_boundary(const Layout& layout, const Topology& topology,
                                 double alpha_factor = 1.5);

struct ConfusionCounts {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::size_t total() const { return tp + fp + tn + fn; }
};

struct Score {
  ConfusionCounts counts;
  double sensitivity = 1.0;  // tp / (tp + fn), 1 when there are no true boundary nodes
  double specificity = 1.0;  // tn / (tn + fp), 1 when there are no true interior nodes
  double tpr = 1.0;
  double fnr = 0.0;
  bool no_boundary_truth = false;
  bool no_interior_truth = false;
};

Score score(const BoundaryLabeling& predicted, const BoundaryLabeling& truth);

/// Trace hook that scores detect_boundary against the topology's ground truth;
/// empty when the topology carries none.
TraceHook boundary_trace_hook(const Topology& topology, double alpha_factor = 1.5);

// Label file: CSV `node,boundary` with 0/1 values; `# key=value` comments
// carry metadata.
void write_labels(const BoundaryLabeling& labels, const std::filesystem::path& path,
                  const Metadata& metadata = {});
BoundaryLabeling read_labels(const std::filesystem::path& path, Metadata* metadata = nullptr);

}  // namespace kkb
