#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "plm/learn.hpp"

namespace plm {

struct SparseCell {
  CellIndex cell;
  std::uint64_t sample_count = 0;
};

struct SparseConfiguration {
  CellIndex cell;
  std::string variable;
  std::string parent_configuration;  ///< e.g. "Illumination=night,Road=wet"
  std::uint64_t support = 0;         ///< M[u]
};

struct RareState {
  std::string variable;
  std::string state;
  std::uint64_t count = 0;
  double frequency = 0.0;  ///< relative to all instances of the model
};

/// Data-sparsity report for expert review.
struct SparsityReport {
  std::uint64_t floor = 30;
  double rare_threshold = 0.01;
  /// Cells with fewer than `floor` instances (empty cells included).
  std::vector<SparseCell> sparse_cells;
  /// Parent configurations with M[u] < floor, in cells that are not sparse.
  std::vector<SparseConfiguration> sparse_configurations;
  /// States whose frequency over the whole model is below `rare_threshold`.
  std::vector<RareState> rare_states;

  bool empty() const {
    return sparse_cells.empty() && sparse_configurations.empty() && rare_states.empty();
  }
};

SparsityReport diagnose(const LearnedModel& model, std::uint64_t floor = 30,
                        double rare_threshold = 0.01);

/// Plain-text rendering, one finding per line.
std::string to_string(const SparsityReport& report);

}  // namespace plm
