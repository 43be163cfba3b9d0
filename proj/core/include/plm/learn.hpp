#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "plm/dataset.hpp"
#include "plm/grid.hpp"
#include "plm/network.hpp"

namespace plm {

/// Conditional belief table Pr(X | parents) for one variable of one cell,
/// row-major [parent configuration][state] (see Network for the indexing).
struct Cbt {
  std::string variable;
  std::vector<std::string> parent_order;
  std::size_t cardinality = 0;
  std::vector<std::uint64_t> counts;  ///< M[u, x]
  std::vector<double> probabilities;  ///< theta_{x|u}; 0 in unsupported rows
  std::vector<bool> supported;        ///< per row; false iff M[u] = 0 and alpha = 0

  std::size_t rows() const { return supported.size(); }
  std::uint64_t count(std::size_t u, std::size_t x) const { return counts[u * cardinality + x]; }
  std::uint64_t support(std::size_t u) const;
  /// nullopt for an unsupported row.
  std::optional<double> probability(std::size_t u, std::size_t x) const;

  bool operator==(const Cbt&) const = default;
};

/// The learned network of one grid cell.
struct CellModel {
  CellIndex cell;
  std::uint64_t sample_count = 0;
  std::vector<Cbt> cbts;  ///< schema order

  bool operator==(const CellModel&) const = default;
};

/// Joint occurrence tallies M[u, x], one row-major table per variable.
struct SufficientStatistics {
  std::vector<std::vector<std::uint64_t>> counts;
  std::uint64_t instances = 0;
};

/// Throws ValidationError naming the variable when an instance is not fully
/// observed.
SufficientStatistics count_sufficient_statistics(std::span<const DataInstance> data,
                                                 const Network& network);

/// theta_{x|u} = (M[u,x] + alpha) / (M[u] + alpha * |Val(X)|). With alpha = 0
/// this is exactly M[u,x] / M[u], and rows with M[u] = 0 are unsupported.
Cbt mle(const Network& network, std::size_t variable, std::span<const std::uint64_t> counts,
        double alpha);

CellModel learn_cell(std::span<const DataInstance> data, const Network& network, CellIndex cell,
                     double alpha);

/// One CellModel per grid cell, empty cells included (sample_count 0).
std::vector<CellModel> learn_all(const CellPartition& partition, const Network& network,
                                 double alpha);

/// A complete learned artifact: grid, network, smoothing and all cell models.
struct LearnedModel {
  GridSpec grid;
  Network network;
  double alpha = 0.0;
  std::optional<double> tau;
  std::string config_hash;
  std::vector<CellModel> cells;  ///< indexed by GridSpec::linear

  const CellModel& at(CellIndex c) const { return cells[grid.linear(c)]; }
};

/// Model file: JSON holding grid, schema document, schema hash, alpha, tau,
/// config hash and every cell's counts and probabilities (null for
/// unsupported rows). Serialization is deterministic.
std::string serialize_model(const LearnedModel& model);
LearnedModel parse_model(std::string_view text);
void write_model(const std::filesystem::path& path, const LearnedModel& model);
LearnedModel read_model(const std::filesystem::path& path);

/// Hex FNV-1a of the serialized model.
std::string model_id(const LearnedModel& model);

}  // namespace plm
