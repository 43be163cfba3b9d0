#include "plm/learn.hpp"

#include <numeric>

#include "plm/error.hpp"

namespace plm {

std::uint64_t Cbt::support(std::size_t u) const {
  std::uint64_t m = 0;
  for (std::size_t x = 0; x < cardinality; ++x) m += count(u, x);
  return m;
}

std::optional<double> Cbt::probability(std::size_t u, std::size_t x) const {
  if (!supported[u]) return std::nullopt;
  return probabilities[u * cardinality + x];
}

SufficientStatistics count_sufficient_statistics(std::span<const DataInstance> data,
                                                 const Network& network) {
  SufficientStatistics stats;
  stats.counts.resize(network.size());
  for (std::size_t v = 0; v < network.size(); ++v) {
    stats.counts[v].assign(network.parent_configurations(v) * network.cardinality(v), 0);
  }
  for (const auto& inst : data) {
    if (inst.assignment.size() != network.size()) {
      throw ValidationError("instance does not match the schema width");
    }
    for (std::size_t v = 0; v < network.size(); ++v) {
      if (inst.assignment[v] == kMissingState) {
        throw ValidationError("instance (frame " + std::to_string(inst.frame_id) + ", id " +
                              std::to_string(inst.id) + ") has no value for variable '" +
                              network.variable(v).name + "'");
      }
    }
    for (std::size_t v = 0; v < network.size(); ++v) {
      const auto u = network.parent_config(v, inst.assignment);
      ++stats.counts[v][u * network.cardinality(v) + static_cast<std::size_t>(inst.assignment[v])];
    }
    ++stats.instances;
  }
  return stats;
}

Cbt mle(const Network& network, std::size_t variable, std::span<const std::uint64_t> counts,
        double alpha) {
  if (!(alpha >= 0.0)) throw ValidationError("smoothing alpha must be non-negative");
  const std::size_t card = network.cardinality(variable);
  const std::size_t rows = network.parent_configurations(variable);
  if (counts.size() != rows * card) throw ValidationError("count table has the wrong shape");

  Cbt cbt;
  cbt.variable = network.variable(variable).name;
  for (auto p : network.parents(variable)) cbt.parent_order.push_back(network.variable(p).name);
  cbt.cardinality = card;
  cbt.counts.assign(counts.begin(), counts.end());
  cbt.probabilities.assign(rows * card, 0.0);
  cbt.supported.assign(rows, false);

  for (std::size_t u = 0; u < rows; ++u) {
    const std::uint64_t m_u = cbt.support(u);
    if (alpha == 0.0) {
      if (m_u == 0) continue;
      for (std::size_t x = 0; x < card; ++x) {
        cbt.probabilities[u * card + x] =
            static_cast<double>(cbt.count(u, x)) / static_cast<double>(m_u);
      }
    } else {
      const double denom = static_cast<double>(m_u) + alpha * static_cast<double>(card);
      for (std::size_t x = 0; x < card; ++x) {
        cbt.probabilities[u * card + x] = (static_cast<double>(cbt.count(u, x)) + alpha) / denom;
      }
    }
    cbt.supported[u] = true;
  }
  return cbt;
}

CellModel learn_cell(std::span<const DataInstance> data, const Network& network, CellIndex cell,
                     double alpha) {
  const auto stats = count_sufficient_statistics(data, network);
  CellModel model;
  model.cell = cell;
  model.sample_count = stats.instances;
  model.cbts.reserve(network.size());
  for (std::size_t v = 0; v < network.size(); ++v) {
    model.cbts.push_back(mle(network, v, stats.counts[v], alpha));
  }
  return model;
}

std::vector<CellModel> learn_all(const CellPartition& partition, const Network& network,
                                 double alpha) {
  std::vector<CellModel> models;
  models.reserve(partition.cells.size());
  for (std::size_t k = 0; k < partition.cells.size(); ++k) {
    models.push_back(learn_cell(partition.cells[k], network, partition.grid.cell_at(k), alpha));
  }
  return models;
}

}  // namespace plm
