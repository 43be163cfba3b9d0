#include "plm/diagnose.hpp"

#include <sstream>

#include "plm/text.hpp"

namespace plm {

SparsityReport diagnose(const LearnedModel& model, std::uint64_t floor, double rare_threshold) {
  const auto& net = model.network;
  SparsityReport report;
  report.floor = floor;
  report.rare_threshold = rare_threshold;

  std::vector<std::vector<std::uint64_t>> state_counts(net.size());
  for (std::size_t v = 0; v < net.size(); ++v) state_counts[v].assign(net.cardinality(v), 0);
  std::uint64_t total = 0;

  for (const auto& cell : model.cells) {
    total += cell.sample_count;
    for (std::size_t v = 0; v < net.size(); ++v) {
      const auto& cbt = cell.cbts[v];
      for (std::size_t u = 0; u < cbt.rows(); ++u) {
        for (std::size_t x = 0; x < cbt.cardinality; ++x) state_counts[v][x] += cbt.count(u, x);
      }
    }
    if (cell.sample_count < floor) {
      report.sparse_cells.push_back({cell.cell, cell.sample_count});
      continue;
    }
    for (std::size_t v = 0; v < net.size(); ++v) {
      const auto& cbt = cell.cbts[v];
      for (std::size_t u = 0; u < cbt.rows(); ++u) {
        const auto m = cbt.support(u);
        if (m < floor) {
          report.sparse_configurations.push_back(
              {cell.cell, cbt.variable, net.describe_parent_config(v, u), m});
        }
      }
    }
  }

  if (total > 0) {
    for (std::size_t v = 0; v < net.size(); ++v) {
      for (std::size_t x = 0; x < net.cardinality(v); ++x) {
        const double f = static_cast<double>(state_counts[v][x]) / static_cast<double>(total);
        if (f < rare_threshold) {
          report.rare_states.push_back(
              {net.variable(v).name, net.variable(v).states[x], state_counts[v][x], f});
        }
      }
    }
  }
  return report;
}

std::string to_string(const SparsityReport& report) {
  std::ostringstream os;
  os << "# floor=" << report.floor << " rare_threshold=" << text::format_double(report.rare_threshold)
     << '\n';
  for (const auto& c : report.sparse_cells) {
    os << "sparse_cell " << c.cell.col << ',' << c.cell.row << " M=" << c.sample_count << '\n';
  }
  for (const auto& c : report.sparse_configurations) {
    os << "sparse_configuration " << c.cell.col << ',' << c.cell.row << ' ' << c.variable;
    if (!c.parent_configuration.empty()) os << " | " << c.parent_configuration;
    os << " M=" << c.support << '\n';
  }
  for (const auto& r : report.rare_states) {
    os << "rare_state " << r.variable << '=' << r.state << " count=" << r.count
       << " frequency=" << text::format_double(r.frequency) << '\n';
  }
  return os.str();
}

}  // namespace plm
