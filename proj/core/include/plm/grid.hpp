#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "plm/dataset.hpp"

namespace plm {

/// Column (x) and row (y) of a grid cell, both zero-based from the minimum
/// corner.
struct CellIndex {
  int col = 0;
  int row = 0;

  auto operator<=>(const CellIndex&) const = default;
};

/// Cartesian grid around the ego vehicle. Cells are half-open [lo, hi)
/// except along the global maximum edges, which are closed, so every point
/// inside the extents belongs to exactly one cell.
class GridSpec {
 public:
  /// 20 m x 10 m cells over x in [-140, 140], y in [-50, 50]: 14 x 10 cells.
  GridSpec() : GridSpec(20.0, 10.0, -140.0, 140.0, -50.0, 50.0) {}

  /// Throws ValidationError unless widths are positive, min < max and each
  /// extent is an integer multiple of its cell width.
  GridSpec(double cell_width_x, double cell_width_y, double x_min, double x_max, double y_min,
           double y_max);

  /// Parses "WXxWY,XMIN:XMAX,YMIN:YMAX", e.g. "20x10,-140:140,-50:50".
  static GridSpec parse(std::string_view spec);
  std::string to_string() const;

  double cell_width_x() const { return wx_; }
  double cell_width_y() const { return wy_; }
  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  double y_min() const { return y_min_; }
  double y_max() const { return y_max_; }

  int cols() const { return cols_; }
  int rows() const { return rows_; }
  std::size_t cell_count() const { return static_cast<std::size_t>(cols_) * rows_; }

  bool contains(double x, double y) const;
  std::optional<CellIndex> locate(double x, double y) const;

  /// Linear index k = row * cols + col.
  std::size_t linear(CellIndex c) const {
    return static_cast<std::size_t>(c.row) * cols_ + static_cast<std::size_t>(c.col);
  }
  CellIndex cell_at(std::size_t k) const {
    return {static_cast<int>(k % cols_), static_cast<int>(k / cols_)};
  }
  bool valid(CellIndex c) const {
    return c.col >= 0 && c.col < cols_ && c.row >= 0 && c.row < rows_;
  }

  struct Bounds {
    double x_lo, x_hi, y_lo, y_hi;
  };
  Bounds bounds(CellIndex c) const;
  double center_x(int col) const { return x_min_ + (col + 0.5) * wx_; }
  double center_y(int row) const { return y_min_ + (row + 0.5) * wy_; }

  bool operator==(const GridSpec&) const = default;

 private:
  double wx_, wy_, x_min_, x_max_, y_min_, y_max_;
  int cols_ = 0, rows_ = 0;
};

/// Removes instances outside the closed grid extents.
Dataset clip_to_range(const Dataset& dataset, const GridSpec& grid);

/// Per-cell datasets, indexed by GridSpec::linear.
struct CellPartition {
  GridSpec grid;
  std::vector<std::vector<DataInstance>> cells;
  std::map<std::string, std::string> metadata;

  std::size_t total() const;
  const std::vector<DataInstance>& at(CellIndex c) const { return cells[grid.linear(c)]; }
};

/// Assigns each in-range instance to its cell by floor((coord - min) / width).
/// Instances outside the extents are skipped, so the partition holds exactly
/// the clipped dataset.
CellPartition partition(const Dataset& dataset, const GridSpec& grid);

/// Partition directory: `manifest.json` (grid, schema hash, metadata, per-cell
/// counts), `schema.json`, and one `cell_<col>_<row>.csv` per cell.
void write_partition(const std::filesystem::path& dir, const CellPartition& partition,
                     const SceneSchema& schema, const BnStructure& structure);
CellPartition read_partition(const std::filesystem::path& dir, const SceneSchema& schema);

}  // namespace plm
