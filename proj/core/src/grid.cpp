#include "plm/grid.hpp"

#include <algorithm>
#include <cmath>

#include "plm/error.hpp"
#include "plm/text.hpp"

namespace plm {

namespace {

int cell_span(double lo, double hi, double width, const char* axis) {
  double n = (hi - lo) / width;
  double rounded = std::round(n);
  if (rounded < 1.0 || std::abs(n - rounded) > 1e-9 * std::max(1.0, n)) {
    throw ValidationError(std::string("grid ") + axis +
                          " extent is not an integer multiple of the cell width");
  }
  return static_cast<int>(rounded);
}

}  // namespace

GridSpec::GridSpec(double cell_width_x, double cell_width_y, double x_min, double x_max,
                   double y_min, double y_max)
    : wx_(cell_width_x), wy_(cell_width_y), x_min_(x_min), x_max_(x_max), y_min_(y_min),
      y_max_(y_max) {
  for (double v : {wx_, wy_, x_min_, x_max_, y_min_, y_max_}) {
    if (!std::isfinite(v)) throw ValidationError("grid values must be finite");
  }
  if (!(wx_ > 0.0) || !(wy_ > 0.0)) throw ValidationError("grid cell widths must be positive");
  if (!(x_min_ < x_max_) || !(y_min_ < y_max_)) {
    throw ValidationError("grid extents must satisfy min < max");
  }
  cols_ = cell_span(x_min_, x_max_, wx_, "x");
  rows_ = cell_span(y_min_, y_max_, wy_, "y");
}

GridSpec GridSpec::parse(std::string_view spec) {
  auto bad = [&]() {
    return ValidationError("invalid grid '" + std::string(spec) +
                           "'; expected WXxWY,XMIN:XMAX,YMIN:YMAX");
  };
  auto parts = text::split(spec, ',');
  if (parts.size() != 3) throw bad();
  auto widths = text::split(parts[0], 'x');
  auto xs = text::split(parts[1], ':');
  auto ys = text::split(parts[2], ':');
  if (widths.size() != 2 || xs.size() != 2 || ys.size() != 2) throw bad();
  auto num = [&](std::string_view s) {
    auto v = text::parse_double(s);
    if (!v) throw bad();
    return *v;
  };
  return GridSpec(num(widths[0]), num(widths[1]), num(xs[0]), num(xs[1]), num(ys[0]), num(ys[1]));
}

std::string GridSpec::to_string() const {
  using text::format_double;
  return format_double(wx_) + "x" + format_double(wy_) + "," + format_double(x_min_) + ":" +
         format_double(x_max_) + "," + format_double(y_min_) + ":" + format_double(y_max_);
}

bool GridSpec::contains(double x, double y) const {
  return x >= x_min_ && x <= x_max_ && y >= y_min_ && y <= y_max_;
}

std::optional<CellIndex> GridSpec::locate(double x, double y) const {
  if (!contains(x, y)) return std::nullopt;
  int col = static_cast<int>(std::floor((x - x_min_) / wx_));
  int row = static_cast<int>(std::floor((y - y_min_) / wy_));
  col = std::clamp(col, 0, cols_ - 1);
  row = std::clamp(row, 0, rows_ - 1);
  return CellIndex{col, row};
}

GridSpec::Bounds GridSpec::bounds(CellIndex c) const {
  return {x_min_ + c.col * wx_, x_min_ + (c.col + 1) * wx_, y_min_ + c.row * wy_,
          y_min_ + (c.row + 1) * wy_};
}

Dataset clip_to_range(const Dataset& dataset, const GridSpec& grid) {
  Dataset out;
  out.metadata = dataset.metadata;
  for (const auto& inst : dataset.instances) {
    if (grid.contains(inst.x, inst.y)) out.instances.push_back(inst);
  }
  return out;
}

std::size_t CellPartition::total() const {
  std::size_t n = 0;
  for (const auto& c : cells) n += c.size();
  return n;
}

CellPartition partition(const Dataset& dataset, const GridSpec& grid) {
  CellPartition p{grid, std::vector<std::vector<DataInstance>>(grid.cell_count()),
                  dataset.metadata};
  for (const auto& inst : dataset.instances) {
    if (auto cell = grid.locate(inst.x, inst.y)) p.cells[grid.linear(*cell)].push_back(inst);
  }
  return p;
}

}  // namespace plm
