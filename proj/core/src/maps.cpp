#include "plm/maps.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "json.hpp"
#include "plm/error.hpp"
#include "plm/text.hpp"

namespace plm {

using nlohmann::ordered_json;

const char* to_string(MapKind kind) {
  switch (kind) {
    case MapKind::plm: return "PLM";
    case MapKind::cplm: return "CPLM";
    case MapKind::causal: return "causal";
  }
  return "unknown";
}

MapKind parse_map_kind(std::string_view text) {
  if (text == "plm" || text == "PLM") return MapKind::plm;
  if (text == "cplm" || text == "CPLM") return MapKind::cplm;
  if (text == "causal") return MapKind::causal;
  throw ValidationError("unknown map kind '" + std::string(text) + "'; use plm, cplm or causal");
}

namespace {

MapLayer evaluate_layer(const LearnedModel& model, MapKind kind, Query query) {
  const auto resolved = resolve(model.network, query);
  MapLayer layer;
  layer.grid = model.grid;
  layer.kind = kind;
  layer.query = std::move(query);
  layer.values.resize(model.cells.size());
  layer.null_reasons.resize(model.cells.size(), NullReason::none);
  layer.metadata.model_id = model_id(model);
  layer.metadata.alpha = model.alpha;
  layer.metadata.tau = model.tau;
  layer.metadata.config_hash = model.config_hash;
  for (std::size_t k = 0; k < model.cells.size(); ++k) {
    const auto r = posterior(model.network, model.cells[k], resolved);
    layer.values[k] = r.value;
    layer.null_reasons[k] = r.reason;
    layer.metadata.sample_counts.push_back(model.cells[k].sample_count);
  }
  return layer;
}

}  // namespace

MapLayer plm(const LearnedModel& model, const StateRef& target) {
  const auto v = model.network.index_of(target.variable);
  if (v != model.network.outcome()) {
    throw ValidationError("PLM target must be the outcome variable '" +
                          model.network.variable(model.network.outcome()).name + "'");
  }
  return evaluate_layer(model, MapKind::plm, Query{target, {}});
}

MapLayer cplm(const LearnedModel& model, const StateRef& target,
              const std::vector<StateRef>& evidence) {
  if (evidence.empty()) throw ValidationError("CPLM needs at least one evidence entry");
  return evaluate_layer(model, MapKind::cplm, Query{target, evidence});
}

MapLayer causal_map(const LearnedModel& model, const StateRef& cause,
                    const std::vector<StateRef>& effect_evidence) {
  return evaluate_layer(model, MapKind::causal, Query{cause, effect_evidence});
}

std::string layer_csv(const MapLayer& layer) {
  std::string out;
  const auto& g = layer.grid;
  for (int row = g.rows() - 1; row >= 0; --row) {
    for (int col = 0; col < g.cols(); ++col) {
      if (col) out += ',';
      if (auto v = layer.at({col, row})) out += text::format_double(*v);
    }
    out += '\n';
  }
  return out;
}

std::vector<std::optional<double>> import_csv(std::istream& in, const GridSpec& grid) {
  std::vector<std::optional<double>> values(grid.cell_count());
  std::string line;
  int row = grid.rows() - 1;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (row < 0) throw ValidationError("map CSV has more rows than the grid");
    auto fields = text::split(line, ',');
    if (fields.size() != static_cast<std::size_t>(grid.cols())) {
      throw ValidationError("map CSV row has " + std::to_string(fields.size()) +
                            " fields, grid has " + std::to_string(grid.cols()) + " columns");
    }
    for (int col = 0; col < grid.cols(); ++col) {
      auto f = text::trim(fields[static_cast<std::size_t>(col)]);
      if (f.empty()) continue;
      auto v = text::parse_double(f);
      if (!v) throw ValidationError("invalid map value '" + std::string(f) + "'");
      values[grid.linear({col, row})] = *v;
    }
    --row;
  }
  if (row != -1) throw ValidationError("map CSV has fewer rows than the grid");
  return values;
}

std::string layer_metadata_json(const MapLayer& layer) {
  ordered_json doc;
  doc["kind"] = to_string(layer.kind);
  doc["target"] = to_string(layer.query.target);
  doc["evidence"] = to_string(layer.query.evidence);
  doc["model_id"] = layer.metadata.model_id;
  doc["alpha"] = layer.metadata.alpha;
  doc["tau"] = layer.metadata.tau ? ordered_json(*layer.metadata.tau) : ordered_json(nullptr);
  doc["config_hash"] = layer.metadata.config_hash;
  doc["grid"] = layer.grid.to_string();
  doc["orientation"] = "rows: y descending; columns: x ascending";
  doc["reversed_scale"] = uses_reversed_scale(layer);
  ordered_json cells = ordered_json::array();
  for (std::size_t k = 0; k < layer.values.size(); ++k) {
    auto c = layer.grid.cell_at(k);
    ordered_json jc;
    jc["col"] = c.col;
    jc["row"] = c.row;
    jc["sample_count"] = k < layer.metadata.sample_counts.size() ? layer.metadata.sample_counts[k] : 0;
    jc["null_reason"] = layer.values[k] ? ordered_json(nullptr)
                                        : ordered_json(to_string(layer.null_reasons[k]));
    cells.push_back(std::move(jc));
  }
  doc["cells"] = std::move(cells);
  auto sym = symmetry(layer);
  doc["symmetry"]["across_x_axis"] =
      sym.across_x_axis ? ordered_json(*sym.across_x_axis) : ordered_json(nullptr);
  doc["symmetry"]["across_y_axis"] =
      sym.across_y_axis ? ordered_json(*sym.across_y_axis) : ordered_json(nullptr);
  return doc.dump(2) + "\n";
}

namespace {

void write_bytes(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << bytes;
  if (!out) throw IoError("error writing " + path.string());
}

}  // namespace

void export_csv(const MapLayer& layer, const std::filesystem::path& path) {
  write_bytes(path, layer_csv(layer));
  write_bytes(path.string() + ".meta.json", layer_metadata_json(layer));
}

Rgb heat_color(std::optional<double> value, bool reversed) {
  if (!value) return kNullColor;
  double t = std::clamp(*value, 0.0, 1.0);
  if (reversed) t = 1.0 - t;
  auto lerp = [](double a, double b, double s) {
    return static_cast<std::uint8_t>(std::lround(a + (b - a) * s));
  };
  // 0 -> blue (33, 102, 172), 0.5 -> white, 1 -> red (178, 24, 43)
  if (t < 0.5) {
    const double s = t / 0.5;
    return {lerp(33, 255, s), lerp(102, 255, s), lerp(172, 255, s)};
  }
  const double s = (t - 0.5) / 0.5;
  return {lerp(255, 178, s), lerp(255, 24, s), lerp(255, 43, s)};
}

bool uses_reversed_scale(const MapLayer& layer) {
  return layer.kind != MapKind::causal && layer.query.target.variable == "TP" &&
         layer.query.target.state == "yes";
}

std::string render_ppm(const MapLayer& layer, int scale) {
  if (scale < 1) throw ValidationError("image scale must be at least 1");
  const auto& g = layer.grid;
  const int width = g.cols() * scale;
  const int height = g.rows() * scale;
  const bool reversed = uses_reversed_scale(layer);

  std::string out = "P6\n# " + std::string(to_string(layer.kind)) + " " + to_string(layer.query.target);
  if (!layer.query.evidence.empty()) out += " | " + to_string(layer.query.evidence);
  if (!layer.metadata.model_id.empty()) out += " model=" + layer.metadata.model_id;
  if (!layer.metadata.config_hash.empty()) out += " config=" + layer.metadata.config_hash;
  out += "\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  out.reserve(out.size() + static_cast<std::size_t>(width) * height * 3);
  for (int py = 0; py < height; ++py) {
    const int row = g.rows() - 1 - py / scale;
    for (int px = 0; px < width; ++px) {
      const auto c = heat_color(layer.at({px / scale, row}), reversed);
      out.append(reinterpret_cast<const char*>(c.data()), 3);
    }
  }
  return out;
}

void export_ppm(const MapLayer& layer, const std::filesystem::path& path, int scale) {
  write_bytes(path, render_ppm(layer, scale));
}

SymmetryDiagnostic symmetry(const MapLayer& layer) {
  const auto& g = layer.grid;
  auto mean_diff = [&](auto mirror) -> std::optional<double> {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t k = 0; k < g.cell_count(); ++k) {
      auto c = g.cell_at(k);
      auto m = mirror(c);
      if (g.linear(m) <= k) continue;
      auto a = layer.values[k];
      auto b = layer.values[g.linear(m)];
      if (!a || !b) continue;
      sum += std::abs(*a - *b);
      ++n;
    }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
  };
  return {mean_diff([&](CellIndex c) { return CellIndex{c.col, g.rows() - 1 - c.row}; }),
          mean_diff([&](CellIndex c) { return CellIndex{g.cols() - 1 - c.col, c.row}; })};
}

}  // namespace plm
