#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "plm/grid.hpp"
#include "plm/infer.hpp"
#include "plm/learn.hpp"

namespace plm {

enum class MapKind { plm, cplm, causal };

const char* to_string(MapKind kind);
MapKind parse_map_kind(std::string_view text);

struct LayerMetadata {
  std::string model_id;
  double alpha = 0.0;
  std::optional<double> tau;
  std::string config_hash;
  std::vector<std::uint64_t> sample_counts;  ///< per cell, GridSpec::linear order
};

/// One per-cell probability field. Null cells carry the reason in
/// `null_reasons`.
struct MapLayer {
  GridSpec grid;
  MapKind kind = MapKind::plm;
  Query query;
  std::vector<std::optional<double>> values;
  std::vector<NullReason> null_reasons;
  LayerMetadata metadata;

  std::optional<double> at(CellIndex c) const { return values[grid.linear(c)]; }
};

/// Marginal Pr(target) per cell; `target` must be a state of the outcome
/// variable.
MapLayer plm(const LearnedModel& model, const StateRef& target);

/// Pr(target | evidence) per cell; evidence must be non-empty.
MapLayer cplm(const LearnedModel& model, const StateRef& target,
              const std::vector<StateRef>& evidence);

/// Pr(cause | effect evidence) per cell.
MapLayer causal_map(const LearnedModel& model, const StateRef& cause,
                    const std::vector<StateRef>& effect_evidence);

/// CSV matrix: one line per grid row from the highest y row down, columns in
/// ascending x, null cells as empty fields. Values use the shortest
/// round-trip decimal form, so import_csv restores them exactly.
std::string layer_csv(const MapLayer& layer);
std::vector<std::optional<double>> import_csv(std::istream& in, const GridSpec& grid);

/// Sidecar document naming kind, query, model id, alpha, tau, config hash,
/// grid and per-cell sample counts and null reasons.
std::string layer_metadata_json(const MapLayer& layer);

/// Writes `path` and `path` + ".meta.json".
void export_csv(const MapLayer& layer, const std::filesystem::path& path);

using Rgb = std::array<std::uint8_t, 3>;
inline constexpr Rgb kNullColor{128, 128, 128};

/// Diverging blue-white-red scale, linear over [0, 1]; `reversed` flips it.
Rgb heat_color(std::optional<double> value, bool reversed);

/// True when high values of the layer are desirable (TP=yes), so the scale
/// is reversed to keep undesired probabilities red.
bool uses_reversed_scale(const MapLayer& layer);

/// Binary PPM (P6), `scale` pixels per cell, same orientation as the CSV.
std::string render_ppm(const MapLayer& layer, int scale);
void export_ppm(const MapLayer& layer, const std::filesystem::path& path, int scale);

/// Mean |v(k) - v(mirror(k))| over cell pairs where both values are present.
/// `across_x_axis` mirrors rows (left/right of the ego vehicle),
/// `across_y_axis` mirrors columns (front/back). No pass threshold is
/// implied.
struct SymmetryDiagnostic {
  std::optional<double> across_x_axis;
  std::optional<double> across_y_axis;
};
SymmetryDiagnostic symmetry(const MapLayer& layer);

}  // namespace plm
