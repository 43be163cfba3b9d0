#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "plm/dataset.hpp"
#include "plm/grid.hpp"
#include "plm/infer.hpp"
#include "plm/learn.hpp"
#include "plm/network.hpp"

namespace plm {

enum class PlacementKind { uniform, clustered };

/// Where objects of a frame are placed. `uniform` draws every object
/// uniformly over the grid extents; `clustered` draws a frame center and
/// places objects uniformly within `cluster_radius` of it (clamped to the
/// extents).
struct Placement {
  PlacementKind kind = PlacementKind::uniform;
  double cluster_radius = 5.0;
};

/// Ground-truth generator: true CBTs for every variable plus a range-dependent
/// outcome mechanism.
///
/// In cell k the outcome's miss probability (FN=yes or TP=no) of every row is
/// shifted on the logit scale by `range_gain * d_k`, where d_k is the
/// distance of the cell center from the ego vehicle divided by the distance
/// of the farthest grid corner. All other CBTs are shared by every cell.
struct GeneratorSpec {
  Network network;
  GridSpec grid;
  std::vector<std::vector<double>> cbts;  ///< per variable, row-major [u][x]
  double range_gain = 0.0;
  std::size_t frames = 0;
  std::size_t objects_per_frame = 0;
  std::uint64_t seed = 0;
  double tau = 1.0;  ///< detections are jittered within mse tau / 2
  Placement placement;
  /// Variables sampled once per frame and shared by all of its objects; must
  /// be closed under taking parents.
  std::vector<std::string> frame_shared;
};

ValidationReport validate_generator(const GeneratorSpec& spec);

/// Normalized range d_k in [0, 1] of a cell center.
double normalized_range(const GridSpec& grid, CellIndex cell);

/// True CBTs of one cell.
std::vector<std::vector<double>> cell_cbts(const GeneratorSpec& spec, CellIndex cell);

/// CellModel whose CBTs are the cell's true CBTs (all rows supported, zero
/// counts).
CellModel truth_model(const GeneratorSpec& spec, CellIndex cell);

/// Exact Pr(target | evidence) under the cell's true CBTs by enumeration;
/// nullopt when the evidence has probability zero.
std::optional<double> analytic_marginal(const GeneratorSpec& spec, CellIndex cell,
                                        const Query& query);

struct GeneratedData {
  Dataset detections;    ///< role detection, outcome column absent
  Dataset ground_truth;  ///< role ground_truth, outcome column absent
  Dataset truth;         ///< ground truth with the sampled outcome filled in
};

/// Ancestral sampling in topological order. Misses get no detection; hits
/// get one detection within mse tau / 2 of the ground truth. Frame f uses its
/// own RNG stream derived from (seed, f), so the output is a pure function of
/// the spec.
GeneratedData sample(const GeneratorSpec& spec);

/// Machine-readable truth manifest: spec parameters, true CBTs and the
/// analytic per-cell miss probability.
std::string truth_manifest(const GeneratorSpec& spec);

/// JSON generator document:
///
///   {"schema": "<path>" | {...schema document...},
///    "grid": "20x10,-140:140,-50:50", "frames": 20000,
///    "objects_per_frame": 70, "seed": 42, "tau": 1.0, "range_gain": 1.5,
///    "placement": {"kind": "uniform"} | {"kind": "clustered", "radius": 5},
///    "frame_shared": ["Weather"],
///    "cbts": {"Weather": [[0.6, 0.25, 0.15]], ...}}
///
/// A relative schema path is resolved against `base_dir`; without "schema"
/// the default FN schema is used. Every variable needs a CBT.
GeneratorSpec parse_generator_spec(std::string_view text, const std::filesystem::path& base_dir);
GeneratorSpec read_generator_spec(const std::filesystem::path& path);

/// Demo generator over the default FN schema: miss probability grows with
/// range and with occlusion. 20000 frames of 70 objects, seed 42.
GeneratorSpec demo_generator_spec();

}  // namespace plm
