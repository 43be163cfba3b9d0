#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "plm/network.hpp"
#include "plm/schema.hpp"

namespace plm {

enum class RecordRole { detection, ground_truth };

const char* to_string(RecordRole role);

/// One object-level record: a (possibly partial) assignment of the schema
/// variables plus its position relative to the ego vehicle.
struct DataInstance {
  std::int64_t frame_id = 0;
  /// Unique per role within a source; defaults to the record's ordinal.
  std::int64_t id = 0;
  double x = 0.0;  ///< meters, longitudinal, ego-forward positive
  double y = 0.0;  ///< meters, lateral, ego-left positive
  RecordRole role = RecordRole::ground_truth;
  Assignment assignment;  ///< per schema variable, kMissingState when absent
  std::optional<std::int64_t> matched_id;

  bool operator==(const DataInstance&) const = default;
};

struct Dataset {
  std::vector<DataInstance> instances;
  /// `# key=value` comment lines found in the source, e.g. tau.
  std::map<std::string, std::string> metadata;

  std::size_t size() const { return instances.size(); }
};

struct RowDiagnostic {
  std::size_t line = 0;  ///< 1-based line number in the source
  std::string message;
};

struct LoadResult {
  Dataset dataset;
  std::vector<RowDiagnostic> rejected;
};

/// Reads comma-separated records. The header must name `frame_id`, `x`, `y`
/// and `role`; the remaining columns are schema variables plus the optional
/// `id` and `matched_id`. Variable columns may be absent and fields may be
/// empty (missing assignment). Lines starting with `#` are comments; a
/// comment of the form `# key=value` is kept in Dataset::metadata.
///
/// Throws ValidationError for a malformed header or an unknown column. Bad
/// rows are collected in LoadResult::rejected with their line number.
LoadResult load_dataset(std::istream& in, const SceneSchema& schema);
LoadResult load_dataset_file(const std::filesystem::path& path, const SceneSchema& schema);

/// Writes the header `frame_id,x,y,role,<variables...>,id[,matched_id]`
/// followed by one row per instance. Metadata is written first as comments.
void write_dataset(std::ostream& out, const Dataset& dataset, const SceneSchema& schema,
                   bool with_matched_id);
void write_dataset_file(const std::filesystem::path& path, const Dataset& dataset,
                        const SceneSchema& schema, bool with_matched_id);

}  // namespace plm
