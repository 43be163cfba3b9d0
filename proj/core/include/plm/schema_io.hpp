#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "plm/schema.hpp"

namespace plm {

/// Schema/structure document. JSON with two optional top-level keys:
///
///   {
///     "variables": [{"name": "Weather", "role": "factor",
///                    "states": ["clear", "rain", "fog"]}, ...],
///     "edges": [{"parent": "Weather", "child": "Road"}, ...]
///   }
///
/// `role` is "factor" or "outcome". Unknown keys anywhere are rejected.
struct SchemaDocument {
  std::optional<SceneSchema> schema;
  std::optional<std::vector<Edge>> edges;
};

SchemaDocument parse_schema_document(std::string_view text);
SchemaDocument read_schema_document(const std::filesystem::path& path);

/// Canonical serialization (two-space indent, trailing newline). Parsing the
/// output and serializing again is the identity.
std::string serialize_schema_document(const SceneSchema& schema, const BnStructure& structure);

/// FNV-1a of the canonical serialization.
std::uint64_t schema_hash(const SceneSchema& schema, const BnStructure& structure);

}  // namespace plm
