#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "plm/schema.hpp"

namespace plm {

/// State of one variable in an assignment. Assignments are dense vectors
/// indexed by schema position.
using StateIndex = int;
inline constexpr StateIndex kMissingState = -1;
using Assignment = std::vector<StateIndex>;

/// A validated schema + structure compiled to index form.
///
/// Parent configurations are mixed-radix numbers over the variable's parents
/// in lexicographic name order, last parent varying fastest. A CBT for
/// variable v is stored row-major as [parent configuration][state].
class Network {
 public:
  Network() = default;

  /// Throws ValidationError carrying every violation when the schema or
  /// structure is invalid.
  static Network compile(SceneSchema schema, BnStructure structure);

  const SceneSchema& schema() const { return schema_; }
  const BnStructure& structure() const { return structure_; }

  std::size_t size() const { return schema_.size(); }
  const Variable& variable(std::size_t v) const { return schema_.variables[v]; }
  std::size_t cardinality(std::size_t v) const { return schema_.variables[v].cardinality(); }

  /// Throws ValidationError for an unknown name.
  std::size_t index_of(std::string_view name) const;
  /// Throws ValidationError for an unknown label.
  StateIndex state_of(std::size_t v, std::string_view label) const;

  std::span<const std::size_t> parents(std::size_t v) const { return nodes_[v].parents; }
  std::size_t parent_configurations(std::size_t v) const { return nodes_[v].configurations; }
  std::span<const std::size_t> topological_order() const { return topo_; }
  std::size_t outcome() const { return outcome_; }

  /// Parent configuration of v under `assignment`; every parent must be
  /// assigned.
  std::size_t parent_config(std::size_t v, std::span<const StateIndex> assignment) const;
  /// Inverse of parent_config: the parents' states, in parents(v) order.
  std::vector<StateIndex> decode_parent_config(std::size_t v, std::size_t u) const;
  /// Human-readable form such as "Illumination=night,Road=wet" ("" for roots).
  std::string describe_parent_config(std::size_t v, std::size_t u) const;

  /// Number of full joint assignments.
  std::size_t joint_size() const;

 private:
  struct Node {
    std::vector<std::size_t> parents;
    std::vector<std::size_t> strides;
    std::size_t configurations = 1;
  };

  SceneSchema schema_;
  BnStructure structure_;
  std::vector<Node> nodes_;
  std::vector<std::size_t> topo_;
  std::size_t outcome_ = 0;
};

}  // namespace plm
