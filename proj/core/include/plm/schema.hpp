#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace plm {

enum class VariableRole { factor, outcome };

/// A discrete scene variable (scenario factor or outcome node) with an
/// ordered list of state labels.
struct Variable {
  std::string name;
  std::vector<std::string> states;
  VariableRole role = VariableRole::factor;

  std::size_t cardinality() const { return states.size(); }
  std::optional<std::size_t> state_index(std::string_view label) const;

  bool operator==(const Variable&) const = default;
};

struct SceneSchema {
  std::vector<Variable> variables;

  std::size_t size() const { return variables.size(); }
  const Variable* find(std::string_view name) const;
  std::optional<std::size_t> index_of(std::string_view name) const;

  /// Index of the single outcome variable. Throws ValidationError when the
  /// schema does not have exactly one.
  std::size_t outcome_index() const;
  const Variable& outcome() const { return variables[outcome_index()]; }

  bool operator==(const SceneSchema&) const = default;
};

struct Edge {
  std::string parent;
  std::string child;

  auto operator<=>(const Edge&) const = default;
};

/// Expert-provided DAG over schema variables.
struct BnStructure {
  std::vector<std::string> nodes;
  std::vector<Edge> edges;

  bool operator==(const BnStructure&) const = default;
};

enum class ViolationKind {
  empty_name,
  duplicate_variable,
  duplicate_state,
  too_few_states,
  no_outcome,
  multiple_outcomes,
  unknown_node,
  missing_node,
  duplicate_node,
  unknown_endpoint,
  duplicate_edge,
  self_loop,
  cycle,
  invalid_parameter,
};

struct Violation {
  ViolationKind kind;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool contains(ViolationKind kind) const;
  std::string to_string() const;
};

ValidationReport validate_schema(const SceneSchema& schema);

/// Checks that `structure` is a DAG whose nodes are exactly the schema
/// variables. A cycle violation names one offending cycle, e.g.
/// "A -> B -> A".
ValidationReport validate_structure(const SceneSchema& schema,
                                    const BnStructure& structure);

/// Parents of `variable` sorted lexicographically by name. This order fixes
/// the parent-configuration indexing of every conditional belief table.
std::vector<std::string> parents_of(const BnStructure& structure,
                                    std::string_view variable);

/// Kahn's algorithm, smallest-name-first among ready nodes, so the order is
/// deterministic. Returns nullopt when the graph has a cycle.
std::optional<std::vector<std::string>> topological_order(
    const BnStructure& structure);

/// A structure whose nodes are all schema variables, in schema order.
BnStructure structure_over(const SceneSchema& schema, std::vector<Edge> edges);

enum class OutcomeKind { false_negative, true_positive };

/// The seven-node scene: Weather, Road, Illumination, Reflection, Occlusion,
/// Truncation and one outcome node named "FN" or "TP" with states {no, yes}.
SceneSchema default_schema(OutcomeKind outcome = OutcomeKind::false_negative);
BnStructure default_structure(OutcomeKind outcome = OutcomeKind::false_negative);

}  // namespace plm
