#include "plm/schema.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <queue>
#include <set>
#include <sstream>

#include "plm/error.hpp"

namespace plm {

std::optional<std::size_t> Variable::state_index(std::string_view label) const {
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i] == label) return i;
  }
  return std::nullopt;
}

const Variable* SceneSchema::find(std::string_view name) const {
  for (const auto& v : variables) {
    if (v.name == name) return &v;
  }
  return nullptr;
}

std::optional<std::size_t> SceneSchema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (variables[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t SceneSchema::outcome_index() const {
  std::optional<std::size_t> found;
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (variables[i].role != VariableRole::outcome) continue;
    if (found) throw ValidationError("schema has more than one outcome variable");
    found = i;
  }
  if (!found) throw ValidationError("schema has no outcome variable");
  return *found;
}

bool ValidationReport::contains(ViolationKind kind) const {
  return std::any_of(violations.begin(), violations.end(),
                     [kind](const Violation& v) { return v.kind == kind; });
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) os << '\n';
    os << violations[i].message;
  }
  return os.str();
}

ValidationReport validate_schema(const SceneSchema& schema) {
  ValidationReport report;
  auto add = [&](ViolationKind k, std::string msg) {
    report.violations.push_back({k, std::move(msg)});
  };

  std::set<std::string> seen;
  std::size_t outcomes = 0;
  for (const auto& var : schema.variables) {
    if (var.name.empty()) add(ViolationKind::empty_name, "variable with empty name");
    if (!seen.insert(var.name).second) {
      add(ViolationKind::duplicate_variable, "duplicate variable name '" + var.name + "'");
    }
    if (var.states.size() < 2) {
      add(ViolationKind::too_few_states,
          "variable '" + var.name + "' has " + std::to_string(var.states.size()) +
              " state(s); at least 2 required");
    }
    std::set<std::string> labels;
    for (const auto& s : var.states) {
      if (s.empty()) {
        add(ViolationKind::empty_name, "variable '" + var.name + "' has an empty state label");
      }
      if (!labels.insert(s).second) {
        add(ViolationKind::duplicate_state,
            "variable '" + var.name + "' repeats state '" + s + "'");
      }
    }
    if (var.role == VariableRole::outcome) ++outcomes;
  }
  if (outcomes == 0) add(ViolationKind::no_outcome, "schema has no outcome variable");
  if (outcomes > 1) {
    add(ViolationKind::multiple_outcomes,
        "schema has " + std::to_string(outcomes) +
            " outcome variables; FN and TP schemas must be separate documents");
  }
  return report;
}

namespace {

// Depth-first search for one cycle; returns it as a closed path.
std::vector<std::string> find_cycle(const std::map<std::string, std::vector<std::string>>& adj) {
  enum class Mark { none, active, done };
  std::map<std::string, Mark> mark;
  std::vector<std::string> stack;
  std::vector<std::string> cycle;

  std::function<bool(const std::string&)> visit = [&](const std::string& n) {
    mark[n] = Mark::active;
    stack.push_back(n);
    auto it = adj.find(n);
    if (it != adj.end()) {
      for (const auto& c : it->second) {
        if (mark[c] == Mark::active) {
          auto from = std::find(stack.begin(), stack.end(), c);
          cycle.assign(from, stack.end());
          cycle.push_back(c);
          return true;
        }
        if (mark[c] == Mark::none && visit(c)) return true;
      }
    }
    stack.pop_back();
    mark[n] = Mark::done;
    return false;
  };

  for (const auto& [n, _] : adj) {
    if (mark[n] == Mark::none && visit(n)) break;
  }
  return cycle;
}

}  // namespace

ValidationReport validate_structure(const SceneSchema& schema,
                                    const BnStructure& structure) {
  ValidationReport report;
  auto add = [&](ViolationKind k, std::string msg) {
    report.violations.push_back({k, std::move(msg)});
  };

  std::set<std::string> nodes;
  for (const auto& n : structure.nodes) {
    if (!nodes.insert(n).second) add(ViolationKind::duplicate_node, "duplicate node '" + n + "'");
    if (!schema.find(n)) add(ViolationKind::unknown_node, "node '" + n + "' is not a schema variable");
  }
  for (const auto& v : schema.variables) {
    if (!nodes.count(v.name)) {
      add(ViolationKind::missing_node, "schema variable '" + v.name + "' is not a structure node");
    }
  }

  std::set<Edge> edges;
  std::map<std::string, std::vector<std::string>> adj;
  for (const auto& n : nodes) adj[n];
  for (const auto& e : structure.edges) {
    bool known = true;
    for (const auto* end : {&e.parent, &e.child}) {
      if (!nodes.count(*end) || !schema.find(*end)) {
        add(ViolationKind::unknown_endpoint,
            "edge " + e.parent + " -> " + e.child + " names unknown variable '" + *end + "'");
        known = false;
      }
    }
    if (e.parent == e.child) {
      add(ViolationKind::self_loop, "self-loop on '" + e.parent + "'");
      continue;
    }
    if (!edges.insert(e).second) {
      add(ViolationKind::duplicate_edge, "duplicate edge " + e.parent + " -> " + e.child);
      continue;
    }
    if (known) adj[e.parent].push_back(e.child);
  }
  for (auto& [_, children] : adj) std::sort(children.begin(), children.end());

  auto cycle = find_cycle(adj);
  if (!cycle.empty()) {
    std::string path;
    for (std::size_t i = 0; i < cycle.size(); ++i) {
      if (i) path += " -> ";
      path += cycle[i];
    }
    add(ViolationKind::cycle, "structure is not acyclic: " + path);
  }
  return report;
}

std::vector<std::string> parents_of(const BnStructure& structure, std::string_view variable) {
  if (std::find(structure.nodes.begin(), structure.nodes.end(), variable) ==
      structure.nodes.end()) {
    throw ValidationError("unknown variable '" + std::string(variable) + "'");
  }
  std::vector<std::string> parents;
  for (const auto& e : structure.edges) {
    if (e.child == variable) parents.push_back(e.parent);
  }
  std::sort(parents.begin(), parents.end());
  parents.erase(std::unique(parents.begin(), parents.end()), parents.end());
  return parents;
}

std::optional<std::vector<std::string>> topological_order(const BnStructure& structure) {
  std::map<std::string, std::size_t> indegree;
  std::map<std::string, std::set<std::string>> children;
  for (const auto& n : structure.nodes) indegree[n];
  for (const auto& e : structure.edges) {
    if (children[e.parent].insert(e.child).second) ++indegree[e.child];
    indegree[e.parent];
  }

  std::priority_queue<std::string, std::vector<std::string>, std::greater<>> ready;
  for (const auto& [n, d] : indegree) {
    if (d == 0) ready.push(n);
  }
  std::vector<std::string> order;
  while (!ready.empty()) {
    auto n = ready.top();
    ready.pop();
    order.push_back(n);
    for (const auto& c : children[n]) {
      if (--indegree[c] == 0) ready.push(c);
    }
  }
  if (order.size() != indegree.size()) return std::nullopt;
  return order;
}

BnStructure structure_over(const SceneSchema& schema, std::vector<Edge> edges) {
  BnStructure s;
  s.nodes.reserve(schema.size());
  for (const auto& v : schema.variables) s.nodes.push_back(v.name);
  s.edges = std::move(edges);
  return s;
}

namespace {

const char* outcome_name(OutcomeKind kind) {
  return kind == OutcomeKind::false_negative ? "FN" : "TP";
}

}  // namespace

SceneSchema default_schema(OutcomeKind outcome) {
  using R = VariableRole;
  return SceneSchema{{
      {"Weather", {"clear", "rain", "fog"}, R::factor},
      {"Road", {"dry", "wet"}, R::factor},
      {"Illumination", {"day", "night", "tunnel_light"}, R::factor},
      {"Reflection", {"low", "high"}, R::factor},
      {"Occlusion", {"fully_visible", "partly_occluded", "largely_occluded"}, R::factor},
      {"Truncation", {"none", "truncated"}, R::factor},
      {outcome_name(outcome), {"no", "yes"}, R::outcome},
  }};
}

BnStructure default_structure(OutcomeKind outcome) {
  const std::string out = outcome_name(outcome);
  return structure_over(default_schema(outcome), {
                                                     {"Weather", "Road"},
                                                     {"Weather", "Illumination"},
                                                     {"Road", "Reflection"},
                                                     {"Illumination", "Reflection"},
                                                     {"Occlusion", out},
                                                     {"Truncation", out},
                                                     {"Reflection", out},
                                                 });
}

}  // namespace plm
