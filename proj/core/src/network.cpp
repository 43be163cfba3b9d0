#include "plm/network.hpp"

#include "plm/error.hpp"

namespace plm {

Network Network::compile(SceneSchema schema, BnStructure structure) {
  auto report = validate_schema(schema);
  if (!report.ok()) throw ValidationError("invalid schema:\n" + report.to_string());
  report = validate_structure(schema, structure);
  if (!report.ok()) throw ValidationError("invalid structure:\n" + report.to_string());

  Network net;
  net.schema_ = std::move(schema);
  net.structure_ = std::move(structure);
  net.outcome_ = net.schema_.outcome_index();
  net.nodes_.resize(net.schema_.size());

  for (std::size_t v = 0; v < net.schema_.size(); ++v) {
    auto& node = net.nodes_[v];
    for (const auto& p : parents_of(net.structure_, net.schema_.variables[v].name)) {
      node.parents.push_back(*net.schema_.index_of(p));
    }
    node.strides.assign(node.parents.size(), 1);
    std::size_t stride = 1;
    for (std::size_t i = node.parents.size(); i-- > 0;) {
      node.strides[i] = stride;
      stride *= net.cardinality(node.parents[i]);
    }
    node.configurations = stride;
  }

  const auto order = plm::topological_order(net.structure_);
  for (const auto& name : *order) {
    net.topo_.push_back(*net.schema_.index_of(name));
  }
  return net;
}

std::size_t Network::index_of(std::string_view name) const {
  auto idx = schema_.index_of(name);
  if (!idx) throw ValidationError("unknown variable '" + std::string(name) + "'");
  return *idx;
}

StateIndex Network::state_of(std::size_t v, std::string_view label) const {
  auto s = schema_.variables[v].state_index(label);
  if (!s) {
    throw ValidationError("unknown state '" + std::string(label) + "' for variable '" +
                          schema_.variables[v].name + "'");
  }
  return static_cast<StateIndex>(*s);
}

std::size_t Network::parent_config(std::size_t v, std::span<const StateIndex> assignment) const {
  const auto& node = nodes_[v];
  std::size_t u = 0;
  for (std::size_t i = 0; i < node.parents.size(); ++i) {
    u += static_cast<std::size_t>(assignment[node.parents[i]]) * node.strides[i];
  }
  return u;
}

std::vector<StateIndex> Network::decode_parent_config(std::size_t v, std::size_t u) const {
  const auto& node = nodes_[v];
  std::vector<StateIndex> states(node.parents.size());
  for (std::size_t i = 0; i < node.parents.size(); ++i) {
    states[i] = static_cast<StateIndex>(u / node.strides[i]);
    u %= node.strides[i];
  }
  return states;
}

std::string Network::describe_parent_config(std::size_t v, std::size_t u) const {
  auto states = decode_parent_config(v, u);
  std::string out;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto& p = variable(nodes_[v].parents[i]);
    if (i) out += ',';
    out += p.name + "=" + p.states[static_cast<std::size_t>(states[i])];
  }
  return out;
}

std::size_t Network::joint_size() const {
  std::size_t n = 1;
  for (const auto& v : schema_.variables) n *= v.cardinality();
  return n;
}

}  // namespace plm
