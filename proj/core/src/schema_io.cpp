#include "plm/schema_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "plm/error.hpp"
#include "plm/hash.hpp"

namespace plm {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

void reject_unknown_keys(const json& obj, std::set<std::string> allowed, std::string_view where) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) {
      throw ValidationError("unknown key '" + key + "' in " + std::string(where));
    }
  }
}

const json& require(const json& obj, const char* key, std::string_view where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ValidationError("missing key '" + std::string(key) + "' in " + std::string(where));
  }
  return *it;
}

std::string require_string(const json& obj, const char* key, std::string_view where) {
  const auto& v = require(obj, key, where);
  if (!v.is_string()) {
    throw ValidationError("'" + std::string(key) + "' in " + std::string(where) + " must be a string");
  }
  return v.get<std::string>();
}

Variable parse_variable(const json& j, std::size_t index) {
  const std::string where = "variables[" + std::to_string(index) + "]";
  if (!j.is_object()) throw ValidationError(where + " must be an object");
  reject_unknown_keys(j, {"name", "role", "states"}, where);

  Variable v;
  v.name = require_string(j, "name", where);
  const auto& states = require(j, "states", where);
  if (!states.is_array()) throw ValidationError(where + ".states must be a list");
  for (const auto& s : states) {
    if (!s.is_string()) throw ValidationError(where + ".states must hold strings");
    v.states.push_back(s.get<std::string>());
  }
  std::string role = j.contains("role") ? require_string(j, "role", where) : "factor";
  if (role == "factor") {
    v.role = VariableRole::factor;
  } else if (role == "outcome") {
    v.role = VariableRole::outcome;
  } else {
    throw ValidationError(where + ".role must be 'factor' or 'outcome', got '" + role + "'");
  }
  return v;
}

}  // namespace

SchemaDocument parse_schema_document(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("schema document is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("schema document must be a JSON object");
  reject_unknown_keys(doc, {"variables", "edges"}, "schema document");

  SchemaDocument out;
  if (auto it = doc.find("variables"); it != doc.end()) {
    if (!it->is_array()) throw ValidationError("'variables' must be a list");
    SceneSchema schema;
    for (std::size_t i = 0; i < it->size(); ++i) {
      schema.variables.push_back(parse_variable((*it)[i], i));
    }
    out.schema = std::move(schema);
  }
  if (auto it = doc.find("edges"); it != doc.end()) {
    if (!it->is_array()) throw ValidationError("'edges' must be a list");
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < it->size(); ++i) {
      const auto& e = (*it)[i];
      const std::string where = "edges[" + std::to_string(i) + "]";
      if (!e.is_object()) throw ValidationError(where + " must be an object");
      reject_unknown_keys(e, {"parent", "child"}, where);
      edges.push_back({require_string(e, "parent", where), require_string(e, "child", where)});
    }
    out.edges = std::move(edges);
  }
  return out;
}

SchemaDocument read_schema_document(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open schema file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_schema_document(ss.str());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::string serialize_schema_document(const SceneSchema& schema, const BnStructure& structure) {
  ordered_json doc;
  doc["variables"] = ordered_json::array();
  for (const auto& v : schema.variables) {
    ordered_json jv;
    jv["name"] = v.name;
    jv["role"] = v.role == VariableRole::outcome ? "outcome" : "factor";
    jv["states"] = v.states;
    doc["variables"].push_back(std::move(jv));
  }
  doc["edges"] = ordered_json::array();
  for (const auto& e : structure.edges) {
    ordered_json je;
    je["parent"] = e.parent;
    je["child"] = e.child;
    doc["edges"].push_back(std::move(je));
  }
  return doc.dump(2) + "\n";
}

std::uint64_t schema_hash(const SceneSchema& schema, const BnStructure& structure) {
  return fnv1a64(serialize_schema_document(schema, structure));
}

}  // namespace plm
