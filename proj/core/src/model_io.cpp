#include <fstream>
#include <sstream>

#include "json.hpp"
#include "plm/error.hpp"
#include "plm/hash.hpp"
#include "plm/learn.hpp"
#include "plm/schema_io.hpp"

namespace plm {

using nlohmann::ordered_json;

namespace {

constexpr const char* kFormat = "plm-model/1";

}  // namespace

std::string serialize_model(const LearnedModel& model) {
  const auto& net = model.network;
  const auto schema_text = serialize_schema_document(net.schema(), net.structure());

  ordered_json doc;
  doc["format"] = kFormat;
  doc["grid"] = model.grid.to_string();
  doc["schema_hash"] = to_hex(fnv1a64(schema_text));
  doc["schema"] = ordered_json::parse(schema_text);
  doc["alpha"] = model.alpha;
  doc["tau"] = model.tau ? ordered_json(*model.tau) : ordered_json(nullptr);
  doc["config_hash"] = model.config_hash;
  doc["cells"] = ordered_json::array();

  for (const auto& cell : model.cells) {
    ordered_json jc;
    jc["col"] = cell.cell.col;
    jc["row"] = cell.cell.row;
    jc["sample_count"] = cell.sample_count;
    jc["cbts"] = ordered_json::array();
    for (const auto& cbt : cell.cbts) {
      ordered_json jt;
      jt["variable"] = cbt.variable;
      jt["parents"] = cbt.parent_order;
      jt["counts"] = ordered_json::array();
      jt["probabilities"] = ordered_json::array();
      for (std::size_t u = 0; u < cbt.rows(); ++u) {
        ordered_json counts = ordered_json::array();
        ordered_json probs = ordered_json::array();
        for (std::size_t x = 0; x < cbt.cardinality; ++x) {
          counts.push_back(cbt.count(u, x));
          if (cbt.supported[u]) probs.push_back(cbt.probabilities[u * cbt.cardinality + x]);
        }
        jt["counts"].push_back(std::move(counts));
        jt["probabilities"].push_back(cbt.supported[u] ? std::move(probs) : ordered_json(nullptr));
      }
      jc["cbts"].push_back(std::move(jt));
    }
    doc["cells"].push_back(std::move(jc));
  }
  return doc.dump(1) + "\n";
}

LearnedModel parse_model(std::string_view text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw ValidationError(std::string("model file is not valid JSON: ") + e.what());
  }

  try {
    if (doc.at("format").get<std::string>() != kFormat) {
      throw ValidationError("unsupported model format '" + doc.at("format").get<std::string>() + "'");
    }
    LearnedModel model;
    model.grid = GridSpec::parse(doc.at("grid").get<std::string>());
    auto sd = parse_schema_document(doc.at("schema").dump());
    if (!sd.schema || !sd.edges) throw ValidationError("model schema document is incomplete");
    model.network = Network::compile(*sd.schema, structure_over(*sd.schema, *sd.edges));
    model.alpha = doc.at("alpha").get<double>();
    if (!doc.at("tau").is_null()) model.tau = doc.at("tau").get<double>();
    model.config_hash = doc.at("config_hash").get<std::string>();

    const auto& net = model.network;
    const auto& cells = doc.at("cells");
    if (cells.size() != model.grid.cell_count()) {
      throw ValidationError("model cell count does not match its grid");
    }
    model.cells.resize(model.grid.cell_count());
    for (const auto& jc : cells) {
      CellModel cm;
      cm.cell = {jc.at("col").get<int>(), jc.at("row").get<int>()};
      if (!model.grid.valid(cm.cell)) throw ValidationError("model names an invalid cell");
      cm.sample_count = jc.at("sample_count").get<std::uint64_t>();
      const auto& cbts = jc.at("cbts");
      if (cbts.size() != net.size()) throw ValidationError("cell does not cover every variable");
      for (std::size_t v = 0; v < net.size(); ++v) {
        const auto& jt = cbts[v];
        Cbt cbt;
        cbt.variable = jt.at("variable").get<std::string>();
        if (cbt.variable != net.variable(v).name) {
          throw ValidationError("CBT order does not match the schema");
        }
        cbt.parent_order = jt.at("parents").get<std::vector<std::string>>();
        cbt.cardinality = net.cardinality(v);
        const std::size_t rows = net.parent_configurations(v);
        const auto& counts = jt.at("counts");
        const auto& probs = jt.at("probabilities");
        if (counts.size() != rows || probs.size() != rows) {
          throw ValidationError("CBT for '" + cbt.variable + "' has the wrong number of rows");
        }
        cbt.counts.reserve(rows * cbt.cardinality);
        cbt.probabilities.assign(rows * cbt.cardinality, 0.0);
        cbt.supported.assign(rows, false);
        for (std::size_t u = 0; u < rows; ++u) {
          if (counts[u].size() != cbt.cardinality) {
            throw ValidationError("CBT row for '" + cbt.variable + "' has the wrong width");
          }
          for (const auto& c : counts[u]) cbt.counts.push_back(c.get<std::uint64_t>());
          if (probs[u].is_null()) continue;
          if (probs[u].size() != cbt.cardinality) {
            throw ValidationError("CBT row for '" + cbt.variable + "' has the wrong width");
          }
          for (std::size_t x = 0; x < cbt.cardinality; ++x) {
            cbt.probabilities[u * cbt.cardinality + x] = probs[u][x].get<double>();
          }
          cbt.supported[u] = true;
        }
        cm.cbts.push_back(std::move(cbt));
      }
      model.cells[model.grid.linear(cm.cell)] = std::move(cm);
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed model file: ") + e.what());
  }
}

void write_model(const std::filesystem::path& path, const LearnedModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << serialize_model(model);
  if (!out) throw IoError("error writing " + path.string());
}

LearnedModel read_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_model(ss.str());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::string model_id(const LearnedModel& model) {
  return to_hex(fnv1a64(serialize_model(model)));
}

}  // namespace plm
