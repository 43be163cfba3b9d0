#include <fstream>
#include <sstream>

#include "json.hpp"
#include "plm/error.hpp"
#include "plm/grid.hpp"
#include "plm/hash.hpp"
#include "plm/schema_io.hpp"

namespace plm {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::string cell_file_name(CellIndex c) {
  return "cell_" + std::to_string(c.col) + "_" + std::to_string(c.row) + ".csv";
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("error writing " + path.string());
}

}  // namespace

void write_partition(const fs::path& dir, const CellPartition& partition,
                     const SceneSchema& schema, const BnStructure& structure) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());

  const auto schema_text = serialize_schema_document(schema, structure);
  write_text(dir / "schema.json", schema_text);

  ordered_json manifest;
  manifest["grid"] = partition.grid.to_string();
  manifest["schema_hash"] = to_hex(fnv1a64(schema_text));
  manifest["metadata"] = ordered_json::object();
  for (const auto& [k, v] : partition.metadata) manifest["metadata"][k] = v;
  manifest["total"] = partition.total();
  manifest["cells"] = ordered_json::array();

  for (std::size_t k = 0; k < partition.cells.size(); ++k) {
    auto cell = partition.grid.cell_at(k);
    Dataset d{partition.cells[k], {}};
    write_dataset_file(dir / cell_file_name(cell), d, schema, false);
    ordered_json jc;
    jc["col"] = cell.col;
    jc["row"] = cell.row;
    jc["count"] = partition.cells[k].size();
    jc["file"] = cell_file_name(cell);
    manifest["cells"].push_back(std::move(jc));
  }
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

CellPartition read_partition(const fs::path& dir, const SceneSchema& schema) {
  std::ifstream in(dir / "manifest.json", std::ios::binary);
  if (!in) throw IoError("cannot open " + (dir / "manifest.json").string());
  ordered_json manifest;
  try {
    manifest = ordered_json::parse(in);
  } catch (const std::exception& e) {
    throw ValidationError("malformed partition manifest: " + std::string(e.what()));
  }

  try {
    CellPartition p{GridSpec::parse(manifest.at("grid").get<std::string>()), {}, {}};
    p.cells.resize(p.grid.cell_count());
    for (const auto& [k, v] : manifest.at("metadata").items()) {
      p.metadata[k] = v.get<std::string>();
    }
    for (const auto& jc : manifest.at("cells")) {
      CellIndex cell{jc.at("col").get<int>(), jc.at("row").get<int>()};
      if (!p.grid.valid(cell)) throw ValidationError("partition manifest names an invalid cell");
      auto loaded = load_dataset_file(dir / jc.at("file").get<std::string>(), schema);
      if (!loaded.rejected.empty()) throw ValidationError(loaded.rejected.front().message);
      if (loaded.dataset.size() != jc.at("count").get<std::size_t>()) {
        throw ValidationError("cell file " + jc.at("file").get<std::string>() +
                              " does not match the manifest count");
      }
      p.cells[p.grid.linear(cell)] = std::move(loaded.dataset.instances);
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("malformed partition manifest: " + std::string(e.what()));
  }
}

}  // namespace plm
