#include "plm/dataset.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "plm/error.hpp"
#include "plm/text.hpp"

namespace plm {

const char* to_string(RecordRole role) {
  return role == RecordRole::detection ? "detection" : "ground_truth";
}

namespace {

enum class Column { frame_id, x, y, role, id, matched_id, variable };

struct ColumnSpec {
  Column kind;
  std::size_t variable = 0;
};

std::vector<ColumnSpec> parse_header(std::string_view line, const SceneSchema& schema) {
  std::vector<ColumnSpec> cols;
  std::set<std::string, std::less<>> seen;
  for (auto raw : text::split(line, ',')) {
    auto name = text::trim(raw);
    if (name.empty()) throw ValidationError("malformed header: empty column name");
    if (!seen.emplace(name).second) {
      throw ValidationError("malformed header: duplicate column '" + std::string(name) + "'");
    }
    if (name == "frame_id") cols.push_back({Column::frame_id});
    else if (name == "x") cols.push_back({Column::x});
    else if (name == "y") cols.push_back({Column::y});
    else if (name == "role") cols.push_back({Column::role});
    else if (name == "id") cols.push_back({Column::id});
    else if (name == "matched_id") cols.push_back({Column::matched_id});
    else if (auto v = schema.index_of(name)) cols.push_back({Column::variable, *v});
    else throw ValidationError("unknown variable column '" + std::string(name) + "'");
  }
  for (const char* required : {"frame_id", "x", "y", "role"}) {
    if (!seen.count(std::string_view(required))) {
      throw ValidationError(std::string("malformed header: missing column '") + required + "'");
    }
  }
  return cols;
}

}  // namespace

LoadResult load_dataset(std::istream& in, const SceneSchema& schema) {
  LoadResult result;
  std::optional<std::vector<ColumnSpec>> cols;
  std::string line;
  std::size_t line_no = 0;
  std::int64_t ordinal = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    auto view = text::trim(line);
    if (view.empty()) continue;
    if (view.front() == '#') {
      auto body = text::trim(view.substr(1));
      if (auto eq = body.find('='); eq != std::string_view::npos) {
        result.dataset.metadata[std::string(text::trim(body.substr(0, eq)))] =
            std::string(text::trim(body.substr(eq + 1)));
      }
      continue;
    }
    if (!cols) {
      cols = parse_header(view, schema);
      continue;
    }

    auto fields = text::split(view, ',');
    auto reject = [&](std::string msg) {
      result.rejected.push_back({line_no, "line " + std::to_string(line_no) + ": " + std::move(msg)});
    };
    if (fields.size() != cols->size()) {
      reject("expected " + std::to_string(cols->size()) + " fields, found " +
             std::to_string(fields.size()));
      continue;
    }

    DataInstance inst;
    inst.id = ordinal;
    inst.assignment.assign(schema.size(), kMissingState);
    bool ok = true;
    for (std::size_t c = 0; c < cols->size() && ok; ++c) {
      auto f = text::trim(fields[c]);
      const auto& spec = (*cols)[c];
      switch (spec.kind) {
        case Column::frame_id:
        case Column::id: {
          auto v = text::parse_int(f);
          if (!v) {
            reject("invalid integer '" + std::string(f) + "'");
            ok = false;
          } else {
            (spec.kind == Column::frame_id ? inst.frame_id : inst.id) = *v;
          }
          break;
        }
        case Column::matched_id: {
          if (f.empty()) break;
          auto v = text::parse_int(f);
          if (!v) {
            reject("invalid matched_id '" + std::string(f) + "'");
            ok = false;
          } else {
            inst.matched_id = *v;
          }
          break;
        }
        case Column::x:
        case Column::y: {
          auto v = text::parse_double(f);
          if (!v || !std::isfinite(*v)) {
            reject("invalid coordinate '" + std::string(f) + "'");
            ok = false;
          } else {
            (spec.kind == Column::x ? inst.x : inst.y) = *v;
          }
          break;
        }
        case Column::role:
          if (f == "detection") {
            inst.role = RecordRole::detection;
          } else if (f == "ground_truth") {
            inst.role = RecordRole::ground_truth;
          } else {
            reject("invalid role '" + std::string(f) + "'");
            ok = false;
          }
          break;
        case Column::variable: {
          if (f.empty()) break;
          const auto& var = schema.variables[spec.variable];
          auto s = var.state_index(f);
          if (!s) {
            reject("unknown state '" + std::string(f) + "' for variable '" + var.name + "'");
            ok = false;
          } else {
            inst.assignment[spec.variable] = static_cast<StateIndex>(*s);
          }
          break;
        }
      }
    }
    ++ordinal;
    if (ok) result.dataset.instances.push_back(std::move(inst));
  }
  if (!cols) throw ValidationError("malformed header: no header row");
  return result;
}

LoadResult load_dataset_file(const std::filesystem::path& path, const SceneSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open data file " + path.string());
  try {
    return load_dataset(in, schema);
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void write_dataset(std::ostream& out, const Dataset& dataset, const SceneSchema& schema,
                   bool with_matched_id) {
  for (const auto& [k, v] : dataset.metadata) out << "# " << k << '=' << v << '\n';
  out << "frame_id,x,y,role";
  for (const auto& var : schema.variables) out << ',' << var.name;
  out << ",id";
  if (with_matched_id) out << ",matched_id";
  out << '\n';

  for (const auto& inst : dataset.instances) {
    out << inst.frame_id << ',' << text::format_double(inst.x) << ','
        << text::format_double(inst.y) << ',' << to_string(inst.role);
    for (std::size_t v = 0; v < schema.size(); ++v) {
      out << ',';
      auto s = v < inst.assignment.size() ? inst.assignment[v] : kMissingState;
      if (s != kMissingState) out << schema.variables[v].states[static_cast<std::size_t>(s)];
    }
    out << ',' << inst.id;
    if (with_matched_id) {
      out << ',';
      if (inst.matched_id) out << *inst.matched_id;
    }
    out << '\n';
  }
}

void write_dataset_file(const std::filesystem::path& path, const Dataset& dataset,
                        const SceneSchema& schema, bool with_matched_id) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_dataset(out, dataset, schema, with_matched_id);
  if (!out) throw IoError("error writing " + path.string());
}

}  // namespace plm
