#include "plm/synthgen.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "json.hpp"
#include "plm/association.hpp"
#include "plm/error.hpp"
#include "plm/schema_io.hpp"
#include "random.hpp"

namespace plm {

using nlohmann::json;
using nlohmann::ordered_json;

ValidationReport validate_generator(const GeneratorSpec& spec) {
  ValidationReport report;
  auto add = [&](std::string msg) {
    report.violations.push_back({ViolationKind::invalid_parameter, std::move(msg)});
  };
  const auto& net = spec.network;
  if (spec.cbts.size() != net.size()) {
    add("generator needs one CBT per variable");
    return report;
  }
  for (std::size_t v = 0; v < net.size(); ++v) {
    const auto card = net.cardinality(v);
    const auto rows = net.parent_configurations(v);
    const auto& name = net.variable(v).name;
    if (spec.cbts[v].size() != rows * card) {
      add("CBT for '" + name + "' needs " + std::to_string(rows) + " rows of " +
          std::to_string(card) + " probabilities");
      continue;
    }
    for (std::size_t u = 0; u < rows; ++u) {
      double sum = 0.0;
      for (std::size_t x = 0; x < card; ++x) {
        const double p = spec.cbts[v][u * card + x];
        if (!(p >= 0.0 && p <= 1.0)) add("CBT for '" + name + "' has an entry outside [0, 1]");
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-12) {
        add("CBT row " + std::to_string(u) + " of '" + name + "' does not sum to 1");
      }
    }
  }
  try {
    outcome_states(net.schema(), net.variable(net.outcome()).name);
  } catch (const ValidationError& e) {
    add(e.what());
  }
  std::set<std::size_t> shared;
  for (const auto& s : spec.frame_shared) {
    auto idx = net.schema().index_of(s);
    if (!idx) {
      add("frame_shared names unknown variable '" + s + "'");
      continue;
    }
    shared.insert(*idx);
  }
  for (auto v : shared) {
    for (auto p : net.parents(v)) {
      if (!shared.count(p)) {
        add("frame_shared variable '" + net.variable(v).name + "' has parent '" +
            net.variable(p).name + "' that is not shared");
      }
    }
  }
  if (!(spec.tau >= 0.0)) add("tau must be non-negative");
  if (!std::isfinite(spec.range_gain)) add("range_gain must be finite");
  if (spec.placement.kind == PlacementKind::clustered && !(spec.placement.cluster_radius >= 0.0)) {
    add("cluster radius must be non-negative");
  }
  return report;
}

double normalized_range(const GridSpec& grid, CellIndex cell) {
  const double far = std::hypot(std::max(std::abs(grid.x_min()), std::abs(grid.x_max())),
                                std::max(std::abs(grid.y_min()), std::abs(grid.y_max())));
  if (far == 0.0) return 0.0;
  return std::hypot(grid.center_x(cell.col), grid.center_y(cell.row)) / far;
}

std::vector<std::vector<double>> cell_cbts(const GeneratorSpec& spec, CellIndex cell) {
  auto cbts = spec.cbts;
  const auto& net = spec.network;
  const auto out = net.outcome();
  const auto states = outcome_states(net.schema(), net.variable(out).name);
  const double shift = spec.range_gain * normalized_range(spec.grid, cell);
  if (shift == 0.0) return cbts;

  const auto card = net.cardinality(out);
  auto& table = cbts[out];
  for (std::size_t u = 0; u < net.parent_configurations(out); ++u) {
    double& miss = table[u * card + static_cast<std::size_t>(states.miss)];
    double& hit = table[u * card + static_cast<std::size_t>(states.hit)];
    if (miss <= 0.0 || miss >= 1.0) continue;
    const double logit = std::log(miss / (1.0 - miss)) + shift;
    miss = 1.0 / (1.0 + std::exp(-logit));
    hit = 1.0 - miss;
  }
  return cbts;
}

CellModel truth_model(const GeneratorSpec& spec, CellIndex cell) {
  const auto cbts = cell_cbts(spec, cell);
  const auto& net = spec.network;
  CellModel m;
  m.cell = cell;
  for (std::size_t v = 0; v < net.size(); ++v) {
    Cbt cbt;
    cbt.variable = net.variable(v).name;
    for (auto p : net.parents(v)) cbt.parent_order.push_back(net.variable(p).name);
    cbt.cardinality = net.cardinality(v);
    cbt.counts.assign(cbts[v].size(), 0);
    cbt.probabilities = cbts[v];
    cbt.supported.assign(net.parent_configurations(v), true);
    m.cbts.push_back(std::move(cbt));
  }
  return m;
}

std::optional<double> analytic_marginal(const GeneratorSpec& spec, CellIndex cell,
                                        const Query& query) {
  const auto& net = spec.network;
  const auto cbts = cell_cbts(spec, cell);
  const auto q = resolve(net, query);

  // Recursive sum over variables in schema order.
  Assignment a(net.size(), 0);
  std::vector<int> fixed(net.size(), -1);
  for (auto [v, s] : q.evidence) fixed[v] = s;

  double num = 0.0, den = 0.0;
  auto recurse = [&](auto&& self, std::size_t v) -> void {
    if (v == net.size()) {
      double p = 1.0;
      for (std::size_t i = 0; i < net.size(); ++i) {
        const auto u = net.parent_config(i, a);
        p *= cbts[i][u * net.cardinality(i) + static_cast<std::size_t>(a[i])];
      }
      den += p;
      if (a[q.target] == q.target_state) num += p;
      return;
    }
    if (fixed[v] >= 0) {
      a[v] = fixed[v];
      self(self, v + 1);
      return;
    }
    for (std::size_t s = 0; s < net.cardinality(v); ++s) {
      a[v] = static_cast<StateIndex>(s);
      self(self, v + 1);
    }
  };
  recurse(recurse, 0);
  if (den == 0.0) return std::nullopt;
  return num / den;
}

namespace {

StateIndex draw(std::mt19937_64& rng, const double* probs, std::size_t card) {
  const double r = detail::uniform01(rng);
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t x = 0; x < card; ++x) {
    if (probs[x] <= 0.0) continue;
    acc += probs[x];
    last = x;
    if (r < acc) return static_cast<StateIndex>(x);
  }
  return static_cast<StateIndex>(last);
}

Point in_disk(std::mt19937_64& rng, Point center, double radius) {
  const double r = radius * std::sqrt(detail::uniform01(rng));
  const double theta = 2.0 * std::numbers::pi * detail::uniform01(rng);
  return {center.x + r * std::cos(theta), center.y + r * std::sin(theta)};
}

}  // namespace

GeneratedData sample(const GeneratorSpec& spec) {
  auto report = validate_generator(spec);
  if (!report.ok()) throw ValidationError("invalid generator spec:\n" + report.to_string());

  const auto& net = spec.network;
  const auto& grid = spec.grid;
  const auto out = net.outcome();
  const auto states = outcome_states(net.schema(), net.variable(out).name);

  std::vector<bool> shared(net.size(), false);
  for (const auto& s : spec.frame_shared) shared[net.index_of(s)] = true;

  std::vector<std::vector<std::vector<double>>> per_cell(grid.cell_count());
  for (std::size_t k = 0; k < grid.cell_count(); ++k) per_cell[k] = cell_cbts(spec, grid.cell_at(k));

  GeneratedData data;
  data.detections.metadata["seed"] = std::to_string(spec.seed);
  data.ground_truth.metadata = data.detections.metadata;
  std::int64_t gt_id = 0, det_id = 0;
  const double jitter = std::sqrt(spec.tau);

  auto ancestral = [&](std::mt19937_64& rng, Assignment& a, std::size_t cell, bool only_shared) {
    const auto& cbts = per_cell[cell];
    for (auto v : net.topological_order()) {
      if (shared[v] != only_shared) continue;
      const auto u = net.parent_config(v, a);
      const auto card = net.cardinality(v);
      a[v] = draw(rng, cbts[v].data() + u * card, card);
    }
  };
  auto uniform_point = [&](std::mt19937_64& rng) {
    const double x = grid.x_min() + detail::uniform01(rng) * (grid.x_max() - grid.x_min());
    const double y = grid.y_min() + detail::uniform01(rng) * (grid.y_max() - grid.y_min());
    return Point{x, y};
  };

  for (std::size_t f = 0; f < spec.frames; ++f) {
    std::mt19937_64 rng(detail::derive_seed(spec.seed, f));
    const auto frame_id = static_cast<std::int64_t>(f);

    const Point center = uniform_point(rng);
    Assignment frame_state(net.size(), kMissingState);
    bool frame_state_drawn = false;

    for (std::size_t o = 0; o < spec.objects_per_frame; ++o) {
      Point pos = spec.placement.kind == PlacementKind::uniform
                      ? uniform_point(rng)
                      : in_disk(rng, center, spec.placement.cluster_radius);
      pos.x = std::clamp(pos.x, grid.x_min(), grid.x_max());
      pos.y = std::clamp(pos.y, grid.y_min(), grid.y_max());
      const auto cell = grid.linear(*grid.locate(pos.x, pos.y));

      if (!frame_state_drawn) {
        const auto frame_cell = spec.placement.kind == PlacementKind::clustered
                                    ? grid.linear(*grid.locate(center.x, center.y))
                                    : cell;
        ancestral(rng, frame_state, frame_cell, true);
        frame_state_drawn = true;
      }
      Assignment a = frame_state;
      ancestral(rng, a, cell, false);

      DataInstance gt;
      gt.frame_id = frame_id;
      gt.id = gt_id++;
      gt.x = pos.x;
      gt.y = pos.y;
      gt.role = RecordRole::ground_truth;
      gt.assignment = a;
      data.truth.instances.push_back(gt);
      gt.assignment[out] = kMissingState;

      if (a[out] == states.hit) {
        DataInstance det = gt;
        det.id = det_id++;
        det.role = RecordRole::detection;
        const auto p = in_disk(rng, pos, jitter);
        det.x = p.x;
        det.y = p.y;
        data.detections.instances.push_back(std::move(det));
      }
      data.ground_truth.instances.push_back(std::move(gt));
    }
  }
  return data;
}

std::string truth_manifest(const GeneratorSpec& spec) {
  const auto& net = spec.network;
  const auto out = net.outcome();
  const auto& out_var = net.variable(out);
  const auto states = outcome_states(net.schema(), out_var.name);
  const StateRef miss{out_var.name, out_var.states[static_cast<std::size_t>(states.miss)]};

  ordered_json doc;
  doc["seed"] = spec.seed;
  doc["frames"] = spec.frames;
  doc["objects_per_frame"] = spec.objects_per_frame;
  doc["tau"] = spec.tau;
  doc["grid"] = spec.grid.to_string();
  doc["range_gain"] = spec.range_gain;
  doc["placement"]["kind"] = spec.placement.kind == PlacementKind::uniform ? "uniform" : "clustered";
  doc["placement"]["radius"] = spec.placement.cluster_radius;
  doc["frame_shared"] = spec.frame_shared;
  doc["outcome"]["variable"] = miss.variable;
  doc["outcome"]["miss_state"] = miss.state;
  doc["schema"] = ordered_json::parse(serialize_schema_document(net.schema(), net.structure()));
  for (std::size_t v = 0; v < net.size(); ++v) {
    ordered_json rows = ordered_json::array();
    const auto card = net.cardinality(v);
    for (std::size_t u = 0; u < net.parent_configurations(v); ++u) {
      rows.push_back(std::vector<double>(spec.cbts[v].begin() + static_cast<long>(u * card),
                                         spec.cbts[v].begin() + static_cast<long>((u + 1) * card)));
    }
    doc["cbts"][net.variable(v).name] = std::move(rows);
  }
  doc["cells"] = ordered_json::array();
  for (std::size_t k = 0; k < spec.grid.cell_count(); ++k) {
    const auto c = spec.grid.cell_at(k);
    ordered_json jc;
    jc["col"] = c.col;
    jc["row"] = c.row;
    jc["miss_probability"] = *analytic_marginal(spec, c, Query{miss, {}});
    doc["cells"].push_back(std::move(jc));
  }
  return doc.dump(1) + "\n";
}

namespace {

template <class T>
T get_or(const json& doc, const char* key, T fallback) {
  auto it = doc.find(key);
  return it == doc.end() ? fallback : it->get<T>();
}

}  // namespace

GeneratorSpec parse_generator_spec(std::string_view text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("generator spec is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("generator spec must be a JSON object");
  static const std::set<std::string> allowed{"schema", "grid", "frames", "objects_per_frame",
                                             "seed", "tau", "range_gain", "placement",
                                             "frame_shared", "cbts"};
  for (const auto& [k, _] : doc.items()) {
    if (!allowed.count(k)) throw ValidationError("unknown key '" + k + "' in generator spec");
  }

  try {
    SceneSchema schema = default_schema();
    BnStructure structure = default_structure();
    if (auto it = doc.find("schema"); it != doc.end()) {
      SchemaDocument sd = it->is_string()
                              ? read_schema_document(base_dir / it->get<std::string>())
                              : parse_schema_document(it->dump());
      if (!sd.schema || !sd.edges) {
        throw ValidationError("generator schema must hold both variables and edges");
      }
      schema = *sd.schema;
      structure = structure_over(schema, *sd.edges);
    }

    GeneratorSpec spec;
    spec.network = Network::compile(schema, structure);
    spec.grid = GridSpec::parse(get_or<std::string>(doc, "grid", GridSpec().to_string()));
    spec.frames = get_or<std::size_t>(doc, "frames", 0);
    spec.objects_per_frame = get_or<std::size_t>(doc, "objects_per_frame", 0);
    spec.seed = get_or<std::uint64_t>(doc, "seed", 0);
    spec.tau = get_or<double>(doc, "tau", 1.0);
    spec.range_gain = get_or<double>(doc, "range_gain", 0.0);
    spec.frame_shared = get_or<std::vector<std::string>>(doc, "frame_shared", {});
    if (auto it = doc.find("placement"); it != doc.end()) {
      for (const auto& [k, _] : it->items()) {
        if (k != "kind" && k != "radius") throw ValidationError("unknown key '" + k + "' in placement");
      }
      const auto kind = get_or<std::string>(*it, "kind", "uniform");
      if (kind == "uniform") {
        spec.placement.kind = PlacementKind::uniform;
      } else if (kind == "clustered") {
        spec.placement.kind = PlacementKind::clustered;
      } else {
        throw ValidationError("placement kind must be 'uniform' or 'clustered'");
      }
      spec.placement.cluster_radius = get_or<double>(*it, "radius", spec.placement.cluster_radius);
    }

    const auto& cbts = doc.at("cbts");
    for (const auto& [k, _] : cbts.items()) {
      if (!spec.network.schema().find(k)) throw ValidationError("cbts names unknown variable '" + k + "'");
    }
    for (std::size_t v = 0; v < spec.network.size(); ++v) {
      const auto& name = spec.network.variable(v).name;
      if (!cbts.contains(name)) throw ValidationError("cbts has no table for '" + name + "'");
      std::vector<double> flat;
      for (const auto& row : cbts.at(name)) {
        for (const auto& p : row) flat.push_back(p.get<double>());
      }
      spec.cbts.push_back(std::move(flat));
    }
    auto report = validate_generator(spec);
    if (!report.ok()) throw ValidationError("invalid generator spec:\n" + report.to_string());
    return spec;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed generator spec: ") + e.what());
  }
}

GeneratorSpec read_generator_spec(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open generator spec " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_generator_spec(ss.str(), path.parent_path());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

GeneratorSpec demo_generator_spec() {
  GeneratorSpec spec;
  spec.network = Network::compile(default_schema(), default_structure());
  spec.frames = 20000;
  spec.objects_per_frame = 70;
  spec.seed = 42;
  spec.tau = 1.0;
  spec.range_gain = 1.5;
  // Schema order: Weather, Road, Illumination, Reflection, Occlusion,
  // Truncation, FN. Parents are lexicographic, last parent fastest.
  spec.cbts = {
      {0.6, 0.25, 0.15},
      {0.9, 0.1, 0.2, 0.8, 0.6, 0.4},
      {0.6, 0.3, 0.1, 0.5, 0.4, 0.1, 0.55, 0.35, 0.1},
      {0.8, 0.2, 0.5, 0.5, 0.9, 0.1, 0.6, 0.4, 0.7, 0.3, 0.4, 0.6},
      {0.6, 0.25, 0.15},
      {0.85, 0.15},
      // FN | Occlusion, Reflection, Truncation; states {no, yes}
      {0.90, 0.10, 0.80, 0.20, 0.85, 0.15, 0.75, 0.25,
       0.75, 0.25, 0.65, 0.35, 0.70, 0.30, 0.60, 0.40,
       0.50, 0.50, 0.40, 0.60, 0.45, 0.55, 0.35, 0.65},
  };
  return spec;
}

}  // namespace plm
