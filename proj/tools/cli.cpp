#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "plm/association.hpp"
#include "plm/diagnose.hpp"
#include "plm/error.hpp"
#include "plm/eval.hpp"
#include "plm/grid.hpp"
#include "plm/hash.hpp"
#include "plm/infer.hpp"
#include "plm/learn.hpp"
#include "plm/maps.hpp"
#include "plm/schema_io.hpp"
#include "plm/synthgen.hpp"
#include "plm/text.hpp"

namespace plm::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

/// Environment variable naming a directory with a default `schema.json`.
constexpr const char* kConfigDirEnv = "PLM_CONFIG_DIR";

ordered_json params_json(const RunConfig& c) {
  ordered_json j;
  j["subcommand"] = c.subcommand;
  j["grid"] = c.grid;
  j["seed"] = c.seed ? ordered_json(*c.seed) : ordered_json(nullptr);
  j["tau"] = c.tau;
  j["alpha"] = c.alpha;
  j["outcome"] = c.outcome;
  j["policy"] = c.policy;
  j["kind"] = c.kind;
  j["target"] = c.target;
  j["evidence"] = c.evidence;
  j["cell"] = c.cell;
  j["all_cells"] = c.all_cells;
  j["frames"] = c.frames ? ordered_json(*c.frames) : ordered_json(nullptr);
  j["objects"] = c.objects ? ordered_json(*c.objects) : ordered_json(nullptr);
  j["ratio"] = c.ratio;
  j["floor"] = c.floor;
  j["rare"] = c.rare;
  j["scale"] = c.scale;
  return j;
}

}  // namespace

std::string RunConfig::to_json() const {
  auto j = params_json(*this);
  j["verbose"] = verbose;
  ordered_json paths;
  paths["schema"] = schema_path;
  paths["structure"] = structure_path;
  paths["spec"] = spec_path;
  paths["in"] = in_path;
  paths["out"] = out_path;
  paths["detections"] = detections_path;
  paths["ground_truth"] = ground_truth_path;
  paths["cells"] = cells_path;
  paths["model"] = model_path;
  paths["test"] = test_path;
  paths["train_out"] = train_out;
  paths["test_out"] = test_out;
  paths["csv"] = csv_path;
  paths["image"] = image_path;
  j["paths"] = std::move(paths);
  return j.dump(2);
}

std::string RunConfig::hash() const { return to_hex(fnv1a64(params_json(*this).dump())); }

namespace {

struct SchemaPair {
  SceneSchema schema;
  BnStructure structure;
};

// Resolves schema and structure from --schema / --structure, then
// `fallback_dir`/schema.json, then $PLM_CONFIG_DIR/schema.json, then the
// built-in default FN network. A structure without variables applies to the
// default schema.
SchemaPair load_schema(const RunConfig& cfg, const fs::path& fallback_dir = {}) {
  std::optional<SchemaDocument> schema_doc, structure_doc;
  if (!cfg.schema_path.empty()) schema_doc = read_schema_document(cfg.schema_path);
  if (!cfg.structure_path.empty()) structure_doc = read_schema_document(cfg.structure_path);

  if (!schema_doc && !structure_doc) {
    std::vector<fs::path> candidates;
    if (!fallback_dir.empty()) candidates.push_back(fallback_dir / "schema.json");
    if (const char* dir = std::getenv(kConfigDirEnv)) candidates.push_back(fs::path(dir) / "schema.json");
    for (const auto& c : candidates) {
      if (fs::exists(c)) {
        schema_doc = read_schema_document(c);
        break;
      }
    }
  }
  if (!schema_doc && !structure_doc) return {default_schema(), default_structure()};

  std::optional<SceneSchema> schema;
  if (schema_doc && schema_doc->schema) schema = schema_doc->schema;
  else if (structure_doc && structure_doc->schema) schema = structure_doc->schema;
  else if (!fallback_dir.empty() && fs::exists(fallback_dir / "schema.json")) {
    schema = read_schema_document(fallback_dir / "schema.json").schema;
  }
  if (!schema) schema = default_schema();

  std::optional<std::vector<Edge>> edges;
  if (structure_doc && structure_doc->edges) edges = structure_doc->edges;
  else if (schema_doc && schema_doc->edges) edges = schema_doc->edges;
  if (!edges) throw ValidationError("no structure edges found; pass --structure");

  return {*schema, structure_over(*schema, *edges)};
}

GridSpec load_grid(const RunConfig& cfg) {
  return cfg.grid.empty() ? GridSpec() : GridSpec::parse(cfg.grid);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("error writing " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

void report_rejected(const std::vector<RowDiagnostic>& rejected, const std::string& source,
                     std::ostream& err) {
  for (const auto& r : rejected) err << source << ": rejected " << r.message << '\n';
}

Dataset load_checked(const std::string& path, const SceneSchema& schema, std::ostream& err) {
  auto loaded = load_dataset_file(path, schema);
  report_rejected(loaded.rejected, path, err);
  return std::move(loaded.dataset);
}

std::string format_result(const InferenceResult& r) {
  if (r.value) return text::format_double(*r.value);
  std::string s = std::string("null (") + to_string(r.reason);
  if (!r.detail.empty()) s += ": " + r.detail;
  return s + ")";
}

CellIndex parse_cell(std::string_view text) {
  auto parts = text::split(text, ',');
  std::optional<std::int64_t> col, row;
  if (parts.size() == 2) {
    col = text::parse_int(parts[0]);
    row = text::parse_int(parts[1]);
  }
  if (!col || !row) throw ValidationError("--cell expects COL,ROW, got '" + std::string(text) + "'");
  return {static_cast<int>(*col), static_cast<int>(*row)};
}

// ---------------------------------------------------------------- commands

void cmd_generate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  GeneratorSpec spec = cfg.spec_path.empty() ? demo_generator_spec() : read_generator_spec(cfg.spec_path);
  if (!cfg.spec_path.empty() && (!cfg.schema_path.empty() || !cfg.structure_path.empty())) {
    err << "note: the generator spec defines its own schema; --schema/--structure ignored\n";
  }
  if (cfg.spec_path.empty() && (!cfg.schema_path.empty() || !cfg.structure_path.empty())) {
    auto [schema, structure] = load_schema(cfg);
    const auto net = Network::compile(schema, structure);
    if (!(net.schema() == spec.network.schema()) || !(net.structure() == spec.network.structure())) {
      throw ValidationError("the built-in demo generator covers only the default network; pass --spec");
    }
  }
  if (cfg.frames) spec.frames = *cfg.frames;
  if (cfg.objects) spec.objects_per_frame = *cfg.objects;
  if (cfg.seed) spec.seed = *cfg.seed;
  if (!cfg.grid.empty()) spec.grid = GridSpec::parse(cfg.grid);

  auto data = sample(spec);
  const fs::path dir = cfg.out_path;
  ensure_dir(dir);
  const auto& schema = spec.network.schema();
  for (auto* d : {&data.detections, &data.ground_truth}) d->metadata["config"] = cfg.hash();
  write_dataset_file(dir / "detections.csv", data.detections, schema, false);
  write_dataset_file(dir / "ground_truth.csv", data.ground_truth, schema, false);
  write_text(dir / "truth.json", truth_manifest(spec));
  write_text(dir / "schema.json", serialize_schema_document(schema, spec.network.structure()));
  out << "generated " << data.ground_truth.size() << " ground truths, " << data.detections.size()
      << " detections in " << spec.frames << " frames -> " << dir.string() << '\n';
}

void cmd_label(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  auto [schema, structure] = load_schema(cfg);
  std::string outcome = cfg.outcome.empty() ? schema.outcome().name : cfg.outcome;
  const auto policy = cfg.policy.empty() || cfg.policy == "optimal" ? MatchPolicy::optimal
                      : cfg.policy == "greedy"
                          ? MatchPolicy::greedy
                          : throw ValidationError("--policy must be 'optimal' or 'greedy'");

  Dataset records;
  auto dets = load_checked(cfg.detections_path, schema, err);
  auto gts = load_checked(cfg.ground_truth_path, schema, err);
  for (auto& d : dets.instances) d.role = RecordRole::detection;
  for (auto& g : gts.instances) g.role = RecordRole::ground_truth;
  records.instances = std::move(dets.instances);
  records.instances.insert(records.instances.end(), gts.instances.begin(), gts.instances.end());

  auto result = label_outcomes(records, schema, cfg.tau, outcome, policy);
  result.labeled.metadata["config"] = cfg.hash();
  write_dataset_file(cfg.out_path, result.labeled, schema, true);

  const auto& s = result.stats;
  out << "frames=" << s.frames << " ground_truths=" << s.ground_truths << " matched=" << s.matched
      << " missed=" << s.missed << " unmatched_detections=" << s.unmatched_detections
      << " tau=" << text::format_double(cfg.tau) << '\n';
  if (s.ambiguous_frames) {
    err << "warning: " << s.ambiguous_frames
        << " frame(s) had a detection within tau of several ground truths\n";
  }
}

void cmd_partition(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  auto [schema, structure] = load_schema(cfg);
  const auto grid = load_grid(cfg);
  auto data = load_checked(cfg.in_path, schema, err);
  const auto clipped = clip_to_range(data, grid);
  auto p = partition(clipped, grid);
  p.metadata["config"] = cfg.hash();
  write_partition(cfg.out_path, p, schema, structure);
  out << "cells=" << grid.cell_count() << " instances=" << p.total()
      << " clipped=" << data.size() - clipped.size() << '\n';
}

void cmd_learn(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const fs::path cells = cfg.cells_path;
  auto [schema, structure] = load_schema(cfg, cells);
  LearnedModel model;
  model.network = Network::compile(schema, structure);
  auto p = read_partition(cells, model.network.schema());
  model.grid = p.grid;
  model.alpha = cfg.alpha;
  if (auto it = p.metadata.find("tau"); it != p.metadata.end()) model.tau = text::parse_double(it->second);
  model.config_hash = cfg.hash();
  model.cells = learn_all(p, model.network, cfg.alpha);
  write_model(cfg.out_path, model);
  std::size_t populated = 0;
  for (const auto& c : model.cells) populated += c.sample_count > 0;
  out << "model " << model_id(model) << ": " << model.cells.size() << " cells, " << populated
      << " populated, alpha=" << text::format_double(cfg.alpha) << '\n';
}

void cmd_query(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const auto model = read_model(cfg.model_path);
  Query q{parse_state_ref(cfg.target), parse_evidence(cfg.evidence)};
  const auto resolved = resolve(model.network, q);
  if (cfg.all_cells) {
    out << "col,row,value\n";
    for (const auto& cell : model.cells) {
      auto r = posterior(model.network, cell, resolved);
      out << cell.cell.col << ',' << cell.cell.row << ',' << format_result(r) << '\n';
    }
    return;
  }
  if (cfg.cell.empty()) throw ValidationError("query needs --cell COL,ROW or --all-cells");
  const auto c = parse_cell(cfg.cell);
  if (!model.grid.valid(c)) throw ValidationError("cell " + cfg.cell + " is outside the grid");
  out << format_result(posterior(model.network, model.at(c), resolved)) << '\n';
}

void cmd_map(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const auto model = read_model(cfg.model_path);
  const auto kind = parse_map_kind(cfg.kind);
  const auto target = parse_state_ref(cfg.target);
  const auto evidence = parse_evidence(cfg.evidence);
  if (kind == MapKind::plm && !evidence.empty()) {
    throw ValidationError("a PLM takes no evidence; use --kind cplm");
  }
  MapLayer layer = kind == MapKind::plm    ? plm(model, target)
                   : kind == MapKind::cplm ? cplm(model, target, evidence)
                                           : causal_map(model, target, evidence);
  layer.metadata.config_hash = cfg.hash();
  if (cfg.csv_path.empty() && cfg.image_path.empty()) out << layer_csv(layer);
  if (!cfg.csv_path.empty()) export_csv(layer, cfg.csv_path);
  if (!cfg.image_path.empty()) export_ppm(layer, cfg.image_path, cfg.scale);
  std::size_t nulls = 0;
  for (const auto& v : layer.values) nulls += !v.has_value();
  out << to_string(layer.kind) << ' ' << to_string(layer.query.target)
      << (evidence.empty() ? "" : " | " + to_string(evidence)) << ": " << layer.values.size()
      << " cells, " << nulls << " null\n";
}

void cmd_split(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  auto [schema, structure] = load_schema(cfg);
  auto data = load_checked(cfg.in_path, schema, err);
  SplitSpec spec{cfg.ratio, parse_split_policy(cfg.policy.empty() ? "by_frame" : cfg.policy),
                 cfg.seed.value_or(0)};
  auto s = split(data, spec);
  s.train.metadata["config"] = s.test.metadata["config"] = cfg.hash();
  write_dataset_file(cfg.train_out, s.train, schema, true);
  write_dataset_file(cfg.test_out, s.test, schema, true);
  out << "train=" << s.train.size() << " test=" << s.test.size() << " policy=" << to_string(spec.policy)
      << '\n';
}

void cmd_eval(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto model = read_model(cfg.model_path);
  auto test = load_checked(cfg.test_path, model.network.schema(), err);
  std::vector<std::string> nodes;
  const std::string list = cfg.evidence.empty() ? "Weather,Occlusion,Road,Reflection" : cfg.evidence;
  for (auto n : text::split(list, ',')) {
    nodes.emplace_back(text::trim(n));
  }
  const auto report = evaluate_all(model, test, nodes);
  const auto csv = "# config=" + cfg.hash() + "\n# model=" + model_id(model) + "\n" + report_csv(report);
  if (!cfg.out_path.empty()) write_text(cfg.out_path, csv);
  out << report_csv(report);
}

void cmd_diagnose(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const auto model = read_model(cfg.model_path);
  const auto report = diagnose(model, cfg.floor, cfg.rare);
  const auto body = to_string(report);
  if (!cfg.out_path.empty()) write_text(cfg.out_path, "# config=" + cfg.hash() + "\n" + body);
  out << body;
  if (report.empty()) out << "no sparse cells, sparse configurations or rare states\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Performance limitation maps from per-cell Bayesian networks", "plm"};
  app.require_subcommand(1);
  app.fallthrough();

  app.add_option("--schema", cfg.schema_path, "Schema document (variables, optionally edges)");
  app.add_option("--structure", cfg.structure_path, "Structure document (edges)");
  app.add_option("--grid", cfg.grid, "Grid WXxWY,XMIN:XMAX,YMIN:YMAX (default 20x10,-140:140,-50:50)");
  app.add_option("--seed", cfg.seed, "Random seed");
  app.add_flag("--verbose", cfg.verbose, "Print the resolved run configuration");

  auto* gen = app.add_subcommand("generate", "Sample a synthetic dataset from a generator spec");
  gen->add_option("--spec", cfg.spec_path, "Generator spec (default: built-in demo)");
  gen->add_option("--frames", cfg.frames, "Override frame count");
  gen->add_option("--objects", cfg.objects, "Override objects per frame");
  gen->add_option("--out", cfg.out_path, "Output directory")->required();

  auto* label = app.add_subcommand("label", "Label ground truths TP/FN by matching detections");
  label->add_option("--tau", cfg.tau, "Match gate on mse, square meters")->capture_default_str();
  label->add_option("--outcome", cfg.outcome, "Outcome variable (FN or TP)");
  label->add_option("--policy", cfg.policy, "optimal (default) or greedy");
  label->add_option("--detections", cfg.detections_path)->required();
  label->add_option("--ground-truth", cfg.ground_truth_path)->required();
  label->add_option("--out", cfg.out_path)->required();

  auto* part = app.add_subcommand("partition", "Clip to the grid and split into per-cell datasets");
  part->add_option("--in", cfg.in_path)->required();
  part->add_option("--out", cfg.out_path, "Output directory")->required();

  auto* learn = app.add_subcommand("learn", "Learn per-cell CBTs by maximum likelihood");
  learn->add_option("--cells", cfg.cells_path, "Partition directory")->required();
  learn->add_option("--alpha", cfg.alpha, "Smoothing pseudo-count")->capture_default_str();
  learn->add_option("--out", cfg.out_path)->required();

  auto* query = app.add_subcommand("query", "Posterior probability in one or all cells");
  query->add_option("--model", cfg.model_path)->required();
  query->add_option("--cell", cfg.cell, "COL,ROW");
  query->add_flag("--all-cells", cfg.all_cells);
  query->add_option("--target", cfg.target, "Variable=state")->required();
  query->add_option("--evidence", cfg.evidence, "Variable=state,...");

  auto* map = app.add_subcommand("map", "Build a PLM, CPLM or causal map layer");
  map->add_option("--model", cfg.model_path)->required();
  map->add_option("--kind", cfg.kind, "plm, cplm or causal")->capture_default_str();
  map->add_option("--target", cfg.target, "Variable=state (the cause for causal maps)")->required();
  map->add_option("--evidence", cfg.evidence, "Variable=state,...");
  map->add_option("--csv", cfg.csv_path);
  map->add_option("--image", cfg.image_path, "PPM heatmap");
  map->add_option("--scale", cfg.scale, "Pixels per cell")->capture_default_str();

  auto* split_cmd = app.add_subcommand("split", "Train/test split of a labeled dataset");
  split_cmd->add_option("--in", cfg.in_path)->required();
  split_cmd->add_option("--ratio", cfg.ratio)->capture_default_str();
  split_cmd->add_option("--policy", cfg.policy, "by_frame (default) or random");
  split_cmd->add_option("--train", cfg.train_out)->required();
  split_cmd->add_option("--test", cfg.test_out)->required();

  auto* eval = app.add_subcommand("eval", "Outcome prediction accuracy per evidence node");
  eval->add_option("--model", cfg.model_path)->required();
  eval->add_option("--test", cfg.test_path)->required();
  eval->add_option("--evidence", cfg.evidence, "Comma-separated evidence nodes");
  eval->add_option("--out", cfg.out_path, "Report CSV");

  auto* diag = app.add_subcommand("diagnose", "Report sparse cells, configurations and rare states");
  diag->add_option("--model", cfg.model_path)->required();
  diag->add_option("--floor", cfg.floor, "Minimum M[u]")->capture_default_str();
  diag->add_option("--rare", cfg.rare, "Rare-state frequency threshold")->capture_default_str();
  diag->add_option("--out", cfg.out_path);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  cfg.subcommand = app.get_subcommands().front()->get_name();
  if (cfg.verbose) err << cfg.to_json() << '\n';

  try {
    const auto& s = cfg.subcommand;
    if (s == "generate") cmd_generate(cfg, out, err);
    else if (s == "label") cmd_label(cfg, out, err);
    else if (s == "partition") cmd_partition(cfg, out, err);
    else if (s == "learn") cmd_learn(cfg, out, err);
    else if (s == "query") cmd_query(cfg, out, err);
    else if (s == "map") cmd_map(cfg, out, err);
    else if (s == "split") cmd_split(cfg, out, err);
    else if (s == "eval") cmd_eval(cfg, out, err);
    else if (s == "diagnose") cmd_diagnose(cfg, out, err);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitOk;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  return run(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace plm::cli
