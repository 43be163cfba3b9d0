#include "fixtures.hpp"

#include <fstream>
#include <random>
#include <sstream>

namespace plm::testing {

namespace fs = std::filesystem;

TempDir::TempDir(const std::string& tag) {
  std::random_device rd;
  path_ = fs::temp_directory_path() / ("plm_" + tag + "_" + std::to_string(rd()));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

Network chain_network() {
  SceneSchema s{{{"A", {"0", "1"}, VariableRole::factor}, {"B", {"no", "yes"}, VariableRole::outcome}}};
  return Network::compile(s, structure_over(s, {{"A", "B"}}));
}

CellModel chain_model() {
  auto net = chain_network();
  CellModel m;
  Cbt a{"A", {}, 2, {0, 0}, {0.5, 0.5}, {true}};
  Cbt b{"B", {"A"}, 2, {0, 0, 0, 0}, {0.8, 0.2, 0.2, 0.8}, {true, true}};
  m.cbts = {a, b};
  return m;
}

GeneratorSpec uniform_generator(std::size_t frames, std::size_t objects, std::uint64_t seed) {
  GeneratorSpec spec;
  spec.network = Network::compile(default_schema(), default_structure());
  for (std::size_t v = 0; v < spec.network.size(); ++v) {
    const auto card = spec.network.cardinality(v);
    spec.cbts.emplace_back(spec.network.parent_configurations(v) * card, 1.0 / static_cast<double>(card));
  }
  spec.frames = frames;
  spec.objects_per_frame = objects;
  spec.seed = seed;
  return spec;
}

LearnedModel single_cell_model(const Network& network, const std::vector<DataInstance>& data,
                               double alpha) {
  LearnedModel m;
  m.grid = GridSpec(280.0, 100.0, -140.0, 140.0, -50.0, 50.0);
  m.network = network;
  m.alpha = alpha;
  m.cells = {learn_cell(data, network, {0, 0}, alpha)};
  return m;
}

}  // namespace plm::testing
