#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace plm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

/// Every parameter of one invocation. Paths are recorded but do not enter
/// the config hash, so rerunning into another directory stamps identical
/// artifacts.
struct RunConfig {
  std::string subcommand;
  std::string schema_path;
  std::string structure_path;
  std::string grid;
  std::optional<std::uint64_t> seed;
  bool verbose = false;

  double tau = 1.0;
  double alpha = 0.0;
  std::string outcome;
  std::string policy;
  std::string kind = "plm";
  std::string target;
  std::string evidence;
  std::string cell;
  bool all_cells = false;
  std::optional<std::size_t> frames;
  std::optional<std::size_t> objects;
  double ratio = 0.8;
  std::uint64_t floor = 30;
  double rare = 0.01;
  int scale = 16;

  std::string spec_path;
  std::string in_path;
  std::string out_path;
  std::string detections_path;
  std::string ground_truth_path;
  std::string cells_path;
  std::string model_path;
  std::string test_path;
  std::string train_out;
  std::string test_out;
  std::string csv_path;
  std::string image_path;

  /// JSON of the full config, paths included.
  std::string to_json() const;
  /// Hex FNV-1a over the subcommand and its non-path parameters.
  std::string hash() const;
};

/// Entry point of the `plm` tool. Returns 0 on success, 1 on a validation
/// failure (bad arguments, schema, structure or file contents) and 2 on an
/// I/O failure.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace plm::cli
