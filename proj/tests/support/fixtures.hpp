#pragma once

#include <filesystem>
#include <string>

#include "plm/learn.hpp"
#include "plm/synthgen.hpp"

namespace plm::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

/// Two-node chain A -> B (A is the outcome-free root, B the outcome with
/// states {no, yes}), Pr(A=1)=0.5, Pr(B=1|A=1)=0.8, Pr(B=1|A=0)=0.2.
Network chain_network();
CellModel chain_model();

/// Default FN network with a generator whose CBTs are all uniform.
GeneratorSpec uniform_generator(std::size_t frames, std::size_t objects, std::uint64_t seed);

/// Model over a 1x1 grid learned from `data`.
LearnedModel single_cell_model(const Network& network, const std::vector<DataInstance>& data,
                               double alpha = 0.0);

}  // namespace plm::testing
