#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace plm {

/// 64-bit FNV-1a. Stable across platforms and runs, used for artifact
/// identifiers (schema hash, model id, config hash).
constexpr std::uint64_t fnv1a64(std::string_view bytes,
                                std::uint64_t seed = 0xcbf29ce484222325ULL) {
  std::uint64_t h = seed;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string to_hex(std::uint64_t value);

}  // namespace plm
