#include "envsim/rng.hpp"

namespace digirr::envsim {
namespace {

// FNV-1a, 64 bit.
std::uint64_t name_hash(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

Engine RngStreams::make(std::uint64_t seed, std::string_view name) {
  const std::uint64_t h = name_hash(name);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
  return Engine(seq);
}

Engine& RngStreams::stream(std::string_view name) {
  auto it = streams_.find(name);
  if (it == streams_.end()) it = streams_.emplace(std::string(name), make(seed_, name)).first;
  return it->second;
}

}  // namespace digirr::envsim
