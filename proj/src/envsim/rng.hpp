#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <string_view>

namespace digirr::envsim {

using Engine = std::mt19937_64;

// One scenario seed, one independent engine per named process. A stream's
// sequence depends only on (seed, name), so adding a process never perturbs
// the draws of the existing ones.
class RngStreams {
public:
  explicit RngStreams(std::uint64_t seed) : seed_(seed) {}

  Engine& stream(std::string_view name);
  std::uint64_t seed() const { return seed_; }

  static Engine make(std::uint64_t seed, std::string_view name);

private:
  std::uint64_t seed_;
  std::map<std::string, Engine, std::less<>> streams_;
};

}  // namespace digirr::envsim
