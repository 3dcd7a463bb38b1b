#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace cad {

/// Seeded generator with platform-independent derived draws.
///
/// std::uniform_*_distribution and std::shuffle are implementation-defined,
/// so every draw used by trainers and samplers goes through this class to
/// keep seeded runs byte-identical across standard libraries.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform01();

  /// Uniform integer in [0, bound). bound must be > 0.
  std::size_t uniform_index(std::size_t bound);

  /// Fisher-Yates over the whole range.
  template <typename T> void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = uniform_index(i);
      std::swap(v[i - 1], v[j]);
    }
  }

  /// k distinct indices from [0, n), returned ascending.
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

private:
  std::mt19937_64 engine_;
};

/// splitmix64 mix of (seed, stream); used to give trees, members and grid
/// cells independent seeds that do not depend on execution order.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

} // namespace cad
