#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace timeset {

// Deterministic RNG used for demonstration sampling and tie-breaking.
// std::shuffle / std::uniform_int_distribution are implementation-defined,
// so bounded draws are done here with explicit rejection sampling to keep
// results identical across platforms and standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform draw in [0, n). n must be > 0.
  std::size_t below(std::size_t n);

  template <typename T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::swap(values[i - 1], values[below(i)]);
    }
  }

  // k distinct indices from [0, n), in draw order.
  std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k);

 private:
  std::mt19937_64 engine_;
};

// FNV-1a over bytes; stable across platforms. Used for cache keys, manifest
// content hashes, and deriving per-item RNG streams.
std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t fnv1a64_mix(std::uint64_t seed, std::string_view bytes);
std::string to_hex(std::uint64_t value);

}  // namespace timeset
