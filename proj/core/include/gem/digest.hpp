#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace gem {

// FNV-1a 64-bit. Used for cache keys, snapshot digests, and the stub
// backend's deterministic choices. Not cryptographic; collisions are
// acceptable because cached values are deterministic per key.
constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

constexpr std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = kFnvOffset) {
  std::uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

std::string to_hex(std::uint64_t value);

// Short hex digest of a string (16 hex chars).
std::string hex_digest(std::string_view data);

// SplitMix64: portable deterministic generator for the stub backend.
// std::uniform_int_distribution is implementation-defined, so stub choices
// are derived from this instead to keep outputs byte-identical across
// compilers and platforms.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform-enough choice in [0, n); n must be > 0.
  std::uint64_t pick(std::uint64_t n) { return next() % n; }

 private:
  std::uint64_t state_;
};

}  // namespace gem
