#pragma once

#include <cstdint>
#include <random>

namespace renyi {

/// Seeded pseudo-random stream. Substreams are derived by hashing
/// (seed, path of indices), so parallel workers that ask for
/// substream(chunk) obtain decorrelated, reproducible sequences that do not
/// depend on scheduling. Normal and Gamma variates are generated here rather
/// than through <random> distributions, whose algorithms are
/// implementation-defined; the byte stream is therefore identical across
/// standard libraries.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t key() const noexcept { return key_; }

  /// Independent child stream; the same index always gives the same child.
  RandomStream substream(std::uint64_t index) const;

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on the open interval (0, 1), 53 random bits.
  double uniform();
  /// Standard normal (Marsaglia polar method).
  double normal();
  /// Gamma(shape, scale 1) (Marsaglia-Tsang, with the U^{1/a} boost for a < 1).
  double gamma(double shape);

 private:
  RandomStream(std::uint64_t seed, std::uint64_t key, bool);

  std::uint64_t seed_;
  std::uint64_t key_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// SplitMix64 finalizer, used for stream derivation.
std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace renyi
