#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>

namespace hlwc {

// Seedable 64-bit Mersenne Twister with a draw counter and a textual state
// that round-trips exactly through checkpoints. Uniform variates are built
// from raw engine output so streams do not depend on the standard library's
// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next() {
    ++draws_;
    return engine_();
  }
  // [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  // Uniform in [0, n), rejection-sampled to avoid modulo bias.
  std::uint64_t index(std::uint64_t n);

  std::uint64_t draws() const { return draws_; }
  std::string state() const;
  void restore(const std::string& state, std::uint64_t draws);

  // Chain k of a multi-chain run is seeded with seed + k * 0x9E3779B97F4A7C15
  // (wrapping). Chain 0 therefore reproduces a single-chain run.
  static std::uint64_t chain_seed(std::uint64_t seed, std::uint64_t chain) {
    return seed + chain * 0x9E3779B97F4A7C15ULL;
  }

  friend bool operator==(const Rng& a, const Rng& b) {
    return a.draws_ == b.draws_ && a.engine_ == b.engine_;
  }

 private:
  std::mt19937_64 engine_;
  std::uint64_t draws_ = 0;
};

// Index drawn proportionally to w (nonnegative, positive sum).
std::size_t sample_discrete(std::span<const double> w, Rng& rng);

// Index drawn proportionally to exp(log_w); the maximum is subtracted first.
std::size_t sample_log_discrete(std::span<const double> log_w, Rng& rng);

}  // namespace hlwc
