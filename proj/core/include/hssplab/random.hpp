#pragma once

// Deterministic, platform-independent random source. std::mt19937_64 has a
// fully specified output sequence; the standard distributions do not, so the
// sampling helpers below are written out by hand.

#include <algorithm>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "hssplab/exactmath.hpp"

namespace hssplab {

// SplitMix64 finaliser; used to derive independent sub-seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix64(seed ^ mix64(stream + 0x632BE59BD9B4E019ULL));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  std::uint64_t next() { return engine_(); }
  bool bit() {
    if (bits_left_ == 0) {
      bit_pool_ = engine_();
      bits_left_ = 64;
    }
    --bits_left_;
    bool b = bit_pool_ & 1U;
    bit_pool_ >>= 1;
    return b;
  }

  // Uniform in [0, bound), bound > 0 (rejection sampling, no modulo bias).
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    for (;;) {
      std::uint64_t v = engine_();
      if (v < limit) return v % bound;
    }
  }

  // Uniform nonnegative integer with `bits` random bits.
  Int random_bits(std::size_t bits) {
    Int out = 0;
    std::size_t done = 0;
    while (done < bits) {
      std::size_t take = std::min<std::size_t>(64, bits - done);
      std::uint64_t w = engine_();
      if (take < 64) w &= (std::uint64_t{1} << take) - 1;
      Int part;
      mpz_import(part.get_mpz_t(), 1, 1, sizeof(w), 0, 0, &w);
      mpz_mul_2exp(part.get_mpz_t(), part.get_mpz_t(), done);
      out += part;
      done += take;
    }
    return out;
  }

  // Uniform in [0, bound), bound > 0.
  Int below(const Int& bound) {
    const std::size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2);
    for (;;) {
      Int v = random_bits(bits);
      if (v < bound) return v;
    }
  }

  // `count` distinct indices drawn uniformly from [0, n), in draw order.
  std::vector<std::size_t> sample_without_replacement(std::size_t n,
                                                      std::size_t count) {
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = i;
    for (std::size_t i = 0; i < count; ++i) {
      std::size_t j = i + static_cast<std::size_t>(below(n - i));
      std::swap(pool[i], pool[j]);
    }
    pool.resize(count);
    return pool;
  }

 private:
  std::mt19937_64 engine_;
  std::uint64_t bit_pool_ = 0;
  int bits_left_ = 0;
};

}  // namespace hssplab
