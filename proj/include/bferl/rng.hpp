#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "bferl/crypto.hpp"

namespace bferl {

/// Seeded generator with a fully specified output sequence. std::mt19937_64
/// output is fixed by the standard; the distributions are not, so bounded
/// draws are done here by rejection.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Seed derived from a run seed, a label and an index.
  static Rng derive(std::uint64_t run_seed, std::string_view label, std::uint64_t index) {
    Seed s = derive_seed(run_seed, label, index);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = v << 8 | s.bytes[i];
    return Rng(v);
  }

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  Bytes bytes(std::size_t n) {
    Bytes out(n);
    for (std::size_t i = 0; i < n; i += 8) {
      std::uint64_t v = engine_();
      for (std::size_t j = 0; j < 8 && i + j < n; ++j) out[i + j] = static_cast<std::uint8_t>(v >> (8 * j));
    }
    return out;
  }

  Digest digest() {
    Digest d;
    Bytes b = bytes(Digest::size);
    std::copy(b.begin(), b.end(), d.bytes.begin());
    return d;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace bferl
