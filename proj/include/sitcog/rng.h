#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>

namespace sitcog {

// Seeded random stream. The engine is std::mt19937_64, whose output sequence is
// fixed by the standard; the distributions are implemented here because the
// <random> distributions are implementation-defined.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer on [0, n). n must be positive.
  std::uint64_t uniform_index(std::uint64_t n);

  // Marsaglia polar method; caches the second variate.
  double normal(double mean, double sd);

  bool bernoulli(double p) { return uniform01() < p; }

  template <class It>
  void shuffle(It first, It last) {
    const auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
      const auto j = uniform_index(i);
      using std::swap;
      swap(first[i - 1], first[j]);
    }
  }

  bool operator==(const RandomStream&) const = default;

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

// Seed of a named substream of a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::string_view stream_name);

inline RandomStream substream(std::uint64_t master, std::string_view stream_name) {
  return RandomStream(derive_seed(master, stream_name));
}

}  // namespace sitcog
