#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace signalkit {

// One SplitMix64 step; advances state.
std::uint64_t splitmix64(std::uint64_t& state);

// Stream-splitting rule: seed for substream `index` of the stream named `tag`
// under `master`. Streams are independent of the order in which they are drawn.
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag, std::uint64_t index = 0);

// mt19937_64 engine with portable (implementation-independent) draws.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  bool bernoulli(double p) { return uniform() < p; }
  // Uniform integer in [0, n), rejection-sampled.
  std::uint64_t below(std::uint64_t n);
  // k distinct values from [0, n) in sorted order.
  std::vector<std::size_t> sample(std::size_t n, std::size_t k);

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace signalkit
