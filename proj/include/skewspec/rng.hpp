#pragma once

#include <cstdint>
#include <initializer_list>

namespace skewspec {

// splitmix64 step; also used as the mixing function for substream keys.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Deterministic counter-based generator. Substreams are derived by hashing
// (seed, key...) so parallel workers never share state and results do not
// depend on scheduling or thread count.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) { (void)splitmix64(state_); }

  Rng(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) : state_(seed) {
    for (std::uint64_t k : keys) {
      state_ ^= splitmix64(state_) + k;
      (void)splitmix64(state_);
    }
  }

  Rng substream(std::uint64_t key) const {
    Rng r(*this);
    r.state_ ^= splitmix64(r.state_) + key;
    (void)splitmix64(r.state_);
    return r;
  }

  std::uint64_t next_u64() { return splitmix64(state_); }

  // Uniform in [0,1), 53 random bits, identical on every platform.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  std::uint64_t uniform_index(std::uint64_t n) { return next_u64() % n; }

 private:
  std::uint64_t state_;
};

}  // namespace skewspec
