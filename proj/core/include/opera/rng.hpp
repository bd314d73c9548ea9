#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace opera {

// std::mt19937_64 has a fully specified output stream, but the
// std::*_distribution adapters do not, so all sampling here is done with
// explicit algorithms. Same seed, same platform or not: same bytes out.

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Mix a seed with a stream of tags, for deriving independent child seeds
// (per matching, per edge, per flow, ...).
inline uint64_t mix_seed(uint64_t seed) { return splitmix64(seed); }
template <typename... Rest>
uint64_t mix_seed(uint64_t seed, uint64_t tag, Rest... rest) {
  return mix_seed(splitmix64(seed ^ splitmix64(tag)), rest...);
}

class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t next_u64() { return eng_(); }

  // Unbiased integer in [0, n) via rejection.
  uint64_t below(uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below: n == 0");
    uint64_t lim = UINT64_MAX - UINT64_MAX % n;
    uint64_t x;
    do {
      x = eng_();
    } while (x >= lim);
    return x % n;
  }

  int below_int(int n) { return static_cast<int>(below(static_cast<uint64_t>(n))); }

  // Uniform in [0, 1) with 53 bits.
  double uniform01() { return (eng_() >> 11) * 0x1.0p-53; }

  // Exponential with given rate (events per unit time).
  double exponential(double rate) {
    if (rate <= 0) throw std::invalid_argument("Rng::exponential: rate <= 0");
    double u;
    do {
      u = uniform01();
    } while (u <= 0.0);
    return -std::log(u) / rate;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = below(i);
      std::swap(v[i - 1], v[j]);
    }
  }

  // Seeded random permutation of [0, n).
  std::vector<int> permutation(int n) {
    std::vector<int> p(n);
    for (int i = 0; i < n; ++i) p[i] = i;
    shuffle(p);
    return p;
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace opera
