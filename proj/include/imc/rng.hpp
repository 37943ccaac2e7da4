#pragma once
#include <cmath>
#include <cstdint>

namespace imc {

// splitmix64: the documented prng behind every randomized routine here.
// chosen because the stream is a pure function of (seed, counter), so any
// element is addressable in O(1) and replays are byte-identical everywhere.
struct SplitMix64 {
  uint64_t state;

  explicit SplitMix64(uint64_t seed) : state(seed) {}

  static uint64_t mix(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  uint64_t next() {
    state += 0x9e3779b97f4a7c15ULL;
    return mix(state);
  }

  // element i of the stream started at `seed`, without advancing any state
  static uint64_t at(uint64_t seed, uint64_t i) {
    return mix(seed + (i + 1) * 0x9e3779b97f4a7c15ULL);
  }

  double uniform01() {  // [0,1), 53-bit resolution
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  int below(int n) {  // n small (< 2^31); modulo bias is irrelevant at our n
    return static_cast<int>(next() % static_cast<uint64_t>(n));
  }

  double normal() {
    double u1 = uniform01();
    while (u1 <= 1e-300) u1 = uniform01();
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  double exponential() {
    double u = uniform01();
    while (u <= 1e-300) u = uniform01();
    return -std::log(u);
  }
};

}  // namespace imc
