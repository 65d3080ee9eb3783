#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>

namespace noncoh {

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic generator. All distributions are derived from the raw
// mt19937_64 stream with fixed arithmetic, so identical seeds reproduce
// identical draws on any platform; std:: distributions are avoided because
// their outputs are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // uniform on [0, 1) with 53-bit resolution
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // N(0, 1) real gaussian (Box-Muller)
  double gaussian() {
    const double u = 1.0 - uniform();  // (0, 1]
    const double v = uniform();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * M_PI * v);
  }

  // CN(0, 1): real and imaginary parts i.i.d. N(0, 1/2)
  std::complex<double> complex_gaussian() {
    const double u = 1.0 - uniform();
    const double v = uniform();
    const double r = std::sqrt(-std::log(u));
    return {r * std::cos(2.0 * M_PI * v), r * std::sin(2.0 * M_PI * v)};
  }

  // uniform integer on [0, bound), bound >= 1, rejection-debiased
  std::uint64_t integer(std::uint64_t bound) {
    std::uint64_t x, r;
    do {
      x = gen_();
      r = x % bound;
    } while (x - r > std::uint64_t(0) - bound);
    return r;
  }

  // Stable sub-stream seed from a master seed and up to three indices.
  static std::uint64_t derive(std::uint64_t master, std::uint64_t a,
                              std::uint64_t b = 0, std::uint64_t c = 0) {
    return mix64(mix64(mix64(master ^ mix64(a)) ^ mix64(b)) ^ mix64(c));
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace noncoh
