#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

// Seeded randomness with results that are identical on every platform: the
// mt19937_64 stream is pinned by the standard, and uniform/normal variates
// are derived from raw engine words here instead of std::*_distribution
// (whose algorithms are implementation-defined).
namespace starcoex {

// splitmix64; used to fan a master seed out into independent stream seeds.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // [0, 1)
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // N(0, 1), Box-Muller with pair caching
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // CN(0, 1): unit total variance
  std::complex<double> cnormal() {
    const double re = normal();
    const double im = normal();
    return {re * 0.7071067811865476, im * 0.7071067811865476};
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace starcoex
