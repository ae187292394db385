#pragma once

#include <cstdint>
#include <random>

#include "risbeam/types.hpp"

namespace risbeam {

/// Deterministic random stream. Uniform and Gaussian variates are derived
/// from raw mt19937_64 output so that a given seed reproduces the same
/// sequence on every platform and standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Seed mixed with a stream id, for independent substreams.
  Rng(std::uint64_t seed, std::uint64_t stream) : engine_(mix(seed, stream)) {}

  std::uint64_t raw() { return engine_(); }

  /// Uniform on (0, 1), never exactly 0 or 1.
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * kPi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  /// Circular complex normal with unit variance (E|x|^2 = 1).
  cxd cnormal() {
    const double s = 1.0 / std::sqrt(2.0);
    double re = normal();
    double im = normal();
    return {s * re, s * im};
  }

  CVec cnormal_vector(int n) {
    CVec v(n);
    for (int i = 0; i < n; ++i) v(i) = cnormal();
    return v;
  }

  CMat cnormal_matrix(int rows, int cols) {
    CMat m(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) m(r, c) = cnormal();
    return m;
  }

  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    // splitmix64 finalizer over the combined word
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace risbeam
