#pragma once

#include <cmath>
#include <cstdint>

#include <Eigen/Dense>

namespace oscillon {

/// Counter-based generator: draw i of stream s under seed k is
///
///   x = k + 0x9E3779B97F4A7C15 * (s * 2^32 + i + 1)   (mod 2^64)
///   z = splitmix64_finalize(x)
///
/// where splitmix64_finalize is the SplitMix64 output mix
///   z = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   z =  z ^ (z >> 31).
/// Uniforms are (z >> 11) * 2^-53 shifted by half an ulp into (0, 1).
/// Normals use Box-Muller on uniforms 2j and 2j+1 (cosine branch only).
/// Every draw is a pure function of (seed, stream, counter), so any
/// implementation reproduces the same ensembles.
class CounterRng {
public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

  static std::uint64_t mix(std::uint64_t x) {
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

  std::uint64_t bits(std::uint64_t counter) const {
    return mix(seed_ + 0x9E3779B97F4A7C15ULL * ((stream_ << 32) + counter + 1));
  }

  double uniform(std::uint64_t counter) const {
    return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal(std::uint64_t index) const {
    const double u1 = uniform(2 * index);
    const double u2 = uniform(2 * index + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  /// Sequential normals; shares the counter space of normal(index).
  double next_normal() { return normal(cursor_++); }

  /// n sequential normals.
  Eigen::VectorXd next_normals(Eigen::Index n) {
    Eigen::VectorXd x(n);
    for (Eigen::Index i = 0; i < n; ++i) x[i] = next_normal();
    return x;
  }

  /// Sequential uniform on (0, 1), drawn from the normal counter space so the
  /// two never overlap: uses the first uniform of pair `cursor_`.
  double next_uniform() { return uniform(2 * cursor_++); }

private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t cursor_ = 0;
};

} // namespace oscillon
