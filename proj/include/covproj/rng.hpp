#ifndef COVPROJ_RNG_HPP
#define COVPROJ_RNG_HPP

#include <complex>
#include <cstdint>

namespace covproj {

// Counter-based pseudo-random stream (SplitMix64 core).  Every stream is
// identified by a 64-bit key; derive(i) yields an independent child stream,
// so data for trial t / datum i can be generated as
// root.derive(t).derive(i) on any thread, in any order, with bit-identical
// results.  Distribution sampling (Box-Muller, Marsaglia-Tsang) is done
// here rather than with <random> distributions so that seeded regression
// values are stable across standard-library implementations.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  // Independent child stream; depends only on this stream's key, not on
  // how many values have been consumed.
  [[nodiscard]] RngStream derive(std::uint64_t index) const;

  std::uint64_t next_u64();
  // Uniform on (0, 1].
  double next_unit();
  // Standard normal, Box-Muller with one value cached.
  double next_normal();
  // Circularly-symmetric complex normal, unit variance (E|z|^2 = 1).
  std::complex<double> next_circular();
  // Gamma(shape, scale); shape > 0, scale > 0.
  double next_gamma(double shape, double scale);

 private:
  std::uint64_t key_;
  std::uint64_t state_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace covproj

#endif
