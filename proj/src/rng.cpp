#include "covproj/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace covproj {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

}  // namespace

RngStream::RngStream(std::uint64_t seed) : key_(mix64(seed + kGolden)), state_(key_) {}

RngStream RngStream::derive(std::uint64_t index) const {
  RngStream child(0);
  child.key_ = mix64(key_ ^ (kGolden * (2 * index + 1)));
  child.state_ = child.key_;
  return child;
}

std::uint64_t RngStream::next_u64() {
  state_ += kGolden;
  return mix64(state_);
}

double RngStream::next_unit() {
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double RngStream::next_normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  const double u1 = next_unit();
  const double u2 = next_unit();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * std::numbers::pi * u2;
  cached_normal_ = r * std::sin(t);
  has_cached_normal_ = true;
  return r * std::cos(t);
}

std::complex<double> RngStream::next_circular() {
  const double u1 = next_unit();
  const double u2 = next_unit();
  const double r = std::sqrt(-std::log(u1));  // -2 log(u) scaled by 1/2 variance split
  const double t = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(t), r * std::sin(t)};
}

double RngStream::next_gamma(double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0)) {
    throw std::invalid_argument("next_gamma: shape and scale must be positive");
  }
  if (shape < 1.0) {
    // Boost to shape+1 and correct with a uniform power.
    const double g = next_gamma(shape + 1.0, 1.0);
    return scale * g * std::pow(next_unit(), 1.0 / shape);
  }
  // Marsaglia-Tsang squeeze.
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = next_normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = next_unit();
    if (u < 1.0 - 0.0331 * x * x * x * x) return scale * d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return scale * d * v;
  }
}

}  // namespace covproj
