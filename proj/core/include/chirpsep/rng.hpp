#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace chirpsep {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based stream split: the derived seed depends only on the base seed
// and the path values, so adding or reordering sweep cells does not perturb
// the streams of other cells.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = splitmix64(base);
  for (std::uint64_t v : path) {
    s = splitmix64(s ^ splitmix64(v));
  }
  return s;
}

inline std::uint64_t seed_component(double v) { return std::bit_cast<std::uint64_t>(v); }

// Deterministic standard-normal stream (explicit Box-Muller over a splitmix64
// counter; no reliance on library distribution internals).
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : state_(splitmix64(seed ^ 0x5851f42d4c957f2dULL)) {}

  // One complex sample, real and imaginary parts i.i.d. N(0,1).
  std::complex<double> next_complex() {
    const double u1 = next_open_unit();
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(phi), r * std::sin(phi)};
  }

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const auto z = next_complex();
    spare_ = z.imag();
    have_spare_ = true;
    return z.real();
  }

 private:
  double next_unit() {  // [0, 1)
    state_ = splitmix64(state_);
    return static_cast<double>(state_ >> 11) * 0x1.0p-53;
  }
  double next_open_unit() { return 1.0 - next_unit(); }  // (0, 1]

  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace chirpsep
