#pragma once

#include <complex>
#include <span>

namespace chirpsep::fft {

// Unnormalized complex-to-complex transform. forward uses the e^{-i...}
// convention, backward e^{+i...}. in and out must have the same size and
// must not alias. Plans are cached per (size, direction) and execution is
// thread-safe on distinct buffers.
void transform(std::span<const std::complex<double>> in, std::span<std::complex<double>> out,
               bool forward);

inline void backward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) {
  transform(in, out, false);
}

}  // namespace chirpsep::fft
