#pragma once

// Thin RAII layer over FFTW's 2D real transforms. Spectra use FFTW's r2c
// layout: height rows of (width / 2 + 1) complex bins.

#include <complex>
#include <span>
#include <vector>

namespace dst::detail {

using Spectrum = std::vector<std::complex<double>>;

[[nodiscard]] inline int half_width(int width) { return width / 2 + 1; }

/// Unnormalized forward transform of a width x height row-major image.
[[nodiscard]] Spectrum forward_fft(std::span<const double> image, int width, int height);

/// Inverse transform including the 1/N factor, so inverse(forward(x)) = x.
[[nodiscard]] std::vector<double> inverse_fft(const Spectrum& spectrum, int width, int height);

/// Number of full-grid bins represented by half-grid column x (1 or 2).
[[nodiscard]] inline double hermitian_multiplicity(int x, int width) {
  return (x == 0 || (width % 2 == 0 && x == width / 2)) ? 1.0 : 2.0;
}

}  // namespace dst::detail
