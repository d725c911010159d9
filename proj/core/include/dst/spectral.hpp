#pragma once

#include <array>
#include <string>
#include <vector>

#include "dst/filter_bank.hpp"
#include "dst/image.hpp"

namespace dst {

/// Reference spectral features: mean 0, unit MSV, and the band MSVs of unit
/// variance white noise.
struct SpectralReference {
  std::array<double, 6> v{};

  /// Values integrated over the continuous frequency disc.
  [[nodiscard]] static SpectralReference continuous();
  /// Expected band MSVs of unit-variance white noise on the bank's grid
  /// (DC excluded): sum of squared responses over the non-DC bins / (N - 1).
  [[nodiscard]] static SpectralReference for_grid(const FilterBank& bank);
};

/// f1 mean, f2 MSV, f3..f5 band-pass MSVs (B1..B3), f6 low-pass MSV (L4).
///
/// Raw features (spectral_features) carry the mean square of the image in
/// f2 and the band MSVs of the mean-subtracted image in f3..f6. Decoupled
/// features carry the variance in f2 and the band MSVs measured along the
/// nested normalization in f3..f6.
struct SpectralFeatures {
  std::array<double, 6> f{};
  /// MSV of the mean-subtracted image above the first band (raw only).
  double msv_h00 = 0.0;
  /// Fitted exponents of the full normalization (decoupled only).
  std::array<double, 4> t{};
  bool decoupled = false;

  /// 1-based accessor matching the feature numbering.
  [[nodiscard]] double get(int j) const { return f[static_cast<std::size_t>(j - 1)]; }
};

/// Raw features, band filtering done by DFT multiplication.
/// Throws DimensionMismatch if the plane and bank sizes differ.
[[nodiscard]] SpectralFeatures spectral_features(const Plane& lum, const FilterBank& bank);

/// Decoupled features: f3 is the B1 MSV of the mean/variance normalized image,
/// f4 the B2 MSV once B1 is driven to its reference, and so on.
/// Throws DegenerateSample for a constant image, FitDivergence if a fit fails.
[[nodiscard]] SpectralFeatures decoupled_spectral_features(const Plane& lum, const FilterBank& bank,
                                                           const SpectralReference& ref);

struct SpectralNormalization {
  Plane image;
  SpectralFeatures features;  // decoupled, with t filled
  std::array<double, 4> t{};
};

/// Drives the image to the reference: zero mean, unit MSV, band MSVs equal
/// to ref.v[2..5]. The returned t are the exponents applied to the squared
/// band responses.
[[nodiscard]] SpectralNormalization spectral_normalize(const Plane& lum, const FilterBank& bank,
                                                       const SpectralReference& ref);

/// Multiplies the spectrum by exp(sum_j t_j |H_j|^2) for j over B1..L4
/// without any renormalization.
[[nodiscard]] Plane spectral_flow(const Plane& lum, const FilterBank& bank, const std::array<double, 4>& t);

struct SpatialKernel {
  int size = 1;  // odd side length
  std::vector<double> taps;
  double retained_energy = 1.0;

  [[nodiscard]] double at(int x, int y) const {
    return taps[static_cast<std::size_t>(y) * static_cast<std::size_t>(size) + static_cast<std::size_t>(x)];
  }
};

inline constexpr int kMaxKernelSize = 63;
inline constexpr double kKernelEnergyFraction = 1.0 - 1e-4;

/// A zero-phase linear filter whose response is
///   H(f) = ac_gain * exp(sum_j exponents[j] * |H_j(f)|^2)   for f > 0,
///   H(0) = dc_gain.
/// Being parametric it can be re-evaluated on any grid.
struct EquivalentKernel {
  std::array<double, 4> exponents{};
  double ac_gain = 1.0;
  double dc_gain = 1.0;

  [[nodiscard]] double response(double f) const;
  /// Full width x height grid, unshifted DFT order.
  [[nodiscard]] std::vector<double> frequency_response(int width, int height) const;
  /// Centered spatial taps from the inverse DFT on a width x height grid,
  /// cropped to the smallest odd square keeping kKernelEnergyFraction of the
  /// energy (at most kMaxKernelSize).
  [[nodiscard]] SpatialKernel spatial(int width, int height) const;
  [[nodiscard]] bool is_identity(double tol = 1e-12) const;
};

struct SpectralTransfer {
  Plane image;
  EquivalentKernel kernel;
};

/// Imposes decoupled target features on src: mean f1, variance f2 and the
/// nested band MSVs f3..f6.
[[nodiscard]] SpectralTransfer spectral_transfer(const Plane& src, const SpectralFeatures& target,
                                                 const FilterBank& bank, const SpectralReference& ref);

/// Kernel K such that diffused ⊛ K has the mean, MSV and band MSVs of
/// reference. With reference = blurred and diffused = sharp, K models the
/// blur; swapped, it models the equalization that undoes it.
[[nodiscard]] EquivalentKernel extract_diffusion_kernel(const Plane& reference, const Plane& diffused);

/// Circular convolution by DFT multiplication.
[[nodiscard]] Plane apply_kernel(const Plane& img, const EquivalentKernel& k);
/// apply_kernel on each of the three channels. Expects linear RGB.
[[nodiscard]] RgbImage apply_kernel_rgb(const RgbImage& img, const EquivalentKernel& k);

/// Plain-text kernel interchange: "width height" then rows of taps.
[[nodiscard]] std::string write_kernel_text(const SpatialKernel& k);
[[nodiscard]] SpatialKernel read_kernel_text(const std::string& text);

}  // namespace dst
