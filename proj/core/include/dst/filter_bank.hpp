#pragma once

#include <array>
#include <vector>

namespace dst {

/// Bands of the dyadic bank: the residual high-pass H00, three band-passes
/// and the final low-pass.
enum class Band { H00 = 0, B1 = 1, B2 = 2, B3 = 3, L4 = 4 };

inline constexpr int kBandCount = 5;

/// Amplitude responses at radial frequency f (cycles/sample).
struct FilterResponses {
  double h00 = 0.0;
  double b1 = 0.0;
  double b2 = 0.0;
  double b3 = 0.0;
  double l4 = 0.0;

  [[nodiscard]] double get(Band b) const;
  /// h00^2 + b1^2 + b2^2 + b3^2 + l4^2, which equals 1 for any f.
  [[nodiscard]] double energy() const;
};

[[nodiscard]] FilterResponses filter_responses(double f);

/// Radial frequency of DFT bin (x, y) on a width x height grid, with both
/// axis frequencies folded into [-0.5, 0.5).
[[nodiscard]] double radial_frequency(int x, int y, int width, int height);

/// The bank sampled on the non-redundant half of a DFT grid
/// (height rows of width / 2 + 1 bins).
class FilterBank {
 public:
  FilterBank(int width, int height);

  [[nodiscard]] int width() const noexcept { return width_; }
  [[nodiscard]] int height() const noexcept { return height_; }
  [[nodiscard]] int half_width() const noexcept { return width_ / 2 + 1; }
  [[nodiscard]] std::size_t bins() const noexcept { return radius_.size(); }

  /// Amplitude response of `band` at half-grid bin i.
  [[nodiscard]] double response(Band band, std::size_t i) const {
    return resp_[static_cast<std::size_t>(band)][i];
  }
  [[nodiscard]] double radius(std::size_t i) const { return radius_[i]; }
  /// Number of full-grid bins folded into half-grid bin i.
  [[nodiscard]] double multiplicity(std::size_t i) const { return mult_[i]; }

  /// Response of `band` over the full width x height grid, row-major, in
  /// unshifted DFT order.
  [[nodiscard]] std::vector<double> full_response(Band band) const;

 private:
  int width_;
  int height_;
  std::array<std::vector<double>, kBandCount> resp_;
  std::vector<double> radius_;
  std::vector<double> mult_;
};

}  // namespace dst
