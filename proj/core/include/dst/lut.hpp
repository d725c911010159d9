#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dst/color.hpp"
#include "dst/image.hpp"

namespace dst {

struct TransferRecipe;

inline constexpr int kDefaultLutSize = 33;

/// size^3 RGB entries over the domain [0,1]^3, R varying fastest, then G, then B.
struct Lut3D {
  int size = 0;
  std::vector<double> data;  // interleaved RGB

  [[nodiscard]] static Lut3D identity(int size);

  [[nodiscard]] std::size_t index(int r, int g, int b) const noexcept {
    return 3 * (static_cast<std::size_t>(r) +
                static_cast<std::size_t>(size) * (static_cast<std::size_t>(g) + static_cast<std::size_t>(size) * b));
  }
  [[nodiscard]] Rgb at(int r, int g, int b) const {
    const std::size_t i = index(r, g, b);
    return {data[i], data[i + 1], data[i + 2]};
  }
  /// Trilinear lookup; inputs outside [0,1] clamp to the lattice hull.
  [[nodiscard]] Rgb sample(const Rgb& rgb) const;
};

/// Carries every lattice node, read as a gamma-encoded color, through the
/// point-wise part of the recipe. The spatial kernel is never baked.
[[nodiscard]] Lut3D bake_lut(const TransferRecipe& recipe, int size = kDefaultLutSize);

/// Trilinear application to a gamma-encoded image. threads = 0 uses every
/// hardware thread.
[[nodiscard]] RgbImage apply_lut(const RgbImage& img, const Lut3D& lut, unsigned threads = 0);
/// Same, writing into `out` (reallocated only when its size differs), so a
/// video loop can reuse one frame buffer.
void apply_lut(const RgbImage& img, const Lut3D& lut, RgbImage& out, unsigned threads = 0);

struct CubeFile {
  std::string title;
  Lut3D lut;
  Rgb domain_min{0.0, 0.0, 0.0};
  Rgb domain_max{1.0, 1.0, 1.0};
};

/// Adobe .cube text. Entries are clamped to [0,1] and printed with six
/// decimals; `clamped`, when given, receives the number of clamped values.
[[nodiscard]] std::string write_cube(const Lut3D& lut, const std::string& title = {},
                                     std::size_t* clamped = nullptr);

/// Tolerates comments and blank lines; accepts DOMAIN_MIN/MAX. Throws
/// ParseError (with the line number) or SizeMismatch.
[[nodiscard]] CubeFile read_cube(std::string_view text);

}  // namespace dst
