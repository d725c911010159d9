#pragma once

#include <array>

#include "dst/image.hpp"

namespace dst {

using Mat3 = std::array<std::array<double, 3>, 3>;
using Rgb = std::array<double, 3>;

inline constexpr double kGamma = 2.2;

/// How the power laws treat negative input. Signed maps v to sign(v)|v|^p,
/// which keeps out-of-range transfer results invertible; Reject raises
/// NegativeInput instead.
enum class NegativePolicy { Signed, Reject };

[[nodiscard]] double gamma_decode(double v, NegativePolicy policy = NegativePolicy::Signed);
[[nodiscard]] double gamma_encode(double v, NegativePolicy policy = NegativePolicy::Signed);
/// Expects Encoding::Gamma; the result is tagged Linear.
[[nodiscard]] RgbImage gamma_decode(const RgbImage& img, NegativePolicy policy = NegativePolicy::Signed);
/// Expects Encoding::Linear; the result is tagged Gamma.
[[nodiscard]] RgbImage gamma_encode(const RgbImage& img, NegativePolicy policy = NegativePolicy::Signed);

/// Per-channel mean of a linear image.
struct Illuminant {
  Rgb rgb{1.0, 1.0, 1.0};
};

inline constexpr double kBlackLevel = 1e-9;

/// Throws BlackImage if a channel mean is below kBlackLevel.
[[nodiscard]] Illuminant measure_illuminant(const ImageView& linear);

struct GrayWorld {
  RgbImage image;
  Illuminant source;
  Illuminant target;
  Rgb scale{1.0, 1.0, 1.0};
};

/// Scales each channel of src by L_T / L_S (Gray World).
[[nodiscard]] GrayWorld gray_world_scale(const RgbImage& src, const RgbImage& tgt);
[[nodiscard]] RgbImage scale_channels(const RgbImage& img, const Rgb& scale);

/// Linear RGB -> LMS -> signed power -> opponent (I, P, T), with the inverse
/// matrices precomputed.
struct OpponentSpace {
  Mat3 rgb_to_lms{};
  Mat3 lms_to_ipt{};
  Mat3 lms_to_rgb{};
  Mat3 ipt_to_lms{};
  double exponent = 0.43;
};

/// IPT (Ebner & Fairchild): sRGB primaries to XYZ (D65), Hunt-Pointer-Estevez
/// LMS with rows rescaled so that RGB white maps to LMS (1, 1, 1), 0.43 power.
[[nodiscard]] const OpponentSpace& ipt_space();

[[nodiscard]] Mat3 invert(const Mat3& m);
[[nodiscard]] Rgb multiply(const Mat3& m, const Rgb& v);

[[nodiscard]] Rgb rgb_to_opponent(const Rgb& rgb, const OpponentSpace& space = ipt_space());
[[nodiscard]] Rgb opponent_to_rgb(const Rgb& ipt, const OpponentSpace& space = ipt_space());
/// Expects Encoding::Linear; the result is tagged Opponent.
[[nodiscard]] RgbImage rgb_to_opponent(const RgbImage& img, const OpponentSpace& space = ipt_space());
/// Expects Encoding::Opponent; the result is tagged Linear.
[[nodiscard]] RgbImage opponent_to_rgb(const RgbImage& img, const OpponentSpace& space = ipt_space());

/// Rec. 709 luminance of a linear image.
[[nodiscard]] Plane luminance(const RgbImage& linear);

}  // namespace dst
