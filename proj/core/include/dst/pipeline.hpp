#pragma once

#include <array>
#include <optional>

#include "dst/color.hpp"
#include "dst/image.hpp"
#include "dst/moments.hpp"
#include "dst/spectral.hpp"

namespace dst {

/// What happens to out-of-range values after encoding.
enum class ClampPolicy { Preserve, Clamp };

inline constexpr std::array<const char*, 3> kOpponentChannelNames{"I", "P", "T"};

struct TransferConfig {
  /// Number of moments transferred per opponent channel (prefix {1..k}).
  std::array<int, 3> orders{4, 2, 2};
  std::optional<CropRect> src_crop;
  std::optional<CropRect> tgt_crop;
  bool spectral = false;
  ClampPolicy clamp = ClampPolicy::Preserve;
  NegativePolicy negatives = NegativePolicy::Signed;
  double perturbation = 0.0;

  friend bool operator==(const TransferConfig&, const TransferConfig&) = default;
};

/// Everything needed to replay a transfer on any frame without recomputing
/// statistics.
struct TransferRecipe {
  Rgb illuminant_scale{1.0, 1.0, 1.0};
  Illuminant source_illuminant;
  Illuminant target_illuminant;
  std::array<MomentRecipe, 3> channels;
  std::optional<EquivalentKernel> kernel;
  OpponentSpace space = ipt_space();
  double gamma = kGamma;
  ClampPolicy clamp = ClampPolicy::Preserve;
  NegativePolicy negatives = NegativePolicy::Signed;

  /// True when replay is the identity (unit scale, empty maps, no kernel).
  [[nodiscard]] bool is_identity() const;
  /// Throws RecipeIncomplete when a frozen scalar is missing or not finite.
  void validate() const;
};

[[nodiscard]] TransferRecipe identity_recipe();

struct StyleTransfer {
  RgbImage image;
  TransferRecipe recipe;
};

/// decode -> gray world -> [kernel] -> opponent -> per-channel moment transfer
/// -> inverse opponent -> encode. Statistics come from the crops when set;
/// the resulting maps are applied to the whole source.
[[nodiscard]] StyleTransfer transfer_style(const RgbImage& src, const RgbImage& tgt, const TransferConfig& cfg = {});

/// Replays a recipe on a gamma-encoded image. The kernel, when present, is
/// applied only if `with_kernel` is set.
[[nodiscard]] RgbImage apply_recipe(const RgbImage& img, const TransferRecipe& recipe, bool with_kernel = true);

struct OpticsTransfer {
  RgbImage image;
  EquivalentKernel kernel;
};

/// Applies to src the linear kernel that maps the luminance of t_diffused
/// onto the band MSVs of t_reference (both cropped by diff_crop when set).
[[nodiscard]] OpticsTransfer transfer_optics(const RgbImage& src, const RgbImage& t_reference,
                                             const RgbImage& t_diffused,
                                             const std::optional<CropRect>& diff_crop = std::nullopt);

}  // namespace dst
