#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "dst/imgio.hpp"
#include "dst/lut.hpp"
#include "dst/pipeline.hpp"

namespace dst::app {

/// Title written into every .cube, so that CLI and service files compare equal.
inline constexpr const char* kCubeTitle = "dst look";

/// "x,y,w,h" -> CropRect. Throws InvalidArgument on anything else.
[[nodiscard]] CropRect parse_crop(std::string_view text);

/// .cube text for a recipe, as written by both `transfer --emit-lut` and /api/lut.
[[nodiscard]] std::string cube_for_recipe(const TransferRecipe& recipe, int size = kDefaultLutSize);

/// 16-bit PNG, the output encoding shared by CLI and service.
[[nodiscard]] Bytes encode_png(const RgbImage& img);

}  // namespace dst::app
