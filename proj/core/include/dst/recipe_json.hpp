#pragma once

#include <string>
#include <string_view>

#include "dst/pipeline.hpp"

namespace dst {

inline constexpr int kRecipeSchemaVersion = 1;

/// Versioned JSON ("v": 1). Doubles are written with round-trip precision so
/// that a parsed recipe replays bit for bit.
[[nodiscard]] std::string recipe_to_json(const TransferRecipe& recipe, int indent = -1);

/// Throws ParseError on malformed JSON, a wrong version, unknown fields or
/// wrong types, and RecipeIncomplete when a frozen scalar is missing or null.
[[nodiscard]] TransferRecipe recipe_from_json(std::string_view text);

/// Transfer options as accepted by the service:
///   {"orders_i": 4, "orders_chroma": 2, "src_crop": [x, y, w, h], "tgt_crop": [...],
///    "spectral": false, "clamp": false, "negatives": "signed", "perturbation": 0}
/// Every field is optional; unknown fields raise ParseError.
[[nodiscard]] TransferConfig config_from_json(std::string_view text);
[[nodiscard]] std::string config_to_json(const TransferConfig& cfg);

}  // namespace dst
