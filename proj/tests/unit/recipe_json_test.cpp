#include <gtest/gtest.h>

#include <cmath>
#include <json.hpp>

#include "dst/error.hpp"
#include "dst/recipe_json.hpp"
#include "synthetic.hpp"

namespace {

using namespace dst;
using nlohmann::json;

ErrorKind recipe_error(const std::string& text) {
  try {
    (void)recipe_from_json(text);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::InvalidArgument;
}

TransferRecipe sample_recipe(bool spectral = false) {
  TransferConfig cfg;
  cfg.spectral = spectral;
  return transfer_style(dst::testing::synthetic_photo(30, 64, 64), dst::testing::synthetic_photo(31, 64, 64), cfg).recipe;
}

TEST(RecipeJsonTest, RoundTripReplaysBitForBit) {
  for (bool spectral : {false, true}) {
    const TransferRecipe r = sample_recipe(spectral);
    const std::string text = recipe_to_json(r);
    const TransferRecipe back = recipe_from_json(text);
    EXPECT_EQ(recipe_to_json(back), text);
    const RgbImage img = dst::testing::synthetic_photo(32, 40, 30);
    EXPECT_EQ(apply_recipe(img, back).ch, apply_recipe(img, r).ch);
    EXPECT_EQ(back.kernel.has_value(), spectral);
  }
}

TEST(RecipeJsonTest, SchemaVersionAndStages) {
  const json j = json::parse(recipe_to_json(sample_recipe()));
  EXPECT_EQ(j["v"], 1);
  ASSERT_EQ(j["channels"].size(), 3u);
  EXPECT_EQ(j["channels"][0]["name"], "I");
  bool has_flow = false;
  for (const auto& st : j["channels"][0]["stages"]) has_flow = has_flow || st["type"] == "flow";
  EXPECT_TRUE(has_flow);
  EXPECT_TRUE(j["kernel"].is_null());
}

TEST(RecipeJsonTest, IdentityRecipe) {
  const TransferRecipe back = recipe_from_json(recipe_to_json(identity_recipe()));
  EXPECT_TRUE(back.is_identity());
}

TEST(RecipeJsonTest, RejectsUnknownFieldsAndVersions) {
  json j = json::parse(recipe_to_json(identity_recipe()));
  j["extra"] = 1;
  EXPECT_EQ(recipe_error(j.dump()), ErrorKind::ParseError);
  j.erase("extra");
  j["channels"][1]["bogus"] = true;
  EXPECT_EQ(recipe_error(j.dump()), ErrorKind::ParseError);
  j = json::parse(recipe_to_json(identity_recipe()));
  j["v"] = 2;
  EXPECT_EQ(recipe_error(j.dump()), ErrorKind::ParseError);
  EXPECT_EQ(recipe_error("{not json"), ErrorKind::ParseError);
  j = json::parse(recipe_to_json(sample_recipe()));
  j["channels"][0]["stages"][0]["type"] = "spline";
  EXPECT_EQ(recipe_error(j.dump()), ErrorKind::ParseError);
}

TEST(RecipeJsonTest, MissingScalarIsIncomplete) {
  json j = json::parse(recipe_to_json(sample_recipe()));
  j["illuminant_scale"][0] = nullptr;
  EXPECT_EQ(recipe_error(j.dump()), ErrorKind::RecipeIncomplete);
  j = json::parse(recipe_to_json(sample_recipe()));
  j["channels"][2]["stages"][0].erase("scale");
  EXPECT_EQ(recipe_error(j.dump()), ErrorKind::RecipeIncomplete);
  j = json::parse(recipe_to_json(sample_recipe()));
  j.erase("gamma");
  EXPECT_EQ(recipe_error(j.dump()), ErrorKind::RecipeIncomplete);
}

TEST(ConfigJsonTest, RoundTripAndDefaults) {
  TransferConfig cfg;
  cfg.orders = {3, 1, 1};
  cfg.src_crop = CropRect{1, 2, 30, 40};
  cfg.spectral = true;
  cfg.clamp = ClampPolicy::Clamp;
  cfg.negatives = NegativePolicy::Reject;
  cfg.perturbation = 1e-4;
  EXPECT_EQ(config_from_json(config_to_json(cfg)), cfg);
  EXPECT_EQ(config_from_json(""), TransferConfig{});
  EXPECT_EQ(config_from_json("{}"), TransferConfig{});
  EXPECT_EQ(config_from_json(R"({"orders_chroma": 1})").orders, (std::array<int, 3>{4, 1, 1}));
}

TEST(ConfigJsonTest, Rejections) {
  EXPECT_THROW((void)config_from_json(R"({"orders_x": 1})"), Error);
  EXPECT_THROW((void)config_from_json(R"({"orders_i": 7})"), Error);
  EXPECT_THROW((void)config_from_json(R"({"src_crop": [1, 2, 3]})"), Error);
  EXPECT_THROW((void)config_from_json(R"({"spectral": "yes"})"), Error);
}

}  // namespace
