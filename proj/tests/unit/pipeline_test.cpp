#include <gtest/gtest.h>

#include <cmath>

#include "dst/error.hpp"
#include "dst/moments.hpp"
#include "dst/pipeline.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

namespace {

using namespace dst;
using dst::testing::max_abs_diff;
using dst::testing::synthetic_photo;

RgbImage opponent_of(const RgbImage& gamma_img, const Rgb& scale) {
  return rgb_to_opponent(scale_channels(gamma_decode(gamma_img), scale));
}

TEST(TransferStyleTest, SelfTransferIsFixedPoint) {
  for (int i = 0; i < 3; ++i) {
    const RgbImage x = synthetic_photo(i, 64, 48);
    const auto r = transfer_style(x, x);
    EXPECT_LE(max_abs_diff(r.image, x), 2.0 / 65535) << i;
    for (double s : r.recipe.illuminant_scale) EXPECT_DOUBLE_EQ(s, 1.0);
  }
}

TEST(TransferStyleTest, OutputCarriesTargetChannelMoments) {
  const RgbImage src = synthetic_photo(3, 64, 48);
  const RgbImage tgt = synthetic_photo(4, 56, 40);
  TransferConfig cfg;
  cfg.orders = {4, 4, 4};
  const auto r = transfer_style(src, tgt, cfg);
  // Statistics of the transferred opponent planes, before encoding.
  const RgbImage got = rgb_to_opponent(gamma_decode(r.image));
  const RgbImage want = rgb_to_opponent(gamma_decode(tgt));
  for (std::size_t c = 0; c < 3; ++c) {
    const auto g = dst::testing::oracle_moments(got.ch[c]);
    const auto w = dst::testing::oracle_moments(want.ch[c]);
    EXPECT_NEAR(static_cast<double>(g.mean), static_cast<double>(w.mean), 1e-6) << c;
    EXPECT_NEAR(static_cast<double>(g.variance), static_cast<double>(w.variance), 1e-6) << c;
    EXPECT_NEAR(static_cast<double>(g.skewness), static_cast<double>(w.skewness), 1e-6) << c;
    EXPECT_NEAR(static_cast<double>(g.ortho_kurtosis), static_cast<double>(w.ortho_kurtosis), 1e-5) << c;
  }
}

TEST(TransferStyleTest, RecipeReplayIsBitwise) {
  const RgbImage src = synthetic_photo(5, 48, 32);
  const RgbImage tgt = synthetic_photo(6, 48, 32);
  const auto r = transfer_style(src, tgt);
  const RgbImage again = apply_recipe(src, r.recipe);
  EXPECT_EQ(again.ch, r.image.ch);
  EXPECT_EQ(transfer_style(src, tgt).image.ch, r.image.ch);
}

TEST(TransferStyleTest, CropRestrictsStatistics) {
  const RgbImage src = synthetic_photo(7, 64, 48);
  const RgbImage tgt = synthetic_photo(8, 64, 48);
  TransferConfig cfg;
  cfg.tgt_crop = CropRect{10, 5, 30, 20};
  const auto r = transfer_style(src, tgt, cfg);

  // Oracle: the target's crop analyzed on its own.
  const ImageView view(gamma_decode(tgt), *cfg.tgt_crop);
  const RgbImage crop = view.materialize();
  for (std::size_t c = 0; c < 3; ++c) {
    double m = 0.0;
    for (double v : crop.ch[c]) m += v;
    EXPECT_NEAR(r.recipe.target_illuminant.rgb[c], m / crop.size(), 1e-12);
  }
  const RgbImage tgt_opp = rgb_to_opponent(crop);
  const auto o = dst::testing::oracle_moments(tgt_opp.ch[0]);
  EXPECT_NEAR(r.recipe.channels[0].target.m1, static_cast<double>(o.mean), 1e-9);
  EXPECT_NEAR(r.recipe.channels[0].target.m2, static_cast<double>(o.variance), 1e-9);
  EXPECT_NEAR(r.recipe.channels[0].target.m3, static_cast<double>(o.skewness), 1e-9);
  EXPECT_NEAR(r.recipe.channels[0].target.m4, static_cast<double>(o.ortho_kurtosis), 1e-8);

  const auto full = transfer_style(src, tgt);
  EXPECT_NE(full.recipe.channels[0].target.m1, r.recipe.channels[0].target.m1);
  EXPECT_EQ(r.image.width, src.width);
}

TEST(TransferStyleTest, ChromaOrderOneOnlyShiftsMeans) {
  const RgbImage src = synthetic_photo(9, 48, 32);
  const RgbImage tgt = synthetic_photo(10, 48, 32);
  TransferConfig cfg;
  cfg.orders = {4, 1, 1};
  const auto r = transfer_style(src, tgt, cfg);
  const RgbImage before = opponent_of(src, r.recipe.illuminant_scale);
  const RgbImage after = rgb_to_opponent(gamma_decode(r.image));
  for (std::size_t c = 1; c < 3; ++c) {
    EXPECT_EQ(r.recipe.channels[c].effective_order, 1);
    EXPECT_NEAR(static_cast<double>(dst::testing::oracle_variance(after.ch[c])),
                static_cast<double>(dst::testing::oracle_variance(before.ch[c])), 1e-12);
  }
}

TEST(TransferStyleTest, SpectralOptionAddsKernel) {
  const RgbImage src = synthetic_photo(11, 64, 64);
  const RgbImage tgt = synthetic_photo(12, 64, 64);
  TransferConfig cfg;
  cfg.spectral = true;
  const auto r = transfer_style(src, tgt, cfg);
  ASSERT_TRUE(r.recipe.kernel.has_value());
  EXPECT_DOUBLE_EQ(r.recipe.kernel->ac_gain, 1.0);
  EXPECT_EQ(apply_recipe(src, r.recipe).ch, r.image.ch);
  // Moments are matched after the kernel, so the lightness mean still lands.
  const RgbImage after = rgb_to_opponent(gamma_decode(r.image));
  const RgbImage want = rgb_to_opponent(gamma_decode(tgt));
  EXPECT_NEAR(static_cast<double>(dst::testing::oracle_mean(after.ch[0])),
              static_cast<double>(dst::testing::oracle_mean(want.ch[0])), 1e-6);
}

TEST(TransferStyleTest, ClampPolicy) {
  const RgbImage src = synthetic_photo(13, 48, 32);
  RgbImage tgt = synthetic_photo(14, 48, 32);
  for (double& v : tgt.ch[0]) v = v > 0.5 ? 0.99 : 0.02;  // high-contrast red
  TransferConfig cfg;
  cfg.clamp = ClampPolicy::Clamp;
  const auto r = transfer_style(src, tgt, cfg);
  for (const auto& ch : r.image.ch)
    for (double v : ch) ASSERT_TRUE(v >= 0.0 && v <= 1.0);
}

TEST(TransferStyleTest, ErrorsCarryStage) {
  const RgbImage src = synthetic_photo(15, 32, 32);
  RgbImage black(32, 32);
  try {
    (void)transfer_style(src, black);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BlackImage);
    EXPECT_EQ(e.stage(), "gray-world");
  }
  TransferConfig cfg;
  cfg.src_crop = CropRect{30, 0, 8, 8};
  try {
    (void)transfer_style(src, src, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::OutOfBounds);
  }
  RgbImage neg = src;
  neg.ch[1][3] = -0.01;
  cfg = {};
  cfg.negatives = NegativePolicy::Reject;
  try {
    (void)transfer_style(neg, src, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NegativeInput);
    EXPECT_EQ(e.stage(), "decode");
  }
}

TEST(RecipeTest, IdentityReplaysExactly) {
  const RgbImage x = synthetic_photo(16, 20, 10);
  const TransferRecipe id = identity_recipe();
  EXPECT_TRUE(id.is_identity());
  EXPECT_EQ(apply_recipe(x, id).ch, x.ch);
}

TEST(RecipeTest, NonFiniteScalarIsIncomplete) {
  TransferRecipe r = identity_recipe();
  r.illuminant_scale[1] = NAN;
  try {
    r.validate();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::RecipeIncomplete);
  }
}

TEST(OpticsTest, BlurPairTransfersBlur) {
  const int n = 64;
  const RgbImage sharp = synthetic_photo(17, n, n);
  RgbImage blurred = sharp;
  for (std::size_t c = 0; c < 3; ++c) {
    Plane p = gamma_decode(sharp).plane(static_cast<int>(c));
    p = dst::testing::gaussian_blur(p, 1.5);
    for (std::size_t i = 0; i < p.size(); ++i) blurred.ch[c][i] = gamma_encode(p.data[i]);
  }
  const RgbImage src = synthetic_photo(18, n, n);
  const auto r = transfer_optics(src, blurred, sharp);
  EXPECT_LT(r.kernel.response(0.3), 0.5);
  // The source loses high-frequency energy.
  const Plane a = luminance(gamma_decode(src)), b = luminance(gamma_decode(r.image));
  const auto ea = dst::testing::oracle_band_msv(a), eb = dst::testing::oracle_band_msv(b);
  EXPECT_LT(eb[0], 0.5 * ea[0]);
}

TEST(OpticsTest, MismatchedPair) {
  try {
    (void)transfer_optics(synthetic_photo(1, 16, 16), synthetic_photo(2, 16, 16), synthetic_photo(3, 24, 16));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
  }
}

}  // namespace
