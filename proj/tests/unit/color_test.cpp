#include <gtest/gtest.h>

#include <cmath>

#include "dst/color.hpp"
#include "dst/error.hpp"
#include "synthetic.hpp"

namespace {

using namespace dst;

TEST(GammaTest, PowerLawAndSignedInverse) {
  EXPECT_NEAR(gamma_decode(0.5), std::pow(0.5, 2.2), 1e-16);
  EXPECT_NEAR(gamma_encode(gamma_decode(0.37)), 0.37, 1e-15);
  EXPECT_NEAR(gamma_decode(-0.5), -std::pow(0.5, 2.2), 1e-16);
  EXPECT_NEAR(gamma_encode(gamma_decode(-0.2)), -0.2, 1e-15);
  try {
    (void)gamma_decode(-0.1, NegativePolicy::Reject);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NegativeInput);
  }
}

TEST(GammaTest, ImageEncodingTags) {
  RgbImage img(4, 2);
  const RgbImage lin = gamma_decode(img);
  EXPECT_EQ(lin.encoding, Encoding::Linear);
  EXPECT_THROW((void)gamma_decode(lin), Error);
  EXPECT_EQ(gamma_encode(lin).encoding, Encoding::Gamma);
}

TEST(GrayWorldTest, ScalesChannelMeansToTarget) {
  const RgbImage src = gamma_decode(dst::testing::synthetic_photo(0, 32, 24));
  const RgbImage tgt = gamma_decode(dst::testing::synthetic_photo(1, 40, 20));
  const GrayWorld gw = gray_world_scale(src, tgt);
  const Illuminant after = measure_illuminant(ImageView(gw.image));
  for (int c = 0; c < 3; ++c) {
    EXPECT_NEAR(after.rgb[static_cast<std::size_t>(c)], gw.target.rgb[static_cast<std::size_t>(c)], 1e-14);
    double m = 0.0;
    for (double v : tgt.ch[static_cast<std::size_t>(c)]) m += v;
    EXPECT_NEAR(gw.target.rgb[static_cast<std::size_t>(c)], m / tgt.size(), 1e-15);
  }
}

TEST(GrayWorldTest, BlackChannelRejected) {
  RgbImage img(8, 8, Encoding::Linear);
  img.ch[0].assign(64, 0.2);
  img.ch[1].assign(64, 0.2);
  try {
    (void)measure_illuminant(ImageView(img));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BlackImage);
  }
}

TEST(OpponentTest, WhiteMapsToUnitLightness) {
  const Rgb ipt = rgb_to_opponent(Rgb{1.0, 1.0, 1.0});
  EXPECT_NEAR(ipt[0], 1.0, 1e-12);
  EXPECT_NEAR(ipt[1], 0.0, 1e-12);
  EXPECT_NEAR(ipt[2], 0.0, 1e-12);
  // Any gray g maps to (g^0.43, 0, 0).
  const Rgb gray = rgb_to_opponent(Rgb{0.2, 0.2, 0.2});
  EXPECT_NEAR(gray[0], std::pow(0.2, 0.43), 1e-12);
  EXPECT_NEAR(gray[1], 0.0, 1e-12);
}

TEST(OpponentTest, PublishedMatrices) {
  // sRGB (D65) -> XYZ -> Hunt-Pointer-Estevez LMS, rows normalized to unit sum.
  const double xyz[3][3] = {{0.4124564, 0.3575761, 0.1804375}, {0.2126729, 0.7151522, 0.0721750}, {0.0193339, 0.1191920, 0.9503041}};
  const double hpe[3][3] = {{0.4002, 0.7075, -0.0807}, {-0.2280, 1.1500, 0.0612}, {0.0, 0.0, 0.9184}};
  const auto& s = ipt_space();
  for (int i = 0; i < 3; ++i) {
    double row[3] = {}, sum = 0.0;
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < 3; ++k) row[j] += hpe[i][k] * xyz[k][j];
      sum += row[j];
    }
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(s.rgb_to_lms[i][j], row[j] / sum, 1e-15);
  }
  EXPECT_DOUBLE_EQ(s.lms_to_ipt[1][1], -4.8510);
  EXPECT_DOUBLE_EQ(s.exponent, 0.43);
}

TEST(OpponentTest, RoundTripIncludingOutOfGamut) {
  for (const Rgb& v : {Rgb{0.1, 0.5, 0.9}, Rgb{1.3, -0.05, 0.4}, Rgb{0.0, 0.0, 0.0}, Rgb{2.0, 2.0, 0.01}}) {
    const Rgb back = opponent_to_rgb(rgb_to_opponent(v));
    for (int c = 0; c < 3; ++c) EXPECT_NEAR(back[static_cast<std::size_t>(c)], v[static_cast<std::size_t>(c)], 1e-13);
  }
  const Mat3 m = ipt_space().lms_to_ipt;
  const Mat3 mi = invert(m);
  const Rgb e = multiply(mi, multiply(m, Rgb{0.3, -0.2, 0.7}));
  EXPECT_NEAR(e[1], -0.2, 1e-14);
}

TEST(LuminanceTest, Rec709Weights) {
  RgbImage img(1, 3, Encoding::Linear);
  img.ch = {std::vector<double>{1, 0, 0}, std::vector<double>{0, 1, 0}, std::vector<double>{0, 0, 1}};
  const Plane y = luminance(img);
  EXPECT_NEAR(y.data[0], 0.2126729, 1e-15);
  EXPECT_NEAR(y.data[1], 0.7151522, 1e-15);
  EXPECT_NEAR(y.data[2], 0.0721750, 1e-15);
}

}  // namespace
