#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>

#include "dst/error.hpp"
#include "dst/imgio.hpp"
#include "synthetic.hpp"

namespace {

using namespace dst;

RgbImage ramp(int w, int h) {
  RgbImage img(w, h);
  for (std::size_t i = 0; i < img.size(); ++i) {
    img.ch[0][i] = static_cast<double>(i) / (img.size() - 1);
    img.ch[1][i] = 1.0 - img.ch[0][i];
    img.ch[2][i] = 0.5 + 0.4 * std::sin(static_cast<double>(i));
  }
  return img;
}

ErrorKind decode_error(const Bytes& b) {
  try {
    (void)decode_image(b);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::InvalidArgument;
}

TEST(ImgioTest, Png16RoundTripWithinQuantization) {
  const RgbImage img = ramp(17, 9);
  for (ImageFormat fmt : {ImageFormat::Png, ImageFormat::Ppm}) {
    const LoadedImage back = decode_image(encode_image(img, fmt, 16));
    EXPECT_EQ(back.bit_depth, 16);
    EXPECT_TRUE(back.warnings.empty());
    ASSERT_EQ(back.image.width, 17);
    for (std::size_t c = 0; c < 3; ++c)
      for (std::size_t i = 0; i < img.size(); ++i) ASSERT_LE(std::abs(back.image.ch[c][i] - img.ch[c][i]), 0.5 / 65535 + 1e-15);
  }
}

TEST(ImgioTest, EightBitRoundsHalfUpAndWarns) {
  RgbImage img(2, 1);
  img.ch[0] = {0.5 / 255, 1.5 / 255};
  img.ch[1] = {-0.3, 1.7};
  img.ch[2] = {127.5 / 255, 0.0};
  for (ImageFormat fmt : {ImageFormat::Png, ImageFormat::Ppm}) {
    const LoadedImage back = decode_image(encode_image(img, fmt, 8));
    EXPECT_EQ(back.bit_depth, 8);
    EXPECT_EQ(back.warnings.size(), 1u);
    EXPECT_DOUBLE_EQ(back.image.ch[0][0], 1.0 / 255);
    EXPECT_DOUBLE_EQ(back.image.ch[0][1], 2.0 / 255);
    EXPECT_DOUBLE_EQ(back.image.ch[1][0], 0.0);
    EXPECT_DOUBLE_EQ(back.image.ch[1][1], 1.0);
    EXPECT_DOUBLE_EQ(back.image.ch[2][0], 128.0 / 255);
  }
}

TEST(ImgioTest, PfmIsLosslessForFloats) {
  RgbImage img = ramp(5, 4);
  for (auto& ch : img.ch)
    for (double& v : ch) v = static_cast<float>(v * 3.0 - 1.0);  // out of range survives
  const Bytes bytes = encode_image(img, ImageFormat::Pfm);
  const LoadedImage back = decode_image(bytes);
  EXPECT_EQ(back.image.ch, img.ch);
  EXPECT_EQ(encode_image(back.image, ImageFormat::Pfm), bytes);
  // Header and bottom-up layout: the first stored float is the last row's first red.
  const std::string header = "PF\n5 4\n-1.0\n";
  ASSERT_EQ(std::string(bytes.begin(), bytes.begin() + header.size()), header);
  float first = 0;
  std::memcpy(&first, bytes.data() + header.size(), 4);
  EXPECT_EQ(first, static_cast<float>(img.ch[0][15]));
}

TEST(ImgioTest, GrayscalePfmReplicates) {
  std::string s = "Pf\n2 1\n-1.0\n";
  Bytes b(s.begin(), s.end());
  for (float v : {0.25f, 0.75f}) {
    unsigned char raw[4];
    std::memcpy(raw, &v, 4);
    b.insert(b.end(), raw, raw + 4);
  }
  const auto img = decode_image(b).image;
  EXPECT_EQ(img.ch[2][1], 0.75);
  EXPECT_EQ(img.ch[0][0], 0.25);
}

TEST(ImgioTest, PpmHeaderWithComments) {
  const std::string s = "P6\n# comment\n2 1 # trailing\n255\n";
  Bytes b(s.begin(), s.end());
  b.insert(b.end(), {255, 0, 51, 0, 255, 102});
  const auto img = decode_image(b).image;
  EXPECT_DOUBLE_EQ(img.ch[0][0], 1.0);
  EXPECT_DOUBLE_EQ(img.ch[2][1], 0.4);
}

TEST(ImgioTest, BadInputs) {
  EXPECT_EQ(decode_error({'G', 'I', 'F', '8'}), ErrorKind::UnsupportedFormat);
  EXPECT_EQ(decode_error({}), ErrorKind::UnsupportedFormat);
  Bytes png = encode_image(ramp(8, 8), ImageFormat::Png, 16);
  png.resize(png.size() / 2);
  EXPECT_EQ(decode_error(png), ErrorKind::CorruptFile);
  const std::string ppm = "P6\n4 4\n255\nabc";
  EXPECT_EQ(decode_error(Bytes(ppm.begin(), ppm.end())), ErrorKind::CorruptFile);
  const std::string pfm = "PF\n4 x\n-1.0\n";
  EXPECT_EQ(decode_error(Bytes(pfm.begin(), pfm.end())), ErrorKind::CorruptFile);
  EXPECT_THROW((void)encode_image(ramp(2, 2), ImageFormat::Png, 12), Error);
  EXPECT_THROW((void)format_for_path("a.tiff"), Error);
}

TEST(ImgioTest, FileRoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "dst_imgio_test";
  std::filesystem::create_directories(dir);
  const RgbImage img = dst::testing::synthetic_photo(0, 24, 16);
  for (const char* name : {"a.png", "a.PPM", "a.pfm"}) {
    save_image(img, dir / name);
    const auto back = load_image(dir / name);
    EXPECT_EQ(back.image.width, 24);
    EXPECT_LE(std::abs(back.image.ch[1][100] - img.ch[1][100]), 1e-5);
  }
  std::filesystem::remove_all(dir);
}

}  // namespace
