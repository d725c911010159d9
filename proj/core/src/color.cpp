#include "dst/color.hpp"

#include <cmath>
#include <string>

#include "dst/error.hpp"

namespace dst {

namespace {

double signed_pow(double v, double p, NegativePolicy policy) {
  if (v < 0.0) {
    if (policy == NegativePolicy::Reject) {
      raise(ErrorKind::NegativeInput, "negative value " + std::to_string(v) + " under the reject policy");
    }
    return -std::pow(-v, p);
  }
  return std::pow(v, p);
}

void expect(const RgbImage& img, Encoding enc, const char* what) {
  if (img.encoding != enc) raise(ErrorKind::InvalidArgument, std::string(what) + ": unexpected image encoding");
}

constexpr Mat3 kSrgbToXyz{{{0.4124564, 0.3575761, 0.1804375},
                           {0.2126729, 0.7151522, 0.0721750},
                           {0.0193339, 0.1191920, 0.9503041}}};
constexpr Mat3 kXyzToLms{{{0.4002, 0.7075, -0.0807}, {-0.2280, 1.1500, 0.0612}, {0.0, 0.0, 0.9184}}};
constexpr Mat3 kLmsToIpt{{{0.4000, 0.4000, 0.2000}, {4.4550, -4.8510, 0.3960}, {0.8056, 0.3572, -1.1628}}};

Mat3 product(const Mat3& a, const Mat3& b) {
  Mat3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) r[i][j] += a[i][k] * b[k][j];
  return r;
}

OpponentSpace make_ipt() {
  OpponentSpace s;
  s.rgb_to_lms = product(kXyzToLms, kSrgbToXyz);
  for (auto& row : s.rgb_to_lms) {
    const double sum = row[0] + row[1] + row[2];
    for (double& v : row) v /= sum;
  }
  s.lms_to_ipt = kLmsToIpt;
  s.lms_to_rgb = invert(s.rgb_to_lms);
  s.ipt_to_lms = invert(s.lms_to_ipt);
  s.exponent = 0.43;
  return s;
}

template <class Fn>
RgbImage map_pixels(const RgbImage& img, Encoding out_enc, Fn&& fn) {
  RgbImage out(img.width, img.height, out_enc);
  const std::size_t n = img.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Rgb r = fn(Rgb{img.ch[0][i], img.ch[1][i], img.ch[2][i]});
    out.ch[0][i] = r[0];
    out.ch[1][i] = r[1];
    out.ch[2][i] = r[2];
  }
  return out;
}

}  // namespace

double gamma_decode(double v, NegativePolicy policy) { return signed_pow(v, kGamma, policy); }
double gamma_encode(double v, NegativePolicy policy) { return signed_pow(v, 1.0 / kGamma, policy); }

RgbImage gamma_decode(const RgbImage& img, NegativePolicy policy) {
  expect(img, Encoding::Gamma, "gamma_decode");
  RgbImage out = img;
  out.encoding = Encoding::Linear;
  for (auto& c : out.ch)
    for (double& v : c) v = gamma_decode(v, policy);
  return out;
}

RgbImage gamma_encode(const RgbImage& img, NegativePolicy policy) {
  expect(img, Encoding::Linear, "gamma_encode");
  RgbImage out = img;
  out.encoding = Encoding::Gamma;
  for (auto& c : out.ch)
    for (double& v : c) v = gamma_encode(v, policy);
  return out;
}

Illuminant measure_illuminant(const ImageView& linear) {
  Illuminant l;
  static constexpr const char* kNames[3] = {"R", "G", "B"};
  for (int c = 0; c < 3; ++c) {
    l.rgb[static_cast<std::size_t>(c)] = linear.mean(c);
    if (!(l.rgb[static_cast<std::size_t>(c)] >= kBlackLevel)) {
      raise(ErrorKind::BlackImage, std::string("channel ") + kNames[c] + " mean " +
                                       std::to_string(l.rgb[static_cast<std::size_t>(c)]) + " is black");
    }
  }
  return l;
}

RgbImage scale_channels(const RgbImage& img, const Rgb& scale) {
  RgbImage out = img;
  for (int c = 0; c < 3; ++c)
    for (double& v : out.ch[static_cast<std::size_t>(c)]) v *= scale[static_cast<std::size_t>(c)];
  return out;
}

GrayWorld gray_world_scale(const RgbImage& src, const RgbImage& tgt) {
  GrayWorld g;
  g.source = measure_illuminant(crop_view(src));
  g.target = measure_illuminant(crop_view(tgt));
  for (std::size_t c = 0; c < 3; ++c) g.scale[c] = g.target.rgb[c] / g.source.rgb[c];
  g.image = scale_channels(src, g.scale);
  return g;
}

const OpponentSpace& ipt_space() {
  static const OpponentSpace s = make_ipt();
  return s;
}

Mat3 invert(const Mat3& m) {
  const double a = m[0][0], b = m[0][1], c = m[0][2];
  const double d = m[1][0], e = m[1][1], f = m[1][2];
  const double g = m[2][0], h = m[2][1], i = m[2][2];
  const double A = e * i - f * h, B = -(d * i - f * g), C = d * h - e * g;
  const double det = a * A + b * B + c * C;
  if (!(std::abs(det) > 1e-300)) raise(ErrorKind::InvalidArgument, "matrix is singular");
  const double k = 1.0 / det;
  return {{{A * k, -(b * i - c * h) * k, (b * f - c * e) * k},
           {B * k, (a * i - c * g) * k, -(a * f - c * d) * k},
           {C * k, -(a * h - b * g) * k, (a * e - b * d) * k}}};
}

Rgb multiply(const Mat3& m, const Rgb& v) {
  return {m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2], m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
          m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2]};
}

Rgb rgb_to_opponent(const Rgb& rgb, const OpponentSpace& s) {
  Rgb lms = multiply(s.rgb_to_lms, rgb);
  for (double& v : lms) v = signed_pow(v, s.exponent, NegativePolicy::Signed);
  return multiply(s.lms_to_ipt, lms);
}

Rgb opponent_to_rgb(const Rgb& ipt, const OpponentSpace& s) {
  Rgb lms = multiply(s.ipt_to_lms, ipt);
  for (double& v : lms) v = signed_pow(v, 1.0 / s.exponent, NegativePolicy::Signed);
  return multiply(s.lms_to_rgb, lms);
}

RgbImage rgb_to_opponent(const RgbImage& img, const OpponentSpace& s) {
  expect(img, Encoding::Linear, "rgb_to_opponent");
  return map_pixels(img, Encoding::Opponent, [&](const Rgb& v) { return rgb_to_opponent(v, s); });
}

RgbImage opponent_to_rgb(const RgbImage& img, const OpponentSpace& s) {
  expect(img, Encoding::Opponent, "opponent_to_rgb");
  return map_pixels(img, Encoding::Linear, [&](const Rgb& v) { return opponent_to_rgb(v, s); });
}

Plane luminance(const RgbImage& linear) {
  expect(linear, Encoding::Linear, "luminance");
  Plane p(linear.width, linear.height);
  const auto& y = kSrgbToXyz[1];
  for (std::size_t i = 0; i < p.size(); ++i) {
    p.data[i] = y[0] * linear.ch[0][i] + y[1] * linear.ch[1][i] + y[2] * linear.ch[2][i];
  }
  return p;
}

}  // namespace dst
