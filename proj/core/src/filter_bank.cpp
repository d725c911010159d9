#include "dst/filter_bank.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "dst/error.hpp"
#include "fft.hpp"

namespace dst {

double FilterResponses::get(Band b) const {
  switch (b) {
    case Band::H00: return h00;
    case Band::B1: return b1;
    case Band::B2: return b2;
    case Band::B3: return b3;
    case Band::L4: return l4;
  }
  return 0.0;
}

double FilterResponses::energy() const {
  return h00 * h00 + b1 * b1 + b2 * b2 + b3 * b3 + l4 * l4;
}

FilterResponses filter_responses(double f) {
  // H0k(f) = sin(pi 2^k f) below 2^-(k+1), 1 above; L0k is its complement
  // cos(pi 2^k f) (0 above), so H0k^2 + L0k^2 = 1 holds bin by bin.
  std::array<double, 4> h{}, l{};
  for (int k = 0; k < 4; ++k) {
    const double scale = std::ldexp(1.0, k);
    if (f <= 0.5 / scale) {
      const double a = std::numbers::pi * scale * f;
      h[static_cast<std::size_t>(k)] = std::sin(a);
      l[static_cast<std::size_t>(k)] = std::cos(a);
    } else {
      h[static_cast<std::size_t>(k)] = 1.0;
      l[static_cast<std::size_t>(k)] = 0.0;
    }
  }
  FilterResponses r;
  r.h00 = h[0];
  r.b1 = l[0] * h[1];
  r.b2 = l[0] * l[1] * h[2];
  r.b3 = l[0] * l[1] * l[2] * h[3];
  r.l4 = l[0] * l[1] * l[2] * l[3];
  return r;
}

double radial_frequency(int x, int y, int width, int height) {
  const int sx = x < (width + 1) / 2 ? x : x - width;
  const int sy = y < (height + 1) / 2 ? y : y - height;
  const double fx = static_cast<double>(sx) / width;
  const double fy = static_cast<double>(sy) / height;
  return std::sqrt(fx * fx + fy * fy);
}

FilterBank::FilterBank(int width, int height) : width_(width), height_(height) {
  if (width < 8 || height < 8) {
    raise(ErrorKind::InvalidArgument,
          "filter bank grid must be at least 8x8, got " + std::to_string(width) + "x" + std::to_string(height));
  }
  const int hw = half_width();
  const std::size_t n = static_cast<std::size_t>(hw) * static_cast<std::size_t>(height);
  for (auto& r : resp_) r.resize(n);
  radius_.resize(n);
  mult_.resize(n);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < hw; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * static_cast<std::size_t>(hw) + static_cast<std::size_t>(x);
      const double f = radial_frequency(x, y, width, height);
      const FilterResponses r = filter_responses(f);
      resp_[0][i] = r.h00;
      resp_[1][i] = r.b1;
      resp_[2][i] = r.b2;
      resp_[3][i] = r.b3;
      resp_[4][i] = r.l4;
      radius_[i] = f;
      mult_[i] = detail::hermitian_multiplicity(x, width);
    }
  }
}

std::vector<double> FilterBank::full_response(Band band) const {
  std::vector<double> out(static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_));
  for (int y = 0; y < height_; ++y)
    for (int x = 0; x < width_; ++x)
      out[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)] =
          filter_responses(radial_frequency(x, y, width_, height_)).get(band);
  return out;
}

}  // namespace dst
