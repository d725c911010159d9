#include "oracles.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace dst::testing {

namespace {

long double central(std::span<const double> x, int k) {
  const long double m = oracle_mean(x);
  long double s = 0;
  for (double v : x) s += std::pow(static_cast<long double>(v) - m, k);
  return s / x.size();
}

long double skew_of(const std::vector<long double>& z) {
  long double m = 0;
  for (auto v : z) m += v;
  m /= z.size();
  long double s2 = 0, s3 = 0;
  for (auto v : z) {
    const long double d = v - m;
    s2 += d * d;
    s3 += d * d * d;
  }
  s2 /= z.size();
  s3 /= z.size();
  return s3 / std::pow(s2, 1.5L);
}

}  // namespace

long double oracle_mean(std::span<const double> x) {
  long double s = 0;
  for (double v : x) s += v;
  return s / x.size();
}

long double oracle_variance(std::span<const double> x) { return central(x, 2); }

long double oracle_skewness(std::span<const double> x) { return central(x, 3) / std::pow(central(x, 2), 1.5L); }

long double oracle_kurtosis(std::span<const double> x) {
  const long double v = central(x, 2);
  return central(x, 4) / (v * v);
}

long double oracle_ortho_kurtosis(std::span<const double> x) {
  const long double m = oracle_mean(x), sd = std::sqrt(oracle_variance(x));
  std::vector<long double> z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = (x[i] - m) / sd;
  const auto [lo, hi] = std::minmax_element(z.begin(), z.end());
  // Pole-free times: 1 - t z > 0 for all z, i.e. t in (1/min z, 1/max z).
  long double a = 1 / *lo, b = 1 / *hi;
  a += 1e-9L * std::abs(a);
  b -= 1e-9L * std::abs(b);
  std::vector<long double> y(z.size());
  auto skew_at = [&](long double t) {
    for (std::size_t i = 0; i < z.size(); ++i) y[i] = z[i] / (1 - t * z[i]);
    return skew_of(y);
  };
  long double fa = skew_at(a);
  if (fa > 0 || skew_at(b) < 0) throw std::runtime_error("oracle: zero skew not bracketed");
  for (int it = 0; it < 200; ++it) {
    const long double c = 0.5L * (a + b);
    if (c == a || c == b) break;
    const long double fc = skew_at(c);
    if ((fc > 0) == (fa > 0)) {
      a = c;
      fa = fc;
    } else {
      b = c;
    }
  }
  skew_at(0.5L * (a + b));
  long double mean = 0;
  for (auto v : y) mean += v;
  mean /= y.size();
  long double m2 = 0, m4 = 0;
  for (auto v : y) {
    const long double d = v - mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  m2 /= y.size();
  m4 /= y.size();
  return m4 / (m2 * m2);
}

OracleMoments oracle_moments(std::span<const double> x) {
  return {oracle_mean(x), oracle_variance(x), oracle_skewness(x), oracle_ortho_kurtosis(x)};
}

std::array<double, 5> oracle_responses(double f) {
  auto h = [f](int k) { return f <= std::pow(2.0, -(k + 1)) ? std::sin(std::numbers::pi * std::pow(2.0, k) * f) : 1.0; };
  auto l = [f](int k) { return f <= std::pow(2.0, -(k + 1)) ? std::cos(std::numbers::pi * std::pow(2.0, k) * f) : 0.0; };
  return {h(0), l(0) * h(1), l(0) * l(1) * h(2), l(0) * l(1) * l(2) * h(3), l(0) * l(1) * l(2) * l(3)};
}

std::array<double, 5> oracle_band_msv(const Plane& p) {
  const int w = p.width, hgt = p.height;
  const std::size_t n = p.size();
  std::vector<std::complex<double>> spec(p.data.begin(), p.data.end());
  auto* s = reinterpret_cast<fftw_complex*>(spec.data());
  fftw_plan fwd = fftw_plan_dft_2d(hgt, w, s, s, FFTW_FORWARD, FFTW_ESTIMATE);
  fftw_execute(fwd);
  fftw_destroy_plan(fwd);
  spec[0] = 0.0;  // mean removed

  std::array<double, 5> out{};
  std::vector<std::complex<double>> band(n);
  auto* b = reinterpret_cast<fftw_complex*>(band.data());
  fftw_plan inv = fftw_plan_dft_2d(hgt, w, b, b, FFTW_BACKWARD, FFTW_ESTIMATE);
  for (int k = 0; k < 5; ++k) {
    for (int y = 0; y < hgt; ++y)
      for (int x = 0; x < w; ++x) {
        const int sx = x < (w + 1) / 2 ? x : x - w, sy = y < (hgt + 1) / 2 ? y : y - hgt;
        const double f = std::hypot(static_cast<double>(sx) / w, static_cast<double>(sy) / hgt);
        const std::size_t i = static_cast<std::size_t>(y) * w + x;
        band[i] = spec[i] * oracle_responses(f)[static_cast<std::size_t>(k)];
      }
    fftw_execute(inv);
    double ms = 0.0;
    for (const auto& v : band) {
      const double r = v.real() / static_cast<double>(n);
      ms += r * r;
    }
    out[static_cast<std::size_t>(k)] = ms / static_cast<double>(n);
  }
  fftw_destroy_plan(inv);
  return out;
}

double max_abs_diff(const RgbImage& a, const RgbImage& b) {
  double m = 0.0;
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.ch[c][i] - b.ch[c][i]));
  return m;
}

double psnr(const RgbImage& a, const RgbImage& b) {
  double se = 0.0;
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < a.size(); ++i) se += (a.ch[c][i] - b.ch[c][i]) * (a.ch[c][i] - b.ch[c][i]);
  const double mse = se / (3.0 * static_cast<double>(a.size()));
  return mse > 0 ? 10.0 * std::log10(1.0 / mse) : INFINITY;
}

std::array<long double, 3> oracle_cubic_fit(std::span<const double> y) {
  // Normal equations, Gauss-Jordan with partial pivoting.
  long double g[3][4] = {};
  for (double v : y) {
    const long double phi[3] = {1, v, static_cast<long double>(v) * v};
    const long double r = static_cast<long double>(v) * v * v;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) g[i][j] += phi[i] * phi[j];
      g[i][3] += phi[i] * r;
    }
  }
  for (int c = 0; c < 3; ++c) {
    int piv = c;
    for (int r = c + 1; r < 3; ++r)
      if (std::abs(g[r][c]) > std::abs(g[piv][c])) piv = r;
    std::swap(g[c], g[piv]);
    for (int r = 0; r < 3; ++r) {
      if (r == c) continue;
      const long double f = g[r][c] / g[c][c];
      for (int k = c; k < 4; ++k) g[r][k] -= f * g[c][k];
    }
  }
  return {g[0][3] / g[0][0], g[1][3] / g[1][1], g[2][3] / g[2][2]};
}

}  // namespace dst::testing
