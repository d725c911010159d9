#include "synthetic.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <numbers>
#include <random>

#include "dst/imgio.hpp"

namespace dst::testing {

namespace {

using cvec = std::vector<std::complex<double>>;

void dft(cvec& a, int w, int h, int sign) {
  auto* p = reinterpret_cast<fftw_complex*>(a.data());
  fftw_plan plan = fftw_plan_dft_2d(h, w, p, p, sign, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
}

double freq(int i, int n) {
  const int s = i < (n + 1) / 2 ? i : i - n;
  return static_cast<double>(s) / n;
}

}  // namespace

Plane colored_noise(int width, int height, double beta, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  cvec a(n);
  for (auto& v : a) v = nd(rng);
  dft(a, width, height, FFTW_FORWARD);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const double fx = freq(x, width), fy = freq(y, height);
      const double r = std::hypot(fx, fy);
      a[static_cast<std::size_t>(y) * width + x] *= r > 0 ? std::pow(r, -beta) : 0.0;
    }
  dft(a, width, height, FFTW_BACKWARD);
  Plane p(width, height);
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += p.data[i] = a[i].real();
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double& v : p.data) {
    v -= mean;
    var += v * v;
  }
  const double s = 1.0 / std::sqrt(var / static_cast<double>(n));
  for (double& v : p.data) v *= s;
  return p;
}

Plane gaussian_blur(const Plane& p, double sigma) {
  const std::size_t n = p.size();
  cvec a(p.data.begin(), p.data.end());
  dft(a, p.width, p.height, FFTW_FORWARD);
  const double k = 2.0 * std::numbers::pi * std::numbers::pi * sigma * sigma;
  for (int y = 0; y < p.height; ++y)
    for (int x = 0; x < p.width; ++x) {
      const double fx = freq(x, p.width), fy = freq(y, p.height);
      a[static_cast<std::size_t>(y) * p.width + x] *= std::exp(-k * (fx * fx + fy * fy));
    }
  dft(a, p.width, p.height, FFTW_BACKWARD);
  Plane out(p.width, p.height);
  for (std::size_t i = 0; i < n; ++i) out.data[i] = a[i].real() / static_cast<double>(n);
  return out;
}

RgbImage synthetic_photo(int index, int width, int height) {
  std::mt19937_64 rng(0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(index + 1));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto color = [&](double lo, double hi) {
    return std::array<double, 3>{lo + (hi - lo) * u(rng), lo + (hi - lo) * u(rng), lo + (hi - lo) * u(rng)};
  };

  const auto sky = color(0.35, 0.9);
  const auto ground = color(0.05, 0.5);
  const double horizon = 0.3 + 0.4 * u(rng);
  const auto cast = color(0.75, 1.0);
  const Plane texture = colored_noise(width, height, 1.0 + 0.5 * u(rng), rng());
  const double texture_gain = 0.04 + 0.1 * u(rng);

  struct Blob {
    double cx, cy, rx, ry, edge;
    std::array<double, 3> c;
  };
  std::vector<Blob> blobs(3 + rng() % 4);
  for (auto& b : blobs) b = {u(rng), u(rng), 0.05 + 0.2 * u(rng), 0.05 + 0.2 * u(rng), 0.01 + 0.05 * u(rng),
                             color(0.02, 0.95)};

  RgbImage img(width, height, Encoding::Gamma);
  for (int y = 0; y < height; ++y) {
    const double fy = (y + 0.5) / height;
    const double s = 1.0 / (1.0 + std::exp(-(fy - horizon) / 0.03));
    for (int x = 0; x < width; ++x) {
      const double fx = (x + 0.5) / width;
      std::array<double, 3> v{};
      for (std::size_t c = 0; c < 3; ++c) v[c] = (1.0 - s) * sky[c] * (1.0 - 0.3 * fy) + s * ground[c];
      for (const auto& b : blobs) {
        const double d = std::hypot((fx - b.cx) / b.rx, (fy - b.cy) / b.ry);
        const double a = 1.0 / (1.0 + std::exp((d - 1.0) / b.edge));
        for (std::size_t c = 0; c < 3; ++c) v[c] = (1.0 - a) * v[c] + a * b.c[c];
      }
      const double t = texture_gain * texture.at(x, y);
      const std::size_t p = static_cast<std::size_t>(y) * width + x;
      for (std::size_t c = 0; c < 3; ++c) img.ch[c][p] = std::clamp(cast[c] * v[c] * (1.0 + t), 0.01, 0.99);
    }
  }
  return img;
}

std::vector<double> random_sample(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> x(n);
  const int family = static_cast<int>(rng() % 6);
  const double loc = 4.0 * u(rng) - 2.0;
  const double scale = 0.2 + 3.0 * u(rng);
  switch (family) {
    case 0: {
      std::gamma_distribution<double> d(0.8 + 4.0 * u(rng));
      for (auto& v : x) v = d(rng);
      break;
    }
    case 1: {
      std::lognormal_distribution<double> d(0.0, 0.2 + 0.4 * u(rng));
      for (auto& v : x) v = d(rng);
      break;
    }
    case 2: {
      for (auto& v : x) v = u(rng);
      break;
    }
    case 3: {
      std::gamma_distribution<double> ga(1.5 + 3.0 * u(rng)), gb(1.5 + 3.0 * u(rng));
      for (auto& v : x) {
        const double a = ga(rng), b = gb(rng);
        v = a / (a + b);
      }
      break;
    }
    case 4: {
      std::student_t_distribution<double> d(8.0 + 10.0 * u(rng));
      for (auto& v : x) v = d(rng);
      break;
    }
    default: {
      std::normal_distribution<double> a(0.0, 1.0), b(1.5 + 2.0 * u(rng), 0.5 + u(rng));
      const double w = 0.2 + 0.6 * u(rng);
      for (auto& v : x) v = u(rng) < w ? a(rng) : b(rng);
      break;
    }
  }
  for (auto& v : x) v = loc + scale * v;
  return x;
}

std::vector<double> normal_sample(std::size_t n, std::uint64_t seed, double mean, double sigma) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(mean, sigma);
  std::vector<double> x(n);
  for (auto& v : x) v = d(rng);
  return x;
}

RgbImage checkerboard(int width, int height) {
  RgbImage img(width, height);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const double v = ((x / 4 + y / 4) % 2) != 0 ? 0.8 : 0.2;
      const auto p = static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x);
      for (auto& c : img.ch) c[p] = v;
    }
  return img;
}

}  // namespace dst::testing

namespace dst::testing {

const std::vector<std::string>& photo_names() {
  static const std::vector<std::string> names{"astronaut", "chelsea", "coffee", "hubble", "rocket"};
  return names;
}

RgbImage load_photo(const std::string& name) {
  return load_image(std::filesystem::path(DST_TEST_DATA_DIR) / (name + ".png")).image;
}

}  // namespace dst::testing
