#include "dst/lut.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>
#include <thread>

#include "dst/error.hpp"
#include "dst/pipeline.hpp"

namespace dst {

namespace {

constexpr int kMaxLutSize = 256;

void check_size(int size) {
  if (size < 2 || size > kMaxLutSize) {
    raise(ErrorKind::InvalidArgument, "LUT size must be in [2, " + std::to_string(kMaxLutSize) + "], got " +
                                          std::to_string(size));
  }
}

struct Cell {
  int i;
  double f;
};

inline Cell locate(double v, int size) {
  const double x = std::clamp(v, 0.0, 1.0) * static_cast<double>(size - 1);
  const int i = std::min(static_cast<int>(x), size - 2);
  return {i, x - i};
}

void apply_rows(const RgbImage& img, const Lut3D& lut, RgbImage& out, std::size_t begin, std::size_t end) {
  const int n = lut.size;
  const double* d = lut.data.data();
  const std::size_t sg = 3 * static_cast<std::size_t>(n);
  const std::size_t sb = sg * static_cast<std::size_t>(n);
  const double* __restrict r = img.ch[0].data();
  const double* __restrict g = img.ch[1].data();
  const double* __restrict b = img.ch[2].data();
  double* __restrict o0 = out.ch[0].data();
  double* __restrict o1 = out.ch[1].data();
  double* __restrict o2 = out.ch[2].data();
  for (std::size_t p = begin; p < end; ++p) {
    const Cell cr = locate(r[p], n), cg = locate(g[p], n), cb = locate(b[p], n);
    const double* c000 = d + 3 * static_cast<std::size_t>(cr.i) + sg * static_cast<std::size_t>(cg.i) +
                         sb * static_cast<std::size_t>(cb.i);
    const double* c010 = c000 + sg;
    const double* c001 = c000 + sb;
    const double* c011 = c001 + sg;
    double res[3];
    for (int k = 0; k < 3; ++k) {
      const double x00 = c000[k] + cr.f * (c000[3 + k] - c000[k]);
      const double x10 = c010[k] + cr.f * (c010[3 + k] - c010[k]);
      const double x01 = c001[k] + cr.f * (c001[3 + k] - c001[k]);
      const double x11 = c011[k] + cr.f * (c011[3 + k] - c011[k]);
      const double y0 = x00 + cg.f * (x10 - x00);
      const double y1 = x01 + cg.f * (x11 - x01);
      res[k] = y0 + cb.f * (y1 - y0);
    }
    o0[p] = res[0];
    o1[p] = res[1];
    o2[p] = res[2];
  }
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t j = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > j) out.push_back(s.substr(j, i - j));
  }
  return out;
}

[[noreturn]] void parse_error(std::size_t line, const std::string& what) {
  raise(ErrorKind::ParseError, "line " + std::to_string(line) + ": " + what);
}

double parse_number(std::string_view tok, std::size_t line) {
  double v = 0.0;
  const char* first = tok.data();
  if (!tok.empty() && tok.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
    parse_error(line, "invalid number '" + std::string(tok) + "'");
  }
  return v;
}

Rgb parse_triplet(const std::vector<std::string_view>& toks, std::size_t first, std::size_t line) {
  if (toks.size() != first + 3) parse_error(line, "expected three values");
  return {parse_number(toks[first], line), parse_number(toks[first + 1], line), parse_number(toks[first + 2], line)};
}

}  // namespace

Lut3D Lut3D::identity(int size) {
  check_size(size);
  Lut3D lut;
  lut.size = size;
  lut.data.resize(3 * static_cast<std::size_t>(size) * size * size);
  const double step = 1.0 / (size - 1);
  for (int b = 0; b < size; ++b)
    for (int g = 0; g < size; ++g)
      for (int r = 0; r < size; ++r) {
        const std::size_t i = lut.index(r, g, b);
        lut.data[i] = r == size - 1 ? 1.0 : r * step;
        lut.data[i + 1] = g == size - 1 ? 1.0 : g * step;
        lut.data[i + 2] = b == size - 1 ? 1.0 : b * step;
      }
  return lut;
}

Rgb Lut3D::sample(const Rgb& rgb) const {
  RgbImage one(1, 1);
  for (int c = 0; c < 3; ++c) one.ch[static_cast<std::size_t>(c)][0] = rgb[static_cast<std::size_t>(c)];
  RgbImage out(1, 1);
  apply_rows(one, *this, out, 0, 1);
  return {out.ch[0][0], out.ch[1][0], out.ch[2][0]};
}

Lut3D bake_lut(const TransferRecipe& recipe, int size) {
  check_size(size);
  recipe.validate();
  Lut3D lut = Lut3D::identity(size);
  if (recipe.is_identity()) return lut;

  RgbImage lattice(size, size * size, Encoding::Gamma);
  const std::size_t n = lattice.size();
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t c = 0; c < 3; ++c) lattice.ch[c][p] = lut.data[3 * p + c];
  const RgbImage mapped = apply_recipe(lattice, recipe, false);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t c = 0; c < 3; ++c) lut.data[3 * p + c] = mapped.ch[c][p];
  return lut;
}

void apply_lut(const RgbImage& img, const Lut3D& lut, RgbImage& out, unsigned threads) {
  check_size(lut.size);
  if (out.width != img.width || out.height != img.height) out = RgbImage(img.width, img.height);
  out.encoding = Encoding::Gamma;
  const std::size_t n = img.size();
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, n / 65536)));
  if (threads <= 1) {
    apply_rows(img, lut, out, 0, n);
    return;
  }
  std::vector<std::jthread> pool;
  const std::size_t chunk = (n + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t b = t * chunk, e = std::min(n, b + chunk);
    if (b < e) pool.emplace_back([&, b, e] { apply_rows(img, lut, out, b, e); });
  }
}

RgbImage apply_lut(const RgbImage& img, const Lut3D& lut, unsigned threads) {
  RgbImage out(img.width, img.height, Encoding::Gamma);
  apply_lut(img, lut, out, threads);
  return out;
}

std::string write_cube(const Lut3D& lut, const std::string& title, std::size_t* clamped) {
  check_size(lut.size);
  std::string out;
  out.reserve(lut.data.size() * 9 + 64);
  if (!title.empty()) out += "TITLE \"" + title + "\"\n";
  out += "LUT_3D_SIZE " + std::to_string(lut.size) + "\n";
  std::size_t count = 0;
  char buf[96];
  for (std::size_t i = 0; i < lut.data.size(); i += 3) {
    double v[3];
    for (int k = 0; k < 3; ++k) {
      const double x = lut.data[i + static_cast<std::size_t>(k)];
      v[k] = std::clamp(x, 0.0, 1.0);
      if (v[k] != x) ++count;
    }
    const int len = std::snprintf(buf, sizeof buf, "%.6f %.6f %.6f\n", v[0], v[1], v[2]);
    out.append(buf, static_cast<std::size_t>(len));
  }
  if (clamped) *clamped = count;
  return out;
}

CubeFile read_cube(std::string_view text) {
  CubeFile cube;
  std::size_t line_no = 0;
  std::size_t expected = 0;
  std::vector<double>& data = cube.lut.data;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    const auto toks = split(line);
    const std::string_view key = toks.front();
    if (key == "TITLE") {
      const auto q1 = line.find('"');
      const auto q2 = line.rfind('"');
      if (q1 == std::string_view::npos || q2 == q1) parse_error(line_no, "TITLE must be quoted");
      cube.title = std::string(line.substr(q1 + 1, q2 - q1 - 1));
    } else if (key == "LUT_3D_SIZE") {
      if (toks.size() != 2) parse_error(line_no, "LUT_3D_SIZE takes one value");
      int n = 0;
      const auto [ptr, ec] = std::from_chars(toks[1].data(), toks[1].data() + toks[1].size(), n);
      if (ec != std::errc() || ptr != toks[1].data() + toks[1].size() || n < 2 || n > kMaxLutSize) {
        parse_error(line_no, "invalid LUT_3D_SIZE '" + std::string(toks[1]) + "'");
      }
      if (cube.lut.size != 0) parse_error(line_no, "duplicate LUT_3D_SIZE");
      if (!data.empty()) parse_error(line_no, "LUT_3D_SIZE after data");
      cube.lut.size = n;
      expected = static_cast<std::size_t>(n) * n * n;
      data.reserve(3 * expected);
    } else if (key == "DOMAIN_MIN") {
      cube.domain_min = parse_triplet(toks, 1, line_no);
    } else if (key == "DOMAIN_MAX") {
      cube.domain_max = parse_triplet(toks, 1, line_no);
    } else if (key == "LUT_1D_SIZE") {
      parse_error(line_no, "1D LUTs are not supported");
    } else {
      if (cube.lut.size == 0) parse_error(line_no, "data before LUT_3D_SIZE");
      const Rgb v = parse_triplet(toks, 0, line_no);
      data.insert(data.end(), v.begin(), v.end());
    }
    if (end == text.size()) break;
  }
  if (cube.lut.size == 0) raise(ErrorKind::ParseError, "missing LUT_3D_SIZE");
  if (data.size() != 3 * expected) {
    raise(ErrorKind::SizeMismatch, "LUT_3D_SIZE " + std::to_string(cube.lut.size) + " needs " +
                                       std::to_string(expected) + " entries, found " + std::to_string(data.size() / 3));
  }
  return cube;
}

}  // namespace dst
