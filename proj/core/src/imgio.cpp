#include "dst/imgio.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "dst/error.hpp"

namespace dst {

namespace {

// ---- quantization ---------------------------------------------------------------

std::uint32_t quantize(double v, std::uint32_t max) {
  const double x = std::clamp(v, 0.0, 1.0) * max;
  return static_cast<std::uint32_t>(std::floor(x + 0.5));
}

// ---- PNG --------------------------------------------------------------------------

struct MemoryReader {
  const Bytes* bytes;
  std::size_t pos;
};

void png_read_memory(png_structp png, png_bytep out, png_size_t n) {
  auto* r = static_cast<MemoryReader*>(png_get_io_ptr(png));
  if (r->pos + n > r->bytes->size()) png_error(png, "unexpected end of data");
  std::memcpy(out, r->bytes->data() + r->pos, n);
  r->pos += n;
}

void png_write_memory(png_structp png, png_bytep data, png_size_t n) {
  auto* out = static_cast<Bytes*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + n);
}

void png_flush_memory(png_structp) {}

void png_warning_silent(png_structp, png_const_charp) {}

LoadedImage decode_png(const Bytes& bytes) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, png_warning_silent);
  if (!png) raise(ErrorKind::CorruptFile, "cannot allocate PNG reader");
  png_infop info = png_create_info_struct(png);
  MemoryReader reader{&bytes, 0};
  LoadedImage out;
  std::vector<png_byte> pixels;
  std::vector<png_bytep> rows;
  png_uint_32 width = 0, height = 0;
  int depth = 0;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    raise(ErrorKind::CorruptFile, "PNG data is truncated or invalid");
  }
  png_set_read_fn(png, &reader, png_read_memory);
  png_read_info(png, info);
  width = png_get_image_width(png, info);
  height = png_get_image_height(png, info);
  depth = png_get_bit_depth(png, info);
  const int color = png_get_color_type(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_strip_alpha(png);
  png_read_update_info(png, info);
  depth = png_get_bit_depth(png, info);
  const std::size_t rowbytes = png_get_rowbytes(png, info);
  pixels.resize(rowbytes * height);
  rows.resize(height);
  for (png_uint_32 y = 0; y < height; ++y) rows[y] = pixels.data() + y * rowbytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  out.format = ImageFormat::Png;
  out.bit_depth = depth;
  out.image = RgbImage(static_cast<int>(width), static_cast<int>(height), Encoding::Gamma);
  const double scale = depth == 16 ? 1.0 / 65535.0 : 1.0 / 255.0;
  for (png_uint_32 y = 0; y < height; ++y) {
    const png_byte* row = rows[y];
    for (png_uint_32 x = 0; x < width; ++x) {
      const std::size_t p = static_cast<std::size_t>(y) * width + x;
      for (std::size_t c = 0; c < 3; ++c) {
        const std::size_t k = 3 * x + c;
        const double v = depth == 16 ? (row[2 * k] << 8 | row[2 * k + 1]) : row[k];
        out.image.ch[c][p] = v * scale;
      }
    }
  }
  return out;
}

Bytes encode_png(const RgbImage& img, int depth) {
  Bytes out;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, png_warning_silent);
  if (!png) raise(ErrorKind::InvalidArgument, "cannot allocate PNG writer");
  png_infop info = png_create_info_struct(png);
  const std::size_t w = static_cast<std::size_t>(img.width);
  const std::size_t bpc = depth == 16 ? 2 : 1;
  std::vector<png_byte> row(w * 3 * bpc);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    raise(ErrorKind::InvalidArgument, "PNG encoding failed");
  }
  png_set_write_fn(png, &out, png_write_memory, png_flush_memory);
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width), static_cast<png_uint_32>(img.height), depth,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const std::uint32_t max = depth == 16 ? 65535u : 255u;
  for (int y = 0; y < img.height; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const std::size_t p = static_cast<std::size_t>(y) * w + x;
      for (std::size_t c = 0; c < 3; ++c) {
        const std::uint32_t q = quantize(img.ch[c][p], max);
        const std::size_t k = 3 * x + c;
        if (depth == 16) {
          row[2 * k] = static_cast<png_byte>(q >> 8);
          row[2 * k + 1] = static_cast<png_byte>(q & 0xff);
        } else {
          row[k] = static_cast<png_byte>(q);
        }
      }
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

// ---- netpbm-style headers -----------------------------------------------------------

class HeaderReader {
 public:
  explicit HeaderReader(const Bytes& b) : b_(b) {}

  std::string token() {
    skip_space_and_comments();
    std::string t;
    while (pos_ < b_.size() && !std::isspace(b_[pos_])) t.push_back(static_cast<char>(b_[pos_++]));
    if (t.empty()) raise(ErrorKind::CorruptFile, "truncated image header");
    return t;
  }

  long integer() {
    const std::string t = token();
    char* end = nullptr;
    const long v = std::strtol(t.c_str(), &end, 10);
    if (*end != '\0' || v <= 0) raise(ErrorKind::CorruptFile, "invalid header value '" + t + "'");
    return v;
  }

  double real() {
    const std::string t = token();
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (*end != '\0' || v == 0.0 || !std::isfinite(v)) raise(ErrorKind::CorruptFile, "invalid scale '" + t + "'");
    return v;
  }

  /// Exactly one whitespace byte separates the header from the raster.
  std::size_t raster_start() {
    if (pos_ >= b_.size() || !std::isspace(b_[pos_])) raise(ErrorKind::CorruptFile, "truncated image header");
    return pos_ + 1;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < b_.size()) {
      if (std::isspace(b_[pos_])) {
        ++pos_;
      } else if (b_[pos_] == '#') {
        while (pos_ < b_.size() && b_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  const Bytes& b_;
  std::size_t pos_ = 2;
};

void check_dims(long w, long h) {
  if (w > 1 << 16 || h > 1 << 16) raise(ErrorKind::CorruptFile, "image dimensions are implausible");
}

LoadedImage decode_ppm(const Bytes& bytes) {
  HeaderReader hr(bytes);
  const long w = hr.integer(), h = hr.integer(), maxval = hr.integer();
  check_dims(w, h);
  if (maxval > 65535) raise(ErrorKind::CorruptFile, "PPM maxval above 65535");
  const std::size_t start = hr.raster_start();
  const std::size_t bpc = maxval > 255 ? 2 : 1;
  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  if (bytes.size() < start + n * 3 * bpc) raise(ErrorKind::CorruptFile, "PPM raster is truncated");
  LoadedImage out;
  out.format = ImageFormat::Ppm;
  out.bit_depth = bpc == 2 ? 16 : 8;
  out.image = RgbImage(static_cast<int>(w), static_cast<int>(h), Encoding::Gamma);
  const double scale = 1.0 / static_cast<double>(maxval);
  const std::uint8_t* d = bytes.data() + start;
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t c = 0; c < 3; ++c) {
      const std::size_t k = 3 * p + c;
      const double v = bpc == 2 ? (d[2 * k] << 8 | d[2 * k + 1]) : d[k];
      out.image.ch[c][p] = v * scale;
    }
  return out;
}

Bytes encode_ppm(const RgbImage& img, int depth) {
  const std::uint32_t max = depth == 16 ? 65535u : 255u;
  const std::string header = "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n" +
                             std::to_string(max) + "\n";
  Bytes out(header.begin(), header.end());
  out.reserve(out.size() + img.size() * 3 * (depth == 16 ? 2 : 1));
  for (std::size_t p = 0; p < img.size(); ++p)
    for (std::size_t c = 0; c < 3; ++c) {
      const std::uint32_t q = quantize(img.ch[c][p], max);
      if (depth == 16) out.push_back(static_cast<std::uint8_t>(q >> 8));
      out.push_back(static_cast<std::uint8_t>(q & 0xff));
    }
  return out;
}

float read_float(const std::uint8_t* p, bool little) {
  std::uint32_t u = little ? (std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 |
                              std::uint32_t(p[3]) << 24)
                           : (std::uint32_t(p[3]) | std::uint32_t(p[2]) << 8 | std::uint32_t(p[1]) << 16 |
                              std::uint32_t(p[0]) << 24);
  return std::bit_cast<float>(u);
}

LoadedImage decode_pfm(const Bytes& bytes) {
  const bool color = bytes[1] == 'F';
  HeaderReader hr(bytes);
  const long w = hr.integer(), h = hr.integer();
  check_dims(w, h);
  const double scale = hr.real();
  const std::size_t start = hr.raster_start();
  const bool little = scale < 0.0;
  const std::size_t channels = color ? 3 : 1;
  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  if (bytes.size() < start + n * channels * 4) raise(ErrorKind::CorruptFile, "PFM raster is truncated");
  LoadedImage out;
  out.format = ImageFormat::Pfm;
  out.bit_depth = 32;
  out.image = RgbImage(static_cast<int>(w), static_cast<int>(h), Encoding::Gamma);
  const std::uint8_t* d = bytes.data() + start;
  for (long y = 0; y < h; ++y) {
    const std::size_t src_row = static_cast<std::size_t>(h - 1 - y);  // stored bottom-up
    for (long x = 0; x < w; ++x) {
      const std::size_t p = static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x);
      const std::size_t q = src_row * static_cast<std::size_t>(w) + static_cast<std::size_t>(x);
      for (std::size_t c = 0; c < 3; ++c) {
        const std::size_t k = channels == 3 ? 3 * q + c : q;
        out.image.ch[c][p] = read_float(d + 4 * k, little);
      }
    }
  }
  return out;
}

Bytes encode_pfm(const RgbImage& img) {
  const std::string header = "PF\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n-1.0\n";
  Bytes out(header.begin(), header.end());
  out.reserve(out.size() + img.size() * 12);
  const std::size_t w = static_cast<std::size_t>(img.width);
  for (int y = img.height - 1; y >= 0; --y)
    for (std::size_t x = 0; x < w; ++x)
      for (std::size_t c = 0; c < 3; ++c) {
        const auto u = std::bit_cast<std::uint32_t>(static_cast<float>(img.ch[c][static_cast<std::size_t>(y) * w + x]));
        for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(u >> (8 * b)));
      }
  return out;
}

}  // namespace

LoadedImage decode_image(const Bytes& bytes) {
  static constexpr std::uint8_t kPngMagic[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  LoadedImage out;
  if (bytes.size() >= 8 && std::equal(kPngMagic, kPngMagic + 8, bytes.begin())) {
    out = decode_png(bytes);
  } else if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '6') {
    out = decode_ppm(bytes);
  } else if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == 'F' || bytes[1] == 'f')) {
    out = decode_pfm(bytes);
  } else {
    raise(ErrorKind::UnsupportedFormat, "unrecognized image signature");
  }
  if (out.image.width < 1 || out.image.height < 1) raise(ErrorKind::CorruptFile, "image has no pixels");
  if (out.bit_depth == 8) out.warnings.push_back("8-bit input: expect banding after strong transfers");
  return out;
}

LoadedImage load_image(const std::filesystem::path& path) { return decode_image(read_file(path)); }

Bytes encode_image(const RgbImage& img, ImageFormat format, int bit_depth) {
  if (format != ImageFormat::Pfm && bit_depth != 8 && bit_depth != 16) {
    raise(ErrorKind::InvalidArgument, "bit depth must be 8 or 16, got " + std::to_string(bit_depth));
  }
  switch (format) {
    case ImageFormat::Png: return encode_png(img, bit_depth);
    case ImageFormat::Ppm: return encode_ppm(img, bit_depth);
    case ImageFormat::Pfm: return encode_pfm(img);
  }
  raise(ErrorKind::UnsupportedFormat, "unknown output format");
}

void save_image(const RgbImage& img, const std::filesystem::path& path, int bit_depth) {
  write_file(path, encode_image(img, format_for_path(path), bit_depth));
}

ImageFormat format_for_path(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".png") return ImageFormat::Png;
  if (ext == ".ppm") return ImageFormat::Ppm;
  if (ext == ".pfm") return ImageFormat::Pfm;
  raise(ErrorKind::UnsupportedFormat, "unsupported image extension '" + ext + "'");
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorKind::InvalidArgument, "cannot open " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, const Bytes& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorKind::InvalidArgument, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  write_file(path, Bytes(text.begin(), text.end()));
}

}  // namespace dst
