#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dst/image.hpp"

namespace dst {

enum class ImageFormat { Png, Ppm, Pfm };

using Bytes = std::vector<std::uint8_t>;

struct LoadedImage {
  RgbImage image;  // Encoding::Gamma, integer formats scaled to [0,1]
  ImageFormat format = ImageFormat::Png;
  int bit_depth = 8;  // 32 for PFM
  std::vector<std::string> warnings;
};

/// Detects the format from the magic bytes. Throws UnsupportedFormat or CorruptFile.
[[nodiscard]] LoadedImage decode_image(const Bytes& bytes);
[[nodiscard]] LoadedImage load_image(const std::filesystem::path& path);

/// bit_depth is 8 or 16 for PNG/PPM and ignored for PFM. Integer formats
/// clamp to [0,1] and round half up.
[[nodiscard]] Bytes encode_image(const RgbImage& img, ImageFormat format, int bit_depth = 16);
void save_image(const RgbImage& img, const std::filesystem::path& path, int bit_depth = 16);

/// From the file extension (.png, .ppm, .pfm); throws UnsupportedFormat.
[[nodiscard]] ImageFormat format_for_path(const std::filesystem::path& path);

[[nodiscard]] Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const Bytes& bytes);
void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace dst
