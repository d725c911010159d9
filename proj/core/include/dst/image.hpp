#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

namespace dst {

enum class Encoding { Gamma, Linear, Opponent };

/// Single real-valued channel, row-major.
struct Plane {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  Plane() = default;
  Plane(int w, int h, double fill = 0.0)
      : width(w), height(h), data(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

  [[nodiscard]] std::size_t size() const noexcept { return data.size(); }
  [[nodiscard]] double& at(int x, int y) { return data[index(x, y)]; }
  [[nodiscard]] double at(int x, int y) const { return data[index(x, y)]; }

 private:
  [[nodiscard]] std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x);
  }
};

/// Three planar channels. The meaning of the channels follows `encoding`:
/// RGB for Gamma and Linear, (I, P, T) for Opponent.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::array<std::vector<double>, 3> ch;
  Encoding encoding = Encoding::Gamma;

  RgbImage() = default;
  RgbImage(int w, int h, Encoding enc = Encoding::Gamma);

  [[nodiscard]] std::size_t size() const noexcept {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  [[nodiscard]] Plane plane(int c) const;
  void set_plane(int c, const Plane& p);
};

struct CropRect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  friend bool operator==(const CropRect&, const CropRect&) = default;
};

inline constexpr int kMinCropSide = 8;

/// Throws OutOfBounds unless the rect lies inside a width x height image
/// and is at least kMinCropSide on each side.
void validate_crop(const CropRect& rect, int width, int height);

/// Read-only window onto an image, used for statistics.
class ImageView {
 public:
  ImageView(const RgbImage& img, const CropRect& rect);
  /// The whole image, with no minimum size.
  explicit ImageView(const RgbImage& img);

  [[nodiscard]] int width() const noexcept { return rect_.w; }
  [[nodiscard]] int height() const noexcept { return rect_.h; }
  [[nodiscard]] std::size_t size() const noexcept {
    return static_cast<std::size_t>(rect_.w) * static_cast<std::size_t>(rect_.h);
  }
  [[nodiscard]] double at(int c, int x, int y) const;
  [[nodiscard]] std::vector<double> channel(int c) const;
  [[nodiscard]] double mean(int c) const;
  [[nodiscard]] RgbImage materialize() const;

 private:
  const RgbImage* img_;
  CropRect rect_;
};

/// View over `rect`, or over the whole image when no rect is given.
[[nodiscard]] ImageView crop_view(const RgbImage& img, const std::optional<CropRect>& rect = std::nullopt);

[[nodiscard]] Plane crop_plane(const Plane& p, const CropRect& rect);

}  // namespace dst
