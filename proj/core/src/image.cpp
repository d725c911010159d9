#include "dst/image.hpp"

#include <string>

#include "dst/error.hpp"

namespace dst {

RgbImage::RgbImage(int w, int h, Encoding enc) : width(w), height(h), encoding(enc) {
  for (auto& c : ch) c.assign(size(), 0.0);
}

Plane RgbImage::plane(int c) const {
  Plane p;
  p.width = width;
  p.height = height;
  p.data = ch[static_cast<std::size_t>(c)];
  return p;
}

void RgbImage::set_plane(int c, const Plane& p) {
  if (p.width != width || p.height != height) {
    raise(ErrorKind::DimensionMismatch, "plane is " + std::to_string(p.width) + "x" +
                                            std::to_string(p.height) + ", image is " +
                                            std::to_string(width) + "x" + std::to_string(height));
  }
  ch[static_cast<std::size_t>(c)] = p.data;
}

void validate_crop(const CropRect& r, int width, int height) {
  const auto describe = [&] {
    return std::to_string(r.x) + "," + std::to_string(r.y) + "," + std::to_string(r.w) + "," +
           std::to_string(r.h) + " in " + std::to_string(width) + "x" + std::to_string(height);
  };
  if (r.w < kMinCropSide || r.h < kMinCropSide) {
    raise(ErrorKind::OutOfBounds, "crop smaller than " + std::to_string(kMinCropSide) + " pixels: " + describe());
  }
  if (r.x < 0 || r.y < 0 || r.x > width - r.w || r.y > height - r.h) {
    raise(ErrorKind::OutOfBounds, "crop outside image: " + describe());
  }
}

ImageView::ImageView(const RgbImage& img, const CropRect& rect) : img_(&img), rect_(rect) {
  validate_crop(rect, img.width, img.height);
}

ImageView::ImageView(const RgbImage& img) : img_(&img), rect_{0, 0, img.width, img.height} {}

double ImageView::at(int c, int x, int y) const {
  const std::size_t idx = static_cast<std::size_t>(rect_.y + y) * static_cast<std::size_t>(img_->width) +
                          static_cast<std::size_t>(rect_.x + x);
  return img_->ch[static_cast<std::size_t>(c)][idx];
}

std::vector<double> ImageView::channel(int c) const {
  std::vector<double> out;
  out.reserve(size());
  const auto& src = img_->ch[static_cast<std::size_t>(c)];
  for (int y = 0; y < rect_.h; ++y) {
    const std::size_t row = static_cast<std::size_t>(rect_.y + y) * static_cast<std::size_t>(img_->width) +
                            static_cast<std::size_t>(rect_.x);
    out.insert(out.end(), src.begin() + static_cast<std::ptrdiff_t>(row),
               src.begin() + static_cast<std::ptrdiff_t>(row + static_cast<std::size_t>(rect_.w)));
  }
  return out;
}

double ImageView::mean(int c) const {
  double s = 0.0;
  for (int y = 0; y < rect_.h; ++y)
    for (int x = 0; x < rect_.w; ++x) s += at(c, x, y);
  return s / static_cast<double>(size());
}

RgbImage ImageView::materialize() const {
  RgbImage out(rect_.w, rect_.h, img_->encoding);
  for (int c = 0; c < 3; ++c) out.ch[static_cast<std::size_t>(c)] = channel(c);
  return out;
}

ImageView crop_view(const RgbImage& img, const std::optional<CropRect>& rect) {
  if (rect) return ImageView(img, *rect);
  return ImageView(img);
}

Plane crop_plane(const Plane& p, const CropRect& rect) {
  validate_crop(rect, p.width, p.height);
  Plane out(rect.w, rect.h);
  for (int y = 0; y < rect.h; ++y)
    for (int x = 0; x < rect.w; ++x) out.at(x, y) = p.at(rect.x + x, rect.y + y);
  return out;
}

}  // namespace dst
