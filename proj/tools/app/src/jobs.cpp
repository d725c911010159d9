#include "dst_app/jobs.hpp"

#include <charconv>
#include <vector>

#include "dst/error.hpp"

namespace dst::app {

CropRect parse_crop(std::string_view text) {
  std::vector<int> v;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string_view part = text.substr(pos, comma - pos);
    int value = 0;
    const auto [end, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
    if (part.empty() || ec != std::errc{} || end != part.data() + part.size()) {
      raise(ErrorKind::InvalidArgument, "crop must be x,y,w,h integers, got '" + std::string(text) + "'");
    }
    v.push_back(value);
    pos = comma + 1;
  }
  if (v.size() != 4) raise(ErrorKind::InvalidArgument, "crop must have four fields, got '" + std::string(text) + "'");
  return {v[0], v[1], v[2], v[3]};
}

std::string cube_for_recipe(const TransferRecipe& recipe, int size) {
  return write_cube(bake_lut(recipe, size), kCubeTitle);
}

Bytes encode_png(const RgbImage& img) { return encode_image(img, ImageFormat::Png, 16); }

}  // namespace dst::app
