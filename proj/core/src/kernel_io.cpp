#include <iomanip>
#include <limits>
#include <sstream>

#include "dst/error.hpp"
#include "dst/spectral.hpp"

namespace dst {

std::string write_kernel_text(const SpatialKernel& k) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  os << k.size << ' ' << k.size << '\n';
  for (int y = 0; y < k.size; ++y) {
    for (int x = 0; x < k.size; ++x) os << (x ? " " : "") << k.at(x, y);
    os << '\n';
  }
  return os.str();
}

SpatialKernel read_kernel_text(const std::string& text) {
  std::istringstream is(text);
  int w = 0, h = 0;
  if (!(is >> w >> h)) raise(ErrorKind::ParseError, "kernel header must be \"width height\"");
  if (w != h || w < 1 || w % 2 == 0 || w > 4 * kMaxKernelSize) {
    raise(ErrorKind::ParseError, "kernel must be an odd square, got " + std::to_string(w) + "x" + std::to_string(h));
  }
  SpatialKernel k;
  k.size = w;
  k.taps.resize(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
  for (std::size_t i = 0; i < k.taps.size(); ++i) {
    if (!(is >> k.taps[i])) {
      raise(ErrorKind::SizeMismatch, "kernel declares " + std::to_string(k.taps.size()) + " taps, found " +
                                         std::to_string(i));
    }
  }
  std::string extra;
  if (is >> extra) raise(ErrorKind::SizeMismatch, "kernel has more taps than its header declares");
  return k;
}

}  // namespace dst
