#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <memory>
#include <mutex>

namespace dst::detail {

namespace {

// FFTW's planner is not reentrant; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

class Plan {
 public:
  explicit Plan(fftw_plan p) : plan_(p) {}
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  void execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_;
};

}  // namespace

Spectrum forward_fft(std::span<const double> image, int width, int height) {
  const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  const std::size_t nh = static_cast<std::size_t>(half_width(width)) * static_cast<std::size_t>(height);
  std::unique_ptr<double, FftwFree> in(fftw_alloc_real(n));
  std::unique_ptr<fftw_complex, FftwFree> out(fftw_alloc_complex(nh));
  std::unique_ptr<Plan> plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = std::make_unique<Plan>(fftw_plan_dft_r2c_2d(height, width, in.get(), out.get(), FFTW_ESTIMATE));
  }
  std::copy(image.begin(), image.end(), in.get());
  plan->execute();
  Spectrum s(nh);
  for (std::size_t i = 0; i < nh; ++i) s[i] = {out.get()[i][0], out.get()[i][1]};
  return s;
}

std::vector<double> inverse_fft(const Spectrum& spectrum, int width, int height) {
  const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  const std::size_t nh = spectrum.size();
  std::unique_ptr<fftw_complex, FftwFree> in(fftw_alloc_complex(nh));
  std::unique_ptr<double, FftwFree> out(fftw_alloc_real(n));
  std::unique_ptr<Plan> plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = std::make_unique<Plan>(fftw_plan_dft_c2r_2d(height, width, in.get(), out.get(), FFTW_ESTIMATE));
  }
  // c2r destroys its input, so the copy happens after planning.
  for (std::size_t i = 0; i < nh; ++i) {
    in.get()[i][0] = spectrum[i].real();
    in.get()[i][1] = spectrum[i].imag();
  }
  plan->execute();
  std::vector<double> img(n);
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) img[i] = out.get()[i] * inv;
  return img;
}

}  // namespace dst::detail
