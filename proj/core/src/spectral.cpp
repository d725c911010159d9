#include "dst/spectral.hpp"

#include <gsl/gsl_multimin.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dst/error.hpp"
#include "fft.hpp"

namespace dst {

namespace {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

constexpr double kFitTolerance = 1e-6;
constexpr double kNewtonGradTol = 1e-14;
constexpr int kNelderMeadEvals = 2000;

/// Normalized power profile of a mean-subtracted spectrum on the half grid.
struct Profile {
  int width = 0;
  int height = 0;
  detail::Spectrum spectrum;
  std::vector<double> p;                  // mult * |X|^2 / sum, DC = 0
  std::vector<std::array<double, 4>> w;   // squared responses B1..L4
  double mean = 0.0;
  double variance = 0.0;
  double mean_square = 0.0;
};

void check_dims(const Plane& lum, const FilterBank& bank) {
  if (lum.width != bank.width() || lum.height != bank.height()) {
    raise(ErrorKind::DimensionMismatch, "image is " + std::to_string(lum.width) + "x" +
                                            std::to_string(lum.height) + ", filter bank is " +
                                            std::to_string(bank.width()) + "x" + std::to_string(bank.height()));
  }
}

std::array<double, 4> squared_bands(const FilterResponses& r) {
  return {r.b1 * r.b1, r.b2 * r.b2, r.b3 * r.b3, r.l4 * r.l4};
}

Profile make_profile(const Plane& lum, const FilterBank& bank) {
  check_dims(lum, bank);
  Profile pr;
  pr.width = lum.width;
  pr.height = lum.height;
  pr.spectrum = detail::forward_fft(lum.data, lum.width, lum.height);
  const double n = static_cast<double>(lum.size());
  pr.mean = pr.spectrum[0].real() / n;
  const std::size_t bins = bank.bins();
  pr.p.resize(bins);
  pr.w.resize(bins);
  double total = 0.0;
  for (std::size_t i = 0; i < bins; ++i) {
    const FilterResponses r{bank.response(Band::H00, i), bank.response(Band::B1, i), bank.response(Band::B2, i),
                            bank.response(Band::B3, i), bank.response(Band::L4, i)};
    pr.w[i] = squared_bands(r);
    pr.p[i] = i == 0 ? 0.0 : bank.multiplicity(i) * std::norm(pr.spectrum[i]);
    total += pr.p[i];
  }
  pr.variance = total / (n * n);
  pr.mean_square = pr.variance + pr.mean * pr.mean;
  if (total > 0.0) {
    for (double& v : pr.p) v /= total;
  }
  return pr;
}

void require_variance(const Profile& pr) {
  if (!(pr.variance > 1e-12 * pr.mean_square) || !(pr.variance > 0.0)) {
    raise(ErrorKind::DegenerateSample, "image is constant; band features are undefined");
  }
}

struct ProfileEval {
  double log_z = 0.0;  // log sum p e^{2 w.u}
  Vec4 msv = Vec4::Zero();
  Mat4 cov = Mat4::Zero();
};

ProfileEval evaluate(const Profile& pr, const Vec4& u, bool with_cov) {
  const std::size_t n = pr.p.size();
  double peak = -std::numeric_limits<double>::infinity();
  std::vector<double> a(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (pr.p[i] <= 0.0) continue;
    const auto& w = pr.w[i];
    a[i] = 2.0 * (w[0] * u[0] + w[1] * u[1] + w[2] * u[2] + w[3] * u[3]);
    peak = std::max(peak, a[i]);
  }
  double z = 0.0;
  Vec4 s1 = Vec4::Zero();
  Mat4 s2 = Mat4::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    if (pr.p[i] <= 0.0) continue;
    const double q = pr.p[i] * std::exp(a[i] - peak);
    const Eigen::Map<const Vec4> w(pr.w[i].data());
    z += q;
    s1 += q * w;
    if (with_cov) s2.noalias() += q * w * w.transpose();
  }
  ProfileEval e;
  e.log_z = std::log(z) + peak;
  e.msv = s1 / z;
  if (with_cov) e.cov = s2 / z - e.msv * e.msv.transpose();
  return e;
}

/// Solves msv_j(u) = target_j for the free components of u, the rest held.
/// The residual is the gradient of the convex function
///   phi(u) = 0.5 log sum p e^{2 w.u} - sum_free target_j u_j,
/// so damped Newton is the primary method; Nelder-Mead on the squared
/// residual is the fallback.
class BandFit {
 public:
  BandFit(const Profile& pr, std::vector<int> free, Vec4 target) : pr_(pr), free_(std::move(free)), target_(target) {}

  Vec4 solve(Vec4 u) {
    newton(u);
    if (residual(u) > 1e-12) nelder_mead(u);
    const double r = residual(u);
    if (!(r <= kFitTolerance)) {
      raise(ErrorKind::FitDivergence, "band MSV fit stalled with residual " + std::to_string(r));
    }
    return u;
  }

  double residual(const Vec4& u) const {
    const ProfileEval e = evaluate(pr_, u, false);
    double r = 0.0;
    for (int j : free_) r = std::max(r, std::abs(e.msv[j] - target_[j]));
    return std::isfinite(r) ? r : std::numeric_limits<double>::infinity();
  }

  double squared_residual(const Vec4& u) const {
    const ProfileEval e = evaluate(pr_, u, false);
    double r = 0.0;
    for (int j : free_) r += (e.msv[j] - target_[j]) * (e.msv[j] - target_[j]);
    return std::isfinite(r) ? r : std::numeric_limits<double>::max();
  }

 private:
  double phi(const Vec4& u, const ProfileEval& e) const {
    double v = 0.5 * e.log_z;
    for (int j : free_) v -= target_[j] * u[j];
    return v;
  }

  void newton(Vec4& u) const {
    const auto k = static_cast<Eigen::Index>(free_.size());
    double prev = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < 200; ++iter) {
      const ProfileEval e = evaluate(pr_, u, true);
      Eigen::VectorXd g(k);
      Eigen::MatrixXd h(k, k);
      for (Eigen::Index a = 0; a < k; ++a) {
        g[a] = e.msv[free_[a]] - target_[free_[a]];
        for (Eigen::Index b = 0; b < k; ++b) h(a, b) = 2.0 * e.cov(free_[a], free_[b]);
      }
      const double gmax = g.cwiseAbs().maxCoeff();
      if (gmax <= kNewtonGradTol) return;
      // Near the rounding floor quadratic convergence shows as a collapse;
      // anything slower means the floor has been reached.
      if (gmax <= 1e-12 && gmax > 0.1 * prev) return;
      prev = gmax;

      Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
      Eigen::VectorXd d = ldlt.solve(-g);
      if (ldlt.info() != Eigen::Success || !d.allFinite() || d.dot(g) >= 0.0) {
        const double ridge = 1e-12 + 1e-8 * h.trace();
        d = (h + ridge * Eigen::MatrixXd::Identity(k, k)).ldlt().solve(-g);
        if (!d.allFinite() || d.dot(g) >= 0.0) d = -g;
      }

      const double f0 = phi(u, e);
      const double slope = g.dot(d);
      double alpha = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 30; ++ls) {
        Vec4 trial = u;
        for (Eigen::Index a = 0; a < k; ++a) trial[free_[a]] += alpha * d[a];
        const ProfileEval et = evaluate(pr_, trial, false);
        const double f1 = phi(trial, et);
        double r1 = 0.0;
        for (int j : free_) r1 = std::max(r1, std::abs(et.msv[j] - target_[j]));
        // phi flattens to rounding long before the residual does; there a
        // step counts when it shrinks the residual instead.
        const bool descent = f1 < f0 && f1 <= f0 + 1e-4 * alpha * slope;
        const bool flat = std::abs(f1 - f0) <= 1e-14 * (1.0 + std::abs(f0));
        if (std::isfinite(f1) && (descent || (flat && r1 < (1.0 - 1e-4 * alpha) * gmax))) {
          u = trial;
          moved = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!moved) return;
    }
  }

  static double nm_objective(const gsl_vector* x, void* params) {
    auto* self = static_cast<BandFit*>(params);
    Vec4 u = self->base_;
    for (std::size_t a = 0; a < self->free_.size(); ++a) u[self->free_[a]] = gsl_vector_get(x, a);
    return self->squared_residual(u);
  }

  void nelder_mead(Vec4& u) {
    base_ = u;
    const std::size_t k = free_.size();
    gsl_multimin_function fn{&BandFit::nm_objective, k, this};
    gsl_vector* x = gsl_vector_alloc(k);
    gsl_vector* step = gsl_vector_alloc(k);
    for (std::size_t a = 0; a < k; ++a) {
      gsl_vector_set(x, a, u[free_[a]]);
      gsl_vector_set(step, a, 0.5);
    }
    gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, k);
    gsl_multimin_fminimizer_set(s, &fn, x, step);
    for (int it = 0; it < kNelderMeadEvals; ++it) {
      if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
      if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), 1e-14) == GSL_SUCCESS) break;
    }
    Vec4 cand = base_;
    for (std::size_t a = 0; a < k; ++a) cand[free_[a]] = gsl_vector_get(s->x, a);
    if (squared_residual(cand) < squared_residual(u)) u = cand;
    gsl_multimin_fminimizer_free(s);
    gsl_vector_free(step);
    gsl_vector_free(x);
    // Newton from the fallback point usually finishes the job.
    newton(u);
  }

  const Profile& pr_;
  std::vector<int> free_;
  Vec4 target_;
  Vec4 base_ = Vec4::Zero();
};

std::vector<int> first(int k) {
  std::vector<int> out(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) out[static_cast<std::size_t>(j)] = j;
  return out;
}

Vec4 reference_bands(const SpectralReference& ref) { return {ref.v[2], ref.v[3], ref.v[4], ref.v[5]}; }

double half_grid_radius(int x, int y, int width, int height) { return radial_frequency(x, y, width, height); }

/// exp(w . u) on the half grid of the profile.
std::vector<double> exp_gain(const Profile& pr, const Vec4& u) {
  std::vector<double> g(pr.w.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto& w = pr.w[i];
    g[i] = std::exp(w[0] * u[0] + w[1] * u[1] + w[2] * u[2] + w[3] * u[3]);
  }
  return g;
}

/// IDFT of the mean-subtracted spectrum times `gain` times `scale`, plus `offset`.
Plane synthesize(const Profile& pr, const std::vector<double>& gain, double scale, double offset) {
  detail::Spectrum y = pr.spectrum;
  y[0] = 0.0;
  for (std::size_t i = 1; i < y.size(); ++i) y[i] *= gain[i] * scale;
  Plane out;
  out.width = pr.width;
  out.height = pr.height;
  out.data = detail::inverse_fft(y, pr.width, pr.height);
  for (double& v : out.data) v += offset;
  return out;
}

double dc_ratio(double to, double from, double rms) {
  return std::abs(from) > 1e-12 * rms ? to / from : 1.0;
}

}  // namespace

// ---- reference ------------------------------------------------------------------

SpectralReference SpectralReference::continuous() {
  return {{0.0, 1.0, 0.1829113769, 0.0383796491, 0.0092141282, 0.0030389843}};
}

SpectralReference SpectralReference::for_grid(const FilterBank& bank) {
  SpectralReference r;
  r.v[1] = 1.0;
  const double n = static_cast<double>(bank.width()) * static_cast<double>(bank.height());
  std::array<double, 4> acc{};
  for (std::size_t i = 1; i < bank.bins(); ++i) {
    const double m = bank.multiplicity(i);
    acc[0] += m * bank.response(Band::B1, i) * bank.response(Band::B1, i);
    acc[1] += m * bank.response(Band::B2, i) * bank.response(Band::B2, i);
    acc[2] += m * bank.response(Band::B3, i) * bank.response(Band::B3, i);
    acc[3] += m * bank.response(Band::L4, i) * bank.response(Band::L4, i);
  }
  for (std::size_t j = 0; j < 4; ++j) r.v[j + 2] = acc[j] / (n - 1.0);
  return r;
}

// ---- analysis -------------------------------------------------------------------

SpectralFeatures spectral_features(const Plane& lum, const FilterBank& bank) {
  check_dims(lum, bank);
  const detail::Spectrum x = detail::forward_fft(lum.data, lum.width, lum.height);
  const double n = static_cast<double>(lum.size());
  SpectralFeatures out;
  out.f[0] = x[0].real() / n;
  double ms = 0.0;
  for (double v : lum.data) ms += v * v;
  out.f[1] = ms / n;
  std::array<double, 5> acc{};
  for (std::size_t i = 1; i < bank.bins(); ++i) {
    const double e = bank.multiplicity(i) * std::norm(x[i]);
    for (int b = 0; b < kBandCount; ++b) {
      const double h = bank.response(static_cast<Band>(b), i);
      acc[static_cast<std::size_t>(b)] += h * h * e;
    }
  }
  const double n2 = n * n;
  out.msv_h00 = acc[0] / n2;
  for (std::size_t j = 0; j < 4; ++j) out.f[j + 2] = acc[j + 1] / n2;
  return out;
}

SpectralFeatures decoupled_spectral_features(const Plane& lum, const FilterBank& bank, const SpectralReference& ref) {
  const Profile pr = make_profile(lum, bank);
  require_variance(pr);
  const Vec4 target = reference_bands(ref);
  SpectralFeatures out;
  out.decoupled = true;
  out.f[0] = pr.mean;
  out.f[1] = pr.variance;
  Vec4 u = Vec4::Zero();
  out.f[2] = evaluate(pr, u, false).msv[0];
  for (int k = 1; k < 4; ++k) {
    u = BandFit(pr, first(k), target).solve(u);
    out.f[static_cast<std::size_t>(k + 2)] = evaluate(pr, u, false).msv[k];
  }
  u = BandFit(pr, first(4), target).solve(u);
  for (int j = 0; j < 4; ++j) out.t[static_cast<std::size_t>(j)] = u[j];
  return out;
}

SpectralNormalization spectral_normalize(const Plane& lum, const FilterBank& bank, const SpectralReference& ref) {
  SpectralNormalization out;
  out.features = decoupled_spectral_features(lum, bank, ref);
  out.t = out.features.t;
  const Profile pr = make_profile(lum, bank);
  const Vec4 t(out.t[0], out.t[1], out.t[2], out.t[3]);
  const double g = std::exp(evaluate(pr, t, false).log_z);
  out.image = synthesize(pr, exp_gain(pr, t), 1.0 / std::sqrt(pr.variance * g), 0.0);
  return out;
}

Plane spectral_flow(const Plane& lum, const FilterBank& bank, const std::array<double, 4>& t) {
  check_dims(lum, bank);
  detail::Spectrum x = detail::forward_fft(lum.data, lum.width, lum.height);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double b1 = bank.response(Band::B1, i), b2 = bank.response(Band::B2, i);
    const double b3 = bank.response(Band::B3, i), l4 = bank.response(Band::L4, i);
    x[i] *= std::exp(t[0] * b1 * b1 + t[1] * b2 * b2 + t[2] * b3 * b3 + t[3] * l4 * l4);
  }
  Plane out;
  out.width = lum.width;
  out.height = lum.height;
  out.data = detail::inverse_fft(x, lum.width, lum.height);
  return out;
}

// ---- transfer -------------------------------------------------------------------

SpectralTransfer spectral_transfer(const Plane& src, const SpectralFeatures& target, const FilterBank& bank,
                                   const SpectralReference& ref) {
  const Profile pr = make_profile(src, bank);
  require_variance(pr);
  if (!(target.f[1] >= 0.0)) raise(ErrorKind::InvalidArgument, "target variance is negative");

  const Vec4 refb = reference_bands(ref);
  Vec4 s = Vec4::Zero();
  // Triangular de-normalization: band k gets its desired value while the
  // bands below it sit at the reference; the higher bands stay as already set.
  for (int k = 3; k >= 0; --k) {
    Vec4 goal = refb;
    goal[k] = target.f[static_cast<std::size_t>(k + 2)];
    s = BandFit(pr, first(k + 1), goal).solve(s);
  }

  const double g = std::exp(evaluate(pr, s, false).log_z);
  SpectralTransfer out;
  out.kernel.exponents = {s[0], s[1], s[2], s[3]};
  out.kernel.ac_gain = std::sqrt(target.f[1] / (pr.variance * g));
  out.kernel.dc_gain = dc_ratio(target.f[0], pr.mean, std::sqrt(pr.mean_square));
  out.image = synthesize(pr, exp_gain(pr, s), out.kernel.ac_gain, target.f[0]);
  return out;
}

EquivalentKernel extract_diffusion_kernel(const Plane& reference, const Plane& diffused) {
  if (reference.width != diffused.width || reference.height != diffused.height) {
    raise(ErrorKind::DimensionMismatch, "reference and diffused images differ in size");
  }
  const FilterBank bank(reference.width, reference.height);
  const Profile pr_ref = make_profile(reference, bank);
  const Profile pr = make_profile(diffused, bank);
  require_variance(pr_ref);
  require_variance(pr);

  // Normalized band MSVs of the reference, fitted all at once.
  const Vec4 goal = evaluate(pr_ref, Vec4::Zero(), false).msv;
  const Vec4 s = BandFit(pr, first(4), goal).solve(Vec4::Zero());
  const double g = std::exp(evaluate(pr, s, false).log_z);

  EquivalentKernel k;
  k.exponents = {s[0], s[1], s[2], s[3]};
  k.ac_gain = std::sqrt(pr_ref.variance / (pr.variance * g));
  k.dc_gain = dc_ratio(pr_ref.mean, pr.mean, std::sqrt(pr.mean_square));
  return k;
}

// ---- kernel -----------------------------------------------------------------------

double EquivalentKernel::response(double f) const {
  if (f <= 0.0) return dc_gain;
  const auto w = squared_bands(filter_responses(f));
  return ac_gain * std::exp(exponents[0] * w[0] + exponents[1] * w[1] + exponents[2] * w[2] + exponents[3] * w[3]);
}

std::vector<double> EquivalentKernel::frequency_response(int width, int height) const {
  std::vector<double> out(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      out[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)] =
          (x == 0 && y == 0) ? dc_gain : response(radial_frequency(x, y, width, height));
  return out;
}

bool EquivalentKernel::is_identity(double tol) const {
  return std::abs(ac_gain - 1.0) <= tol && std::abs(dc_gain - 1.0) <= tol &&
         std::all_of(exponents.begin(), exponents.end(), [&](double e) { return std::abs(e) <= tol; });
}

SpatialKernel EquivalentKernel::spatial(int width, int height) const {
  const int hw = detail::half_width(width);
  detail::Spectrum h(static_cast<std::size_t>(hw) * static_cast<std::size_t>(height));
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < hw; ++x)
      h[static_cast<std::size_t>(y) * static_cast<std::size_t>(hw) + static_cast<std::size_t>(x)] =
          (x == 0 && y == 0) ? dc_gain : response(half_grid_radius(x, y, width, height));
  const std::vector<double> full = detail::inverse_fft(h, width, height);

  auto tap = [&](int dx, int dy) {
    const int x = ((dx % width) + width) % width;
    const int y = ((dy % height) + height) % height;
    return full[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)];
  };
  double total = 0.0;
  for (double v : full) total += v * v;

  const int cap = std::min({kMaxKernelSize, width - (width % 2 == 0 ? 1 : 0), height - (height % 2 == 0 ? 1 : 0)});
  int r = 0;
  double kept = tap(0, 0) * tap(0, 0);
  while (2 * r + 1 < cap && kept < kKernelEnergyFraction * total) {
    ++r;
    for (int d = -r; d <= r; ++d) {
      kept += tap(d, -r) * tap(d, -r) + tap(d, r) * tap(d, r);
      if (d != -r && d != r) kept += tap(-r, d) * tap(-r, d) + tap(r, d) * tap(r, d);
    }
  }

  SpatialKernel out;
  out.size = 2 * r + 1;
  out.taps.resize(static_cast<std::size_t>(out.size) * static_cast<std::size_t>(out.size));
  for (int y = -r; y <= r; ++y)
    for (int x = -r; x <= r; ++x)
      out.taps[static_cast<std::size_t>(y + r) * static_cast<std::size_t>(out.size) + static_cast<std::size_t>(x + r)] =
          tap(x, y);
  out.retained_energy = total > 0.0 ? kept / total : 1.0;
  return out;
}

Plane apply_kernel(const Plane& img, const EquivalentKernel& k) {
  if (img.width < 1 || img.height < 1 || img.size() != static_cast<std::size_t>(img.width) * img.height) {
    raise(ErrorKind::DimensionMismatch, "plane storage does not match its dimensions");
  }
  detail::Spectrum x = detail::forward_fft(img.data, img.width, img.height);
  const int hw = detail::half_width(img.width);
  for (int y = 0; y < img.height; ++y)
    for (int xx = 0; xx < hw; ++xx) {
      const std::size_t i = static_cast<std::size_t>(y) * static_cast<std::size_t>(hw) + static_cast<std::size_t>(xx);
      x[i] *= (xx == 0 && y == 0) ? k.dc_gain : k.response(half_grid_radius(xx, y, img.width, img.height));
    }
  Plane out;
  out.width = img.width;
  out.height = img.height;
  out.data = detail::inverse_fft(x, img.width, img.height);
  return out;
}

RgbImage apply_kernel_rgb(const RgbImage& img, const EquivalentKernel& k) {
  RgbImage out = img;
  for (int c = 0; c < 3; ++c) out.set_plane(c, apply_kernel(img.plane(c), k));
  return out;
}

}  // namespace dst
