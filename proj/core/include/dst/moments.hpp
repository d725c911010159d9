#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "dst/point_map.hpp"

namespace dst {

/// One color plane as a flat vector. Passengers receive every point-wise map
/// applied to `values` but never contribute to any statistic.
struct Sample {
  std::vector<double> values;
  std::vector<double> passengers;
};

/// Reference values of the moment hierarchy: the expected sample moments of
/// a zero-mean, unit-variance Gaussian.
inline constexpr std::array<double, 4> kMomentReference{0.0, 1.0, 0.0, 3.0};

/// Relative variance floor below which a sample is treated as flat.
inline constexpr double kDegenerateVariance = 1e-12;

/// Decoupled moments: mean, biased variance, skewness, ortho-kurtosis.
/// `order` counts the populated entries; m3/m4 are meaningless past it.
struct MomentFeatures {
  double m1 = 0.0;
  double m2 = 0.0;
  double m3 = 0.0;
  double m4 = 0.0;
  int order = 0;
  bool degenerate = false;

  [[nodiscard]] double get(int j) const { return j == 1 ? m1 : j == 2 ? m2 : j == 3 ? m3 : m4; }
};

/// A prefix {1..k} of the moment hierarchy. Anything else is rejected with
/// OrderGap, since each level is defined on the normalization of the previous.
class MomentOrders {
 public:
  constexpr MomentOrders() = default;
  [[nodiscard]] static MomentOrders prefix(int k);
  [[nodiscard]] static MomentOrders from_list(std::span<const int> orders);
  [[nodiscard]] static MomentOrders from_list(std::initializer_list<int> orders) {
    return from_list(std::span<const int>(orders.begin(), orders.size()));
  }

  [[nodiscard]] constexpr int count() const noexcept { return count_; }
  [[nodiscard]] constexpr bool contains(int j) const noexcept { return j >= 1 && j <= count_; }
  friend constexpr bool operator==(MomentOrders, MomentOrders) = default;

 private:
  constexpr explicit MomentOrders(int k) : count_(k) {}
  int count_ = 0;
};

// ---- raw statistics ---------------------------------------------------------

/// (1/N) sum x^j
[[nodiscard]] double sample_moment(std::span<const double> x, int order);
[[nodiscard]] double mean(std::span<const double> x);
/// Biased (1/N) variance.
[[nodiscard]] double variance(std::span<const double> x);
[[nodiscard]] double skewness(std::span<const double> x);
/// Classical standardized kurtosis m4c / m2c^2 (not excess).
[[nodiscard]] double kurtosis(std::span<const double> x);
[[nodiscard]] bool is_degenerate(std::span<const double> x);

// ---- analytic gradients -----------------------------------------------------

/// Gradient of mu_j(x) = (1/N) sum x^j, i.e. (j/N) x^(j-1).
[[nodiscard]] std::vector<double> moment_gradient(std::span<const double> x, int order);
/// Gradient of the mean.
[[nodiscard]] std::vector<double> mean_gradient(std::span<const double> x);
/// Gradient of the biased variance: (2/N) (x - mean).
[[nodiscard]] std::vector<double> variance_gradient(std::span<const double> x);
/// Gradient of the skewness: 3/(N sigma) (z^2 - skew z - 1), z standardized.
[[nodiscard]] std::vector<double> skewness_gradient(std::span<const double> x);

// ---- normalization ----------------------------------------------------------

struct MeanVarNormalization {
  Sample sample;
  double mean = 0.0;
  double variance = 0.0;
  PointMap map;
};

/// Subtract the mean, then divide by the standard deviation.
/// Throws DegenerateSample when the variance is below the relative floor.
[[nodiscard]] MeanVarNormalization normalize_mean_var(const Sample& x);

/// Time t at which the standardized sample x / (1 - t x) reaches `target_skew`.
/// The search stays inside the pole-free interval (1/min x, 1/max x).
/// Throws TargetUnreachable if the target lies outside the skewness range
/// swept by that interval.
[[nodiscard]] double riccati_time(std::span<const double> standardized, double target_skew);

struct R3Normalization {
  Sample sample;
  MomentFeatures features;  // m1..m3 of the input, order 3
  double t0 = 0.0;
  PointMap map;
};

/// Mean -> Riccati to zero third central moment -> mean -> unit variance.
/// The output has mean 0, variance 1 and skewness 0.
[[nodiscard]] R3Normalization normalize_to_r3(const Sample& x);

/// Fourth moment of the R3 normalization of x.
[[nodiscard]] double ortho_kurtosis(std::span<const double> x);

/// Decoupled moments up to `max_order`. Flat samples come back with
/// degenerate = true and order capped at 2.
[[nodiscard]] MomentFeatures analyze_moments(std::span<const double> x, int max_order = 4);

// ---- transfer ---------------------------------------------------------------

struct TransferOptions {
  /// Uniform noise added to the source before analysis (saddle escape).
  double perturbation = 0.0;
  std::uint64_t perturbation_seed = 0x5eed;
  double flow_rtol = 1e-8;
};

/// The frozen point-wise transfer map plus the scalars that define it.
struct MomentRecipe {
  MomentFeatures target;
  int effective_order = 0;
  double t0 = 0.0;
  double ts = 0.0;
  bool degenerate_source = false;
  bool target_clamped = false;
  double requested_m4 = 0.0;
  PointMap map;

  [[nodiscard]] double operator()(double v) const { return map(v); }
};

struct MomentTransfer {
  Sample sample;
  MomentRecipe recipe;
};

/// Three-step transfer: normalize the source down the hierarchy, then
/// de-normalize it imposing the target's decoupled moments in reverse order.
[[nodiscard]] MomentTransfer transfer_moments(const Sample& src, const MomentFeatures& target,
                                              MomentOrders orders, const TransferOptions& options = {});

}  // namespace dst
