#include "dst/moments.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "dst/error.hpp"
#include "dst/ortho_flow.hpp"

namespace dst {

namespace {

constexpr double kRiccatiMargin = 1e-9;
constexpr double kRiccatiTolerance = 1e-12;
constexpr double kRiccatiAccept = 1e-10;

struct Central {
  double mean;
  double m2;
  double m3;
  double m4;
};

Central central_moments(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  double s = 0.0;
  for (double v : x) s += v;
  const double mu = s / n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - mu;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  return {mu, m2 / n, m3 / n, m4 / n};
}

void require_size(std::span<const double> x, std::size_t n, const char* what) {
  if (x.size() < n) {
    raise(ErrorKind::InvalidArgument,
          std::string(what) + " needs at least " + std::to_string(n) + " values, got " +
              std::to_string(x.size()));
  }
}

std::pair<double, double> hull(std::span<const double> x) {
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  return {*lo, *hi};
}

void apply_in_place(const PointStage& stage, std::vector<double>& values) {
  for (double& v : values) v = apply_stage(stage, v);
}

/// Standardizing affine stage for x; throws DegenerateSample on flat input.
AffineStage standardize_stage(std::span<const double> x, double* mean_out = nullptr,
                              double* var_out = nullptr) {
  const Central c = central_moments(x);
  const double ms = c.m2 + c.mean * c.mean;
  if (!(c.m2 > kDegenerateVariance * ms) || !(c.m2 > 0.0)) {
    raise(ErrorKind::DegenerateSample,
          "variance " + std::to_string(c.m2) + " is below the relative floor");
  }
  if (mean_out) *mean_out = c.mean;
  if (var_out) *var_out = c.m2;
  const double inv = 1.0 / std::sqrt(c.m2);
  return AffineStage{inv, -c.mean * inv};
}

struct SkewAt {
  double skew;
  double slope;
};

/// Skewness of x / (1 - t x) and its derivative in t (dy/dt = y^2).
SkewAt skew_along_riccati(std::span<const double> x, double t, std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  y.resize(x.size());
  double sy = 0.0, syp = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double den = 1.0 - t * x[i];
    if (!(den > 0.0)) {
      raise(ErrorKind::PoleCollision, "Riccati denominator vanished at t = " + std::to_string(t));
    }
    y[i] = x[i] / den;
    sy += y[i];
    syp += y[i] * y[i];
  }
  const double my = sy / n;
  const double myp = syp / n;
  double m2 = 0.0, m3 = 0.0, dm2 = 0.0, dm3 = 0.0;
  for (double v : y) {
    const double d = v - my;
    const double d2 = d * d;
    const double yp = v * v;
    m2 += d2;
    m3 += d2 * d;
    dm2 += d * yp;
    dm3 += d2 * (yp - myp);
  }
  m2 /= n;
  m3 /= n;
  dm2 *= 2.0 / n;
  dm3 *= 3.0 / n;
  const double s15 = std::pow(m2, 1.5);
  const double skew = m3 / s15;
  const double slope = dm3 / s15 - 1.5 * m3 * dm2 / (s15 * m2);
  return {skew, slope};
}

}  // namespace

// ---- MomentOrders -------------------------------------------------------------

MomentOrders MomentOrders::prefix(int k) {
  if (k < 0 || k > 4) {
    raise(ErrorKind::OrderGap, "moment order count must be in [0, 4], got " + std::to_string(k));
  }
  return MomentOrders(k);
}

MomentOrders MomentOrders::from_list(std::span<const int> orders) {
  std::array<bool, 5> seen{};
  for (int j : orders) {
    if (j < 1 || j > 4) raise(ErrorKind::OrderGap, "moment order " + std::to_string(j) + " out of range");
    seen[static_cast<std::size_t>(j)] = true;
  }
  int k = 0;
  while (k < 4 && seen[static_cast<std::size_t>(k + 1)]) ++k;
  for (int j = k + 1; j <= 4; ++j) {
    if (seen[static_cast<std::size_t>(j)]) {
      raise(ErrorKind::OrderGap, "orders must form a prefix {1..k}; order " + std::to_string(j) +
                                     " requested without " + std::to_string(k + 1));
    }
  }
  return MomentOrders(k);
}

// ---- raw statistics -------------------------------------------------------------

double sample_moment(std::span<const double> x, int order) {
  require_size(x, 1, "sample_moment");
  double s = 0.0;
  for (double v : x) {
    double p = 1.0;
    for (int j = 0; j < order; ++j) p *= v;
    s += p;
  }
  return s / static_cast<double>(x.size());
}

double mean(std::span<const double> x) { return sample_moment(x, 1); }

double variance(std::span<const double> x) {
  require_size(x, 1, "variance");
  return central_moments(x).m2;
}

double skewness(std::span<const double> x) {
  require_size(x, 2, "skewness");
  const Central c = central_moments(x);
  return c.m3 / std::pow(c.m2, 1.5);
}

double kurtosis(std::span<const double> x) {
  require_size(x, 2, "kurtosis");
  const Central c = central_moments(x);
  return c.m4 / (c.m2 * c.m2);
}

bool is_degenerate(std::span<const double> x) {
  if (x.empty()) return true;
  const Central c = central_moments(x);
  const double ms = c.m2 + c.mean * c.mean;
  return !(c.m2 > kDegenerateVariance * ms) || !(c.m2 > 0.0);
}

// ---- gradients ------------------------------------------------------------------

std::vector<double> moment_gradient(std::span<const double> x, int order) {
  const double scale = static_cast<double>(order) / static_cast<double>(x.size());
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) g[i] = scale * std::pow(x[i], order - 1);
  return g;
}

std::vector<double> mean_gradient(std::span<const double> x) { return moment_gradient(x, 1); }

std::vector<double> variance_gradient(std::span<const double> x) {
  const Central c = central_moments(x);
  const double scale = 2.0 / static_cast<double>(x.size());
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) g[i] = scale * (x[i] - c.mean);
  return g;
}

std::vector<double> skewness_gradient(std::span<const double> x) {
  const Central c = central_moments(x);
  const double sigma = std::sqrt(c.m2);
  const double skew = c.m3 / (c.m2 * sigma);
  const double scale = 3.0 / (static_cast<double>(x.size()) * sigma);
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double z = (x[i] - c.mean) / sigma;
    g[i] = scale * (z * z - skew * z - 1.0);
  }
  return g;
}

// ---- normalization --------------------------------------------------------------

MeanVarNormalization normalize_mean_var(const Sample& x) {
  require_size(x.values, 2, "normalize_mean_var");
  MeanVarNormalization out;
  const AffineStage st = standardize_stage(x.values, &out.mean, &out.variance);
  out.map.push(st);
  out.sample = x;
  apply_in_place(st, out.sample.values);
  apply_in_place(st, out.sample.passengers);
  return out;
}

double riccati_time(std::span<const double> x, double target_skew) {
  require_size(x, 3, "riccati_time");
  const auto [xmin, xmax] = hull(x);
  if (!(xmin < 0.0 && xmax > 0.0)) {
    raise(ErrorKind::DegenerateSample, "Riccati step needs a centered, non-constant sample");
  }
  double a = (1.0 / xmin) * (1.0 - kRiccatiMargin);
  double b = (1.0 / xmax) * (1.0 - kRiccatiMargin);

  std::vector<double> work;
  const double s_lo = skew_along_riccati(x, a, work).skew;
  const double s_hi = skew_along_riccati(x, b, work).skew;
  if (!(target_skew > s_lo && target_skew < s_hi)) {
    raise(ErrorKind::TargetUnreachable, "skewness " + std::to_string(target_skew) +
                                            " outside the reachable range (" + std::to_string(s_lo) +
                                            ", " + std::to_string(s_hi) + ")");
  }

#ifndef NDEBUG
  if (x.size() <= 4096) {
    double prev = s_lo;
    for (int i = 1; i <= 32; ++i) {
      const double s = skew_along_riccati(x, a + (b - a) * i / 33.0, work).skew;
      assert(s >= prev - 1e-12 && "skewness is not monotone along the Riccati path");
      prev = s;
    }
  }
#endif

  double t = 0.0;
  double best_t = t;
  double best_r = std::numeric_limits<double>::infinity();
  double step_prev = b - a;
  for (int iter = 0; iter < 300; ++iter) {
    const SkewAt e = skew_along_riccati(x, t, work);
    const double r = e.skew - target_skew;
    if (std::abs(r) < std::abs(best_r)) {
      best_r = r;
      best_t = t;
    }
    if (std::abs(r) <= kRiccatiTolerance) return t;
    if (r < 0.0) a = t; else b = t;
    if (b - a <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b))) break;

    double next = 0.5 * (a + b);
    if (e.slope > 0.0 && std::isfinite(e.slope)) {
      const double newton = t - r / e.slope;
      if (newton > a && newton < b && std::abs(newton - t) < 0.5 * step_prev) next = newton;
    }
    step_prev = std::abs(next - t);
    t = next;
  }
  if (std::abs(best_r) > kRiccatiAccept) {
    raise(ErrorKind::TargetUnreachable,
          "Riccati root search stopped with skewness residual " + std::to_string(best_r));
  }
  return best_t;
}

R3Normalization normalize_to_r3(const Sample& x) {
  require_size(x.values, 3, "normalize_to_r3");
  R3Normalization out;
  out.sample = x;
  std::vector<double>& v = out.sample.values;

  double mu = 0.0, var = 0.0;
  const AffineStage first = standardize_stage(v, &mu, &var);
  apply_in_place(first, v);
  out.map.push(first);
  out.features.m1 = mu;
  out.features.m2 = var;
  out.features.m3 = skewness(v);
  out.features.order = 3;

  out.t0 = riccati_time(v, 0.0);
  const auto [lo, hi] = hull(v);
  const RiccatiStage ric{out.t0, lo, hi};
  apply_in_place(ric, v);
  out.map.push(ric);

  const AffineStage last = standardize_stage(v);
  apply_in_place(last, v);
  out.map.push(last);

  for (const auto& st : out.map.stages()) apply_in_place(st, out.sample.passengers);
  return out;
}

double ortho_kurtosis(std::span<const double> x) {
  Sample s{std::vector<double>(x.begin(), x.end()), {}};
  return sample_moment(normalize_to_r3(s).sample.values, 4);
}

MomentFeatures analyze_moments(std::span<const double> x, int max_order) {
  require_size(x, 2, "analyze_moments");
  max_order = std::clamp(max_order, 1, 4);
  MomentFeatures f;
  const Central c = central_moments(x);
  f.m1 = c.mean;
  f.m2 = c.m2;
  f.order = std::min(max_order, 2);
  if (is_degenerate(x)) {
    f.degenerate = true;
    return f;
  }
  if (max_order >= 3 && x.size() >= 3) {
    f.m3 = c.m3 / std::pow(c.m2, 1.5);
    f.order = 3;
  }
  if (max_order >= 4 && x.size() >= 3) {
    f.m4 = ortho_kurtosis(x);
    f.order = 4;
  }
  return f;
}

// ---- transfer ---------------------------------------------------------------------

MomentTransfer transfer_moments(const Sample& src, const MomentFeatures& target, MomentOrders orders,
                                const TransferOptions& options) {
  require_size(src.values, 2, "transfer_moments");
  MomentTransfer out;
  MomentRecipe& recipe = out.recipe;
  recipe.target = target;

  int k = orders.count();
  if (target.degenerate) k = std::min(k, 2);
  if (k > target.order) {
    raise(ErrorKind::IncompleteTarget, "target carries " + std::to_string(target.order) +
                                           " moments but " + std::to_string(k) + " were requested");
  }

  std::vector<double> v = src.values;
  if (options.perturbation > 0.0) {
    std::mt19937_64 rng(options.perturbation_seed);
    std::uniform_real_distribution<double> noise(-options.perturbation, options.perturbation);
    for (double& e : v) e += noise(rng);
  }

  auto push = [&](const PointStage& st) {
    apply_in_place(st, v);
    recipe.map.push(st);
  };

  if (k >= 2 && is_degenerate(v)) {
    recipe.degenerate_source = true;
    k = 1;
  }
  recipe.effective_order = k;

  if (k == 1) {
    const double mu = mean(v);
    push(AffineStage{1.0, -mu});
    push(AffineStage{1.0, target.m1});
  } else if (k == 2) {
    push(standardize_stage(v));
    push(AffineStage{std::sqrt(target.m2), target.m1});
  } else if (k >= 3) {
    if (v.size() < 3) raise(ErrorKind::InvalidArgument, "skewness transfer needs at least 3 values");
    if (k == 3) {
      push(standardize_stage(v));
    } else {
      const R3Normalization r3 = normalize_to_r3(Sample{v, {}});
      recipe.t0 = r3.t0;
      for (const auto& st : r3.map.stages()) push(st);

      recipe.requested_m4 = target.m4;
      FlowResult flow = flow_to_orthokurtosis(Sample{v, {}}, target.m4, FlowOptions{.rtol = options.flow_rtol});
      recipe.target_clamped = flow.clamped;
      v = std::move(flow.sample.values);
      recipe.map.append(flow.trace);
    }
    recipe.ts = riccati_time(v, target.m3);
    const auto [lo, hi] = hull(v);
    push(RiccatiStage{recipe.ts, lo, hi});
    push(standardize_stage(v));
    push(AffineStage{std::sqrt(target.m2), target.m1});
  }

  out.sample.values = std::move(v);
  out.sample.passengers = recipe.map.applied(src.passengers);
  return out;
}

}  // namespace dst
