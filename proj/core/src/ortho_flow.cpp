#include "dst/ortho_flow.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dopri.hpp"
#include "dst/error.hpp"

namespace dst {

namespace {

using detail::kDopriB;
using detail::kDopriBStar;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s / static_cast<double>(a.size());
}

struct Step {
  FlowStage stage;
  std::vector<double> y;
  double error = 0.0;
};

/// One Dormand-Prince step of the projected flow. Coefficients are refreshed
/// at every stage input, then the new values are produced by the same scalar
/// routine used for replay so that trace and sample agree bit for bit.
Step dopri_step(std::span<const double> y, double h, double speed, const FlowOptions& opt,
                bool with_error) {
  const std::size_t n = y.size();
  Step out;
  FlowStage& st = out.stage;
  st.h = h;
  st.speed = speed;
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  st.lo = *lo;
  st.hi = *hi;

  std::vector<std::array<double, 6>> k(n);
  std::vector<double> yi(n);
  for (int s = 0; s < FlowStage::kStages; ++s) {
    for (std::size_t e = 0; e < n; ++e) yi[e] = detail::stage_input(st, y[e], k[e], s);
    st.coef[static_cast<std::size_t>(s)] = cubic_projection_coefficients(yi);
    const auto& c = st.coef[static_cast<std::size_t>(s)];
    for (std::size_t e = 0; e < n; ++e) k[e][static_cast<std::size_t>(s)] = detail::flow_field(speed, c, yi[e]);
  }

  out.y.resize(n);
  for (std::size_t e = 0; e < n; ++e) out.y[e] = detail::flow_step_eval(st, y[e]);

  if (with_error) {
    const auto c7 = cubic_projection_coefficients(out.y);
    double acc = 0.0;
    for (std::size_t e = 0; e < n; ++e) {
      double err = 0.0;
      for (std::size_t j = 0; j < 6; ++j) err += (kDopriB[j] - kDopriBStar[j]) * k[e][j];
      err -= kDopriBStar[6] * detail::flow_field(speed, c7, out.y[e]);
      err *= h;
      const double scale = opt.atol + opt.rtol * std::max(std::abs(y[e]), std::abs(out.y[e]));
      acc += (err / scale) * (err / scale);
    }
    out.error = std::sqrt(acc / static_cast<double>(n));
  }
  return out;
}

struct Landed {
  std::vector<double> y;
  PointMap reprojection;
  double mu4 = 0.0;
};

Landed reproject(std::vector<double> y) {
  R3Normalization r3 = normalize_to_r3(Sample{std::move(y), {}});
  Landed out;
  out.y = std::move(r3.sample.values);
  out.reprojection = std::move(r3.map);
  out.mu4 = sample_moment(out.y, 4);
  return out;
}

}  // namespace

std::array<double, 3> cubic_projection_coefficients(std::span<const double> y) {
  const std::size_t n = y.size();
  if (n < 3) raise(ErrorKind::RankDeficient, "cubic projection needs at least 3 values");

  std::array<std::vector<double>, 3> q;
  std::array<std::array<double, 3>, 3> poly{};  // q_i expressed in {1, y, y^2}
  for (std::size_t j = 0; j < 3; ++j) {
    std::vector<double> v(n);
    for (std::size_t e = 0; e < n; ++e) v[e] = j == 0 ? 1.0 : j == 1 ? y[e] : y[e] * y[e];
    std::array<double, 3> pv{};
    pv[j] = 1.0;
    const double original = std::sqrt(dot(v, v));
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i < j; ++i) {
        const double r = dot(v, q[i]);
        for (std::size_t e = 0; e < n; ++e) v[e] -= r * q[i][e];
        for (std::size_t m = 0; m < 3; ++m) pv[m] -= r * poly[i][m];
      }
    }
    const double norm = std::sqrt(dot(v, v));
    if (!(norm > 1e-10 * original)) {
      raise(ErrorKind::RankDeficient, "basis {1, y, y^2} is numerically dependent");
    }
    for (double& e : v) e /= norm;
    for (double& m : pv) m /= norm;
    q[j] = std::move(v);
    poly[j] = pv;
  }

  std::vector<double> r(n);
  for (std::size_t e = 0; e < n; ++e) r[e] = y[e] * y[e] * y[e];
  std::array<double, 3> coef{};
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t i = 0; i < 3; ++i) {
      const double proj = dot(r, q[i]);
      for (std::size_t e = 0; e < n; ++e) r[e] -= proj * q[i][e];
      for (std::size_t m = 0; m < 3; ++m) coef[m] += proj * poly[i][m];
    }
  }
  return coef;
}

std::vector<double> projected_kurtosis_gradient(std::span<const double> y) {
  const auto c = cubic_projection_coefficients(y);
  const double scale = 4.0 / static_cast<double>(y.size());
  std::vector<double> g(y.size());
  for (std::size_t e = 0; e < y.size(); ++e) g[e] = scale * detail::flow_field(1.0, c, y[e]);
  return g;
}

std::array<double, 2> orthokurtosis_target_range(std::size_t n) {
  return {1.0 + 1e-6, 0.9 * static_cast<double>(n)};
}

FlowResult flow_to_orthokurtosis(const Sample& input, double target, const FlowOptions& opt) {
  if (input.values.size() < 4) raise(ErrorKind::InvalidArgument, "flow needs at least 4 values");
  FlowResult out;
  const auto range = orthokurtosis_target_range(input.values.size());
  out.target = std::clamp(target, range[0], range[1]);
  out.clamped = out.target != target;
  if (!std::isfinite(target)) raise(ErrorKind::InvalidArgument, "ortho-kurtosis target is not finite");

  std::vector<double> y = input.values;
  double mu4 = sample_moment(y, 4);
  out.mu4_history.push_back(mu4);
  const double speed = out.target > mu4 ? 4.0 : -4.0;
  double h = opt.initial_step;
  const std::string clamp_note =
      out.clamped ? " (target " + std::to_string(target) + " clamped to " + std::to_string(out.target) + ")" : "";

  auto finish = [&]() {
    out.sample.values = std::move(y);
    out.sample.passengers = out.trace.applied(input.passengers);
    return out;
  };
  if (std::abs(mu4 - out.target) <= opt.target_tolerance) return finish();

  while (true) {
    if (out.steps + out.rejected >= opt.max_steps) {
      raise(ErrorKind::StepFailure, "flow exceeded " + std::to_string(opt.max_steps) + " steps");
    }
    const auto g = projected_kurtosis_gradient(y);
    if (dot(g, g) < opt.stall_threshold) {
      raise(ErrorKind::TargetUnreachable,
            "ortho-kurtosis flow stalled at mu4 = " + std::to_string(mu4) + clamp_note);
    }
    if (h < opt.min_step) {
      raise(ErrorKind::StepFailure, "flow step size fell below " + std::to_string(opt.min_step));
    }

    Step step = dopri_step(y, h, speed, opt, true);
    if (!(step.error <= 1.0)) {
      ++out.rejected;
      const double fac = std::isfinite(step.error) ? 0.9 * std::pow(step.error, -0.2) : 0.2;
      h *= std::clamp(fac, 0.2, 1.0);
      continue;
    }

    Landed land = reproject(std::move(step.y));
    const double before = mu4 - out.target;
    const double after = land.mu4 - out.target;

    if (std::abs(after) <= opt.target_tolerance || (before > 0) != (after > 0)) {
      // Overshot (or landed): shrink this last step until mu4 hits the target.
      double a = 0.0, fa = before;
      double b = h, fb = after;
      Step best_step = std::move(step);
      Landed best = std::move(land);
      int side = 0;
      for (int it = 0; it < 200 && std::abs(fb) > opt.target_tolerance; ++it) {
        const double c = (a * fb - b * fa) / (fb - fa);
        const double hc = (c > a && c < b) ? c : 0.5 * (a + b);
        Step trial = dopri_step(y, hc, speed, opt, false);
        Landed lt = reproject(trial.y);
        const double fc = lt.mu4 - out.target;
        if (std::abs(fc) < std::abs(fb) || std::abs(fc) <= opt.target_tolerance) {
          best_step = std::move(trial);
          best = lt;
        }
        if ((fc > 0) == (fb > 0)) {
          b = hc;
          fb = fc;
          if (side == -1) fa *= 0.5;
          side = -1;
        } else {
          a = hc;
          fa = fc;
          if (side == 1) fb *= 0.5;
          side = 1;
        }
        if (std::abs(fc) <= opt.target_tolerance) break;
        if (b - a <= 1e-15 * h) break;
      }
      out.trace.push(best_step.stage);
      out.trace.append(best.reprojection);
      y = std::move(best.y);
      mu4 = best.mu4;
      ++out.steps;
      out.mu4_history.push_back(mu4);
      return finish();
    }

    out.trace.push(step.stage);
    out.trace.append(land.reprojection);
    y = std::move(land.y);
    if ((speed > 0) != (land.mu4 > mu4)) {
      raise(ErrorKind::TargetUnreachable, "ortho-kurtosis flow stopped moving toward the target" + clamp_note);
    }
    mu4 = land.mu4;
    ++out.steps;
    out.mu4_history.push_back(mu4);

    const double fac = step.error > 0 ? 0.9 * std::pow(step.error, -0.2) : 5.0;
    h *= std::clamp(fac, 0.2, 5.0);
  }
}

}  // namespace dst
