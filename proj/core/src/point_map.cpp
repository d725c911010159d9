#include "dst/point_map.hpp"

#include <algorithm>
#include <cmath>

#include "dopri.hpp"

namespace dst {

namespace {

using detail::Dual;

double riccati(double t, double v) { return v / (1.0 - t * v); }

Dual riccati(double t, Dual v) {
  const double den = 1.0 - t * v.v;
  return {v.v / den, v.d / (den * den)};
}

template <class Fn>
double continued(double v, double lo, double hi, Fn&& with_slope) {
  if (v >= lo && v <= hi) return with_slope(Dual{v, 0.0}).v;
  const double edge = v < lo ? lo : hi;
  const Dual at = with_slope(Dual{edge, 1.0});
  return at.v + at.d * (v - edge);
}

}  // namespace

double apply_stage_exact(const PointStage& stage, double v) {
  return std::visit(
      [v](const auto& s) -> double {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, AffineStage>) {
          return s.scale * v + s.offset;
        } else if constexpr (std::is_same_v<S, RiccatiStage>) {
          return riccati(s.t, v);
        } else {
          return detail::flow_step_eval(s, v);
        }
      },
      stage);
}

double apply_stage(const PointStage& stage, double v) {
  return std::visit(
      [v](const auto& s) -> double {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, AffineStage>) {
          return s.scale * v + s.offset;
        } else if constexpr (std::is_same_v<S, RiccatiStage>) {
          if (v >= s.lo && v <= s.hi) return riccati(s.t, v);
          return continued(v, s.lo, s.hi, [&](Dual x) { return riccati(s.t, x); });
        } else {
          if (v >= s.lo && v <= s.hi) return detail::flow_step_eval(s, v);
          return continued(v, s.lo, s.hi, [&](Dual x) { return detail::flow_step_eval(s, x); });
        }
      },
      stage);
}

void PointMap::append(const PointMap& other) {
  stages_.insert(stages_.end(), other.stages_.begin(), other.stages_.end());
}

double PointMap::operator()(double v) const {
  for (const auto& s : stages_) v = apply_stage(s, v);
  return v;
}

void PointMap::apply(std::span<double> values) const {
  for (const auto& s : stages_) {
    for (double& v : values) v = apply_stage(s, v);
  }
}

std::vector<double> PointMap::applied(std::span<const double> values) const {
  std::vector<double> out(values.begin(), values.end());
  apply(out);
  return out;
}

bool PointMap::all_finite() const noexcept {
  auto fin = [](double x) { return std::isfinite(x); };
  return std::all_of(stages_.begin(), stages_.end(), [&](const PointStage& st) {
    return std::visit(
        [&](const auto& s) {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, AffineStage>) {
            return fin(s.scale) && fin(s.offset);
          } else if constexpr (std::is_same_v<S, RiccatiStage>) {
            return fin(s.t) && fin(s.lo) && fin(s.hi);
          } else {
            bool ok = fin(s.h) && fin(s.speed) && fin(s.lo) && fin(s.hi);
            for (const auto& c : s.coef) ok = ok && fin(c[0]) && fin(c[1]) && fin(c[2]);
            return ok;
          }
        },
        st);
  });
}

}  // namespace dst
