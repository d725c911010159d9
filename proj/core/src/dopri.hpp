#pragma once

// Dormand-Prince 5(4) tableau and the scalar step evaluation shared by the
// flow integrator and by passenger replay.

#include <array>

#include "dst/point_map.hpp"

namespace dst::detail {

inline constexpr std::array<std::array<double, 6>, 7> kDopriA{{
    {0, 0, 0, 0, 0, 0},
    {1.0 / 5.0, 0, 0, 0, 0, 0},
    {3.0 / 40.0, 9.0 / 40.0, 0, 0, 0, 0},
    {44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0, 0, 0},
    {19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0, 0},
    {9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0},
    {35.0 / 384.0, 0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0},
}};

// Fifth-order weights (row 7 of A); k7 only enters the error estimate.
inline constexpr std::array<double, 7> kDopriB{
    35.0 / 384.0, 0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0};
inline constexpr std::array<double, 7> kDopriBStar{
    5179.0 / 57600.0, 0,          7571.0 / 16695.0, 393.0 / 640.0,
    -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0};

/// Value with a first derivative, for slope-matched continuation.
struct Dual {
  double v;
  double d;
};

inline Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
inline Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
inline Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
inline Dual operator*(double s, Dual a) { return {s * a.v, s * a.d}; }
inline Dual operator+(Dual a, double s) { return {a.v + s, a.d}; }

template <class T>
inline T flow_field(double speed, const std::array<double, 3>& c, T y) {
  // speed * (y^3 - a - b y - c y^2), evaluated as a Horner polynomial
  return speed * (((y + (-c[2])) * y + (-c[1])) * y + (-c[0]));
}

template <class T>
inline T stage_input(const FlowStage& s, T v, const std::array<T, 6>& k, int stage) {
  T acc = v;
  if (stage == 0) return acc;
  T sum = kDopriA[stage][0] * k[0];
  for (int j = 1; j < stage; ++j) sum = sum + kDopriA[stage][j] * k[j];
  return acc + s.h * sum;
}

template <class T>
inline T flow_step_eval(const FlowStage& s, T v) {
  std::array<T, 6> k{};
  for (int i = 0; i < FlowStage::kStages; ++i) {
    k[i] = flow_field(s.speed, s.coef[i], stage_input(s, v, k, i));
  }
  T sum = kDopriB[0] * k[0];
  for (int j = 1; j < 6; ++j) sum = sum + kDopriB[j] * k[j];
  return v + s.h * sum;
}

}  // namespace dst::detail
