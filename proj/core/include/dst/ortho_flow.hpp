#pragma once

#include <array>
#include <span>
#include <vector>

#include "dst/moments.hpp"
#include "dst/point_map.hpp"

namespace dst {

/// Least-squares coefficients (a, b, c) of y^3 on span{1, y, y^2}, obtained by
/// two passes of modified Gram-Schmidt. Throws RankDeficient when the basis
/// is numerically dependent.
[[nodiscard]] std::array<double, 3> cubic_projection_coefficients(std::span<const double> y);

/// Gradient of mu_4 = (1/N) sum y^4 with its components along the gradients
/// of the first three moments removed: (4/N) (y^3 - a - b y - c y^2).
[[nodiscard]] std::vector<double> projected_kurtosis_gradient(std::span<const double> y);

struct FlowOptions {
  double rtol = 1e-8;
  double atol = 1e-12;
  double initial_step = 1e-3;
  double min_step = 1e-14;
  /// Mean-square projected gradient under which the flow is considered stalled.
  double stall_threshold = 1e-24;
  int max_steps = 20000;
  double target_tolerance = 1e-12;
};

struct FlowResult {
  Sample sample;
  PointMap trace;
  double target = 0.0;  // after clamping
  bool clamped = false;
  int steps = 0;
  int rejected = 0;
  /// mu_4 after every accepted step, starting with the initial value.
  std::vector<double> mu4_history;
};

/// Lowest and highest ortho-kurtosis targets the flow accepts for a sample of size n.
[[nodiscard]] std::array<double, 2> orthokurtosis_target_range(std::size_t n);

/// Integrates the projected mu_4 gradient (sign chosen toward the target)
/// from a sample on R3 until mu_4 equals `target`, re-projecting onto R3
/// after every accepted step. The returned trace replays the same map.
[[nodiscard]] FlowResult flow_to_orthokurtosis(const Sample& y, double target, const FlowOptions& options = {});

}  // namespace dst
