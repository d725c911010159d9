#pragma once

#include <array>
#include <span>
#include <variant>
#include <vector>

namespace dst {

/// v -> scale * v + offset
struct AffineStage {
  double scale = 1.0;
  double offset = 0.0;
};

/// v -> v / (1 - t v), the closed-form solution of the skewness Riccati flow.
/// [lo, hi] is the hull of the sample the stage was fitted on.
struct RiccatiStage {
  double t = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

/// One accepted Dormand-Prince step of the projected ortho-kurtosis flow.
/// Stage i evaluates speed * (v^3 - a_i - b_i v - c_i v^2), where (a_i, b_i, c_i)
/// are the Gram-Schmidt coefficients measured on the sample at that stage.
struct FlowStage {
  static constexpr int kStages = 6;
  double h = 0.0;
  double speed = 0.0;
  std::array<std::array<double, 3>, kStages> coef{};
  double lo = 0.0;
  double hi = 0.0;
};

using PointStage = std::variant<AffineStage, RiccatiStage, FlowStage>;

/// Applies one stage to a scalar. Inside the stage hull this is the exact
/// map the sample went through; outside it the map is continued linearly
/// from the nearest hull edge (value and slope), which keeps passengers far
/// from the sample (LUT corners) finite and monotone.
[[nodiscard]] double apply_stage(const PointStage& stage, double v);

/// Exact stage map with no hull handling. Used while the sample itself is
/// being transported.
[[nodiscard]] double apply_stage_exact(const PointStage& stage, double v);

/// An ordered chain of point-wise stages: the frozen form of a transfer.
class PointMap {
 public:
  PointMap() = default;
  explicit PointMap(std::vector<PointStage> stages) : stages_(std::move(stages)) {}

  void push(PointStage stage) { stages_.push_back(std::move(stage)); }
  void append(const PointMap& other);

  [[nodiscard]] double operator()(double v) const;
  void apply(std::span<double> values) const;
  [[nodiscard]] std::vector<double> applied(std::span<const double> values) const;

  [[nodiscard]] const std::vector<PointStage>& stages() const noexcept { return stages_; }
  [[nodiscard]] bool empty() const noexcept { return stages_.empty(); }
  [[nodiscard]] std::size_t size() const noexcept { return stages_.size(); }
  [[nodiscard]] bool all_finite() const noexcept;

 private:
  std::vector<PointStage> stages_;
};

}  // namespace dst
