#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dst {

enum class ErrorKind {
  DegenerateSample,
  TargetUnreachable,
  PoleCollision,
  RankDeficient,
  StepFailure,
  OrderGap,
  IncompleteTarget,
  DimensionMismatch,
  FitDivergence,
  BlackImage,
  NegativeInput,
  RecipeIncomplete,
  ParseError,
  SizeMismatch,
  UnsupportedFormat,
  CorruptFile,
  OutOfBounds,
  InvalidArgument,
};

[[nodiscard]] std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library. `stage` and `channel` are filled in
/// by the pipeline as the error propagates outward, so a CLI or HTTP caller
/// can say where a transfer broke ("moments/I: TargetUnreachable ...").
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
  [[nodiscard]] const std::string& detail() const noexcept { return detail_; }
  [[nodiscard]] const std::string& stage() const noexcept { return stage_; }
  [[nodiscard]] const std::string& channel() const noexcept { return channel_; }

  /// Returns a copy annotated with stage/channel (existing values are kept).
  [[nodiscard]] Error with_context(std::string_view stage, std::string_view channel = {}) const;

 private:
  ErrorKind kind_;
  std::string detail_;
  std::string stage_;
  std::string channel_;
};

[[noreturn]] void raise(ErrorKind kind, const std::string& message);

}  // namespace dst
