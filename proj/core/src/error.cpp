#include "dst/error.hpp"

namespace dst {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::DegenerateSample: return "DegenerateSample";
    case ErrorKind::TargetUnreachable: return "TargetUnreachable";
    case ErrorKind::PoleCollision: return "PoleCollision";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::StepFailure: return "StepFailure";
    case ErrorKind::OrderGap: return "OrderGap";
    case ErrorKind::IncompleteTarget: return "IncompleteTarget";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::FitDivergence: return "FitDivergence";
    case ErrorKind::BlackImage: return "BlackImage";
    case ErrorKind::NegativeInput: return "NegativeInput";
    case ErrorKind::RecipeIncomplete: return "RecipeIncomplete";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::SizeMismatch: return "SizeMismatch";
    case ErrorKind::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorKind::CorruptFile: return "CorruptFile";
    case ErrorKind::OutOfBounds: return "OutOfBounds";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

namespace {

std::string compose(ErrorKind kind, std::string_view stage, std::string_view channel,
                    const std::string& detail) {
  std::string out;
  if (!stage.empty()) {
    out += stage;
    if (!channel.empty()) {
      out += '/';
      out += channel;
    }
    out += ": ";
  }
  out += to_string(kind);
  if (!detail.empty()) {
    out += ": ";
    out += detail;
  }
  return out;
}

}  // namespace

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(compose(kind, {}, {}, message)), kind_(kind), detail_(message) {}

Error Error::with_context(std::string_view stage, std::string_view channel) const {
  Error copy(kind_, detail_);
  copy.stage_ = stage_.empty() ? std::string(stage) : stage_;
  copy.channel_ = channel_.empty() ? std::string(channel) : channel_;
  static_cast<std::runtime_error&>(copy) =
      std::runtime_error(compose(kind_, copy.stage_, copy.channel_, detail_));
  return copy;
}

void raise(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace dst
