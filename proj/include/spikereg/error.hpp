#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spikereg {

enum class ErrorCode {
  EmptyChannel,
  NonFiniteInput,
  NonFiniteCurrent,
  ShapeMismatch,
  ZeroSteps,
  EmptyGrid,
  CallbackFailure,
  AllNeuronsPruned,
  NotTrained,
  InvalidThreshold,
  EmptyGallery,
  DimensionMismatch,
  InvalidConfig,
  LabelCountMismatch,
  ParseError,
  MissingLabel,
  MixedChannelCounts,
  InvalidSpec,
  EmptyMatrix,
  ClassWithFewerThanKSamples,
  DegenerateSplit,
  InsufficientData,
  SnapshotVersionMismatch,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (and tests) can branch on the kind without parsing messages.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptyChannel: return "EmptyChannel";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::NonFiniteCurrent: return "NonFiniteCurrent";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::ZeroSteps: return "ZeroSteps";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::CallbackFailure: return "CallbackFailure";
    case ErrorCode::AllNeuronsPruned: return "AllNeuronsPruned";
    case ErrorCode::NotTrained: return "NotTrained";
    case ErrorCode::InvalidThreshold: return "InvalidThreshold";
    case ErrorCode::EmptyGallery: return "EmptyGallery";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::LabelCountMismatch: return "LabelCountMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::MissingLabel: return "MissingLabel";
    case ErrorCode::MixedChannelCounts: return "MixedChannelCounts";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
    case ErrorCode::ClassWithFewerThanKSamples: return "ClassWithFewerThanKSamples";
    case ErrorCode::DegenerateSplit: return "DegenerateSplit";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::SnapshotVersionMismatch: return "SnapshotVersionMismatch";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace spikereg
