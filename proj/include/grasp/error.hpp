#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace grasp {

enum class ErrorKind {
  // io
  MissingKey,
  UnsupportedFormat,
  MalformedLine,
  LengthMismatch,
  SchemaError,
  InvalidRecording,
  // preprocess
  InvalidBand,
  UnknownChannel,
  InvalidFactor,
  WindowOutOfRange,
  // gating
  WindowTooLarge,
  EmptyBaseline,
  BadLength,
  // csp / lda
  DegenerateEpoch,
  SingularComposite,
  SingularCovariance,
  MissingClass,
  ShapeMismatch,
  // evaluate / synth / cli
  TooFewTrials,
  InvalidSpec,
  InvalidConfig,
  IoFailure,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MissingKey: return "MissingKey";
    case ErrorKind::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorKind::MalformedLine: return "MalformedLine";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::InvalidRecording: return "InvalidRecording";
    case ErrorKind::InvalidBand: return "InvalidBand";
    case ErrorKind::UnknownChannel: return "UnknownChannel";
    case ErrorKind::InvalidFactor: return "InvalidFactor";
    case ErrorKind::WindowOutOfRange: return "WindowOutOfRange";
    case ErrorKind::WindowTooLarge: return "WindowTooLarge";
    case ErrorKind::EmptyBaseline: return "EmptyBaseline";
    case ErrorKind::BadLength: return "BadLength";
    case ErrorKind::DegenerateEpoch: return "DegenerateEpoch";
    case ErrorKind::SingularComposite: return "SingularComposite";
    case ErrorKind::SingularCovariance: return "SingularCovariance";
    case ErrorKind::MissingClass: return "MissingClass";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::TooFewTrials: return "TooFewTrials";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

/// Every failure raised by the library. The kind is stable and machine
/// readable; the message carries human context (key names, line numbers).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind), message_(message) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// The message without the kind prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorKind kind_;
  std::string message_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace grasp
