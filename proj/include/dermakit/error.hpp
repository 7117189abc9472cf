#pragma once

#include <stdexcept>
#include <string>

namespace dermakit {

enum class ErrorKind {
  // container parsing
  BadMagic,
  UnsupportedDtype,
  HeaderMalformed,
  PayloadTruncated,
  NotAZip,
  UnsupportedCompression,
  CorruptArchive,
  MissingKey,
  ShapeMismatch,
  LabelOutOfRange,
  // statistics
  EmptyClass,
  EmptyInput,
  ConstantInput,
  LengthMismatch,
  UnknownClass,
  // selection / clustering
  TooFewPoints,
  ClassTooSmall,
  IndexOutOfRange,
  // embedding
  DegenerateRow,
  NonSymmetric,
  NanInput,
  // network / training
  DegenerateBatch,
  NonFiniteValue,
  NonFiniteLoss,
  // general
  IoFailure,
  InvalidArgument,
};

inline const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::BadMagic: return "BadMagic";
    case ErrorKind::UnsupportedDtype: return "UnsupportedDtype";
    case ErrorKind::HeaderMalformed: return "HeaderMalformed";
    case ErrorKind::PayloadTruncated: return "PayloadTruncated";
    case ErrorKind::NotAZip: return "NotAZip";
    case ErrorKind::UnsupportedCompression: return "UnsupportedCompression";
    case ErrorKind::CorruptArchive: return "CorruptArchive";
    case ErrorKind::MissingKey: return "MissingKey";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::LabelOutOfRange: return "LabelOutOfRange";
    case ErrorKind::EmptyClass: return "EmptyClass";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::ConstantInput: return "ConstantInput";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::UnknownClass: return "UnknownClass";
    case ErrorKind::TooFewPoints: return "TooFewPoints";
    case ErrorKind::ClassTooSmall: return "ClassTooSmall";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::DegenerateRow: return "DegenerateRow";
    case ErrorKind::NonSymmetric: return "NonSymmetric";
    case ErrorKind::NanInput: return "NanInput";
    case ErrorKind::DegenerateBatch: return "DegenerateBatch";
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorKind::IoFailure: return "IoFailure";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "UnknownError";
}

/// Toolkit-wide exception. Carries a machine-checkable kind next to the
/// human-readable message; the CLI maps kinds to exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + msg),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) {
  throw Error(kind, msg);
}

/// Parse-level failures of the input containers. The CLI exits with code 2
/// for these and code 1 for everything else.
inline bool is_parse_error(ErrorKind k) {
  switch (k) {
    case ErrorKind::BadMagic:
    case ErrorKind::UnsupportedDtype:
    case ErrorKind::HeaderMalformed:
    case ErrorKind::PayloadTruncated:
    case ErrorKind::NotAZip:
    case ErrorKind::UnsupportedCompression:
    case ErrorKind::CorruptArchive:
    case ErrorKind::MissingKey:
    case ErrorKind::ShapeMismatch:
    case ErrorKind::LabelOutOfRange:
      return true;
    default:
      return false;
  }
}

}  // namespace dermakit
