#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mltrust {

enum class ErrorCode {
  kInvariantViolation,
  kUnknownLayer,
  kUnsupportedLayerPair,
  kNegativePriority,
  kIntraLayerBlock,
  kInvalidConfig,
  kDimensionMismatch,
  kLengthMismatch,
  kTooFewSamples,
  kKTooLarge,
  kIdUniverseMismatch,
  kEmptyTable,
  kOutOfShape,
  kMalformedRow,
  kMissingColumn,
  kOutOfRange,
  kIoError,
  kSchemaVersion,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries a machine-checkable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mltrust
