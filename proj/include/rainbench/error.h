#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rainbench {

enum class ErrorKind {
  kMalformedStream,
  kUnsupportedFormat,
  kSyntaxError,
  kSchemaError,
  kVersionError,
  kSampleTooLarge,
  kCountMismatch,
  kDimensionMismatch,
  kChannelMismatch,
  kOddWidth,
  kImageTooSmall,
  kInvalidArgument,
  kEmptyInput,
  kMissingOutput,
  kAmbiguousOutput,
  kPoolTooSmall,
  kUnknownItem,
  kAlreadyAnswered,
  kSessionComplete,
  kNoCompleteSessions,
  kEmptyMatrix,
  kIoError,
  kBindFailed,
};

/// Stable identifier printed by the CLI, e.g. "MissingOutput".
std::string_view error_name(ErrorKind kind);

// All domain failures surface as this type; callers switch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail);

  ErrorKind kind() const noexcept { return kind_; }
  std::string_view name() const { return error_name(kind_); }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace rainbench
