#include "rainbench/error.h"

namespace rainbench {

std::string_view error_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kMalformedStream: return "MalformedStream";
    case ErrorKind::kUnsupportedFormat: return "UnsupportedFormat";
    case ErrorKind::kSyntaxError: return "SyntaxError";
    case ErrorKind::kSchemaError: return "SchemaError";
    case ErrorKind::kVersionError: return "VersionError";
    case ErrorKind::kSampleTooLarge: return "SampleTooLarge";
    case ErrorKind::kCountMismatch: return "CountMismatch";
    case ErrorKind::kDimensionMismatch: return "DimensionMismatch";
    case ErrorKind::kChannelMismatch: return "ChannelMismatch";
    case ErrorKind::kOddWidth: return "OddWidth";
    case ErrorKind::kImageTooSmall: return "ImageTooSmall";
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kEmptyInput: return "EmptyInput";
    case ErrorKind::kMissingOutput: return "MissingOutput";
    case ErrorKind::kAmbiguousOutput: return "AmbiguousOutput";
    case ErrorKind::kPoolTooSmall: return "PoolTooSmall";
    case ErrorKind::kUnknownItem: return "UnknownItem";
    case ErrorKind::kAlreadyAnswered: return "AlreadyAnswered";
    case ErrorKind::kSessionComplete: return "SessionComplete";
    case ErrorKind::kNoCompleteSessions: return "NoCompleteSessions";
    case ErrorKind::kEmptyMatrix: return "EmptyMatrix";
    case ErrorKind::kIoError: return "IoError";
    case ErrorKind::kBindFailed: return "BindFailed";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(error_name(kind)) + ": " + detail),
      kind_(kind),
      detail_(detail) {}

}  // namespace rainbench
