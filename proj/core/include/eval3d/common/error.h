#pragma once

#include <stdexcept>
#include <string>

namespace eval3d {

enum class ErrorCode {
  kIo,
  kParse,
  kInvalidArgument,
  kEmptyMesh,
  kDegenerateMesh,
  kBadMagic,
  kBadVersion,
  kBadDtype,
  kShortPayload,
  kShapeContract,
  kBackendFailed,
  kBackendTimeout,
  kStubLookupMiss,
  kInvertedDepth,
  kInsufficientData,
  kDisconnectedGraph,
};

const char* ErrorCodeName(ErrorCode code);

// Every failure surfaced by the library is an Error; the code lets callers
// branch without parsing the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace eval3d
