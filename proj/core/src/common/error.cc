#include "eval3d/common/error.h"

namespace eval3d {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo: return "io";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kEmptyMesh: return "empty_mesh";
    case ErrorCode::kDegenerateMesh: return "degenerate_mesh";
    case ErrorCode::kBadMagic: return "bad_magic";
    case ErrorCode::kBadVersion: return "bad_version";
    case ErrorCode::kBadDtype: return "bad_dtype";
    case ErrorCode::kShortPayload: return "short_payload";
    case ErrorCode::kShapeContract: return "shape_contract";
    case ErrorCode::kBackendFailed: return "backend_failed";
    case ErrorCode::kBackendTimeout: return "backend_timeout";
    case ErrorCode::kStubLookupMiss: return "stub_lookup_miss";
    case ErrorCode::kInvertedDepth: return "inverted_depth";
    case ErrorCode::kInsufficientData: return "insufficient_data";
    case ErrorCode::kDisconnectedGraph: return "disconnected_graph";
  }
  return "unknown";
}

}  // namespace eval3d
