#include "error.hpp"

namespace silhuetta {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvalidRig: return "InvalidRig";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::EmptySilhouette: return "EmptySilhouette";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::NotClosed: return "NotClosed";
    case ErrorCode::OverlappingPrimitives: return "OverlappingPrimitives";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::DivideByZero: return "DivideByZero";
  }
  return "Unknown";
}

}  // namespace silhuetta
