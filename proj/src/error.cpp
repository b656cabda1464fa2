#include "platoon/error.hpp"

namespace platoon {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonSquare: return "NonSquare";
    case ErrorKind::NonBinaryEntry: return "NonBinaryEntry";
    case ErrorKind::NonzeroDiagonal: return "NonzeroDiagonal";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::Singular: return "Singular";
    case ErrorKind::OutOfHorizon: return "OutOfHorizon";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::MissingBounds: return "MissingBounds";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::EmptyLog: return "EmptyLog";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace platoon
