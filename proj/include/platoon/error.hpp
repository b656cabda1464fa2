#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace platoon {

enum class ErrorKind {
  NonSquare,
  NonBinaryEntry,
  NonzeroDiagonal,
  DimensionMismatch,
  Singular,
  OutOfHorizon,
  NonFinite,
  ConfigInvalid,
  MissingBounds,
  GridMismatch,
  EmptyLog,
  ParseError,
  ValidationError,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so callers (and the
/// CLI exit-code mapping) can branch without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace platoon
