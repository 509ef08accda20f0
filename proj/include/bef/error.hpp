#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bef {

enum class ErrorCode {
  UnsupportedFamily,
  BridgeTooSmall,
  OutOfRange,
  DimensionMismatch,
  InvalidTerm,
  NoConvergence,
  DegenerateGround,
  TooLarge,
  RegionTooLarge,
  NotPSD,
  OutOfDomain,
  InsufficientPoints,
  SiteCollision,
  GeometryTooSmall,
  UnsupportedOrdering,
  EtaTooLarge,
  ConfigParse,
  BudgetExceeded,
  MissingInput,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so that
/// callers (and the CLI exit-code mapping) can branch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace bef
