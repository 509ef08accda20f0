#include "bef/error.hpp"

namespace bef {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnsupportedFamily: return "UnsupportedFamily";
    case ErrorCode::BridgeTooSmall: return "BridgeTooSmall";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidTerm: return "InvalidTerm";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DegenerateGround: return "DegenerateGround";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::RegionTooLarge: return "RegionTooLarge";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::InsufficientPoints: return "InsufficientPoints";
    case ErrorCode::SiteCollision: return "SiteCollision";
    case ErrorCode::GeometryTooSmall: return "GeometryTooSmall";
    case ErrorCode::UnsupportedOrdering: return "UnsupportedOrdering";
    case ErrorCode::EtaTooLarge: return "EtaTooLarge";
    case ErrorCode::ConfigParse: return "ConfigParse";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::MissingInput: return "MissingInput";
  }
  return "Unknown";
}

}  // namespace bef
