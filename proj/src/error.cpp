#include "breakscope/error.hpp"

namespace breakscope {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidPanel: return "InvalidPanel";
    case ErrorKind::ZeroVarianceColumn: return "ZeroVarianceColumn";
    case ErrorKind::RankRequestTooLarge: return "RankRequestTooLarge";
    case ErrorKind::EigenFailure: return "EigenFailure";
    case ErrorKind::EmptySegment: return "EmptySegment";
    case ErrorKind::SegmentTooShort: return "SegmentTooShort";
    case ErrorKind::InfeasibleSpacing: return "InfeasibleSpacing";
    case ErrorKind::InvalidConfiguration: return "InvalidConfiguration";
    case ErrorKind::TooFewObservations: return "TooFewObservations";
    case ErrorKind::RegimeTooShort: return "RegimeTooShort";
    case ErrorKind::SchemeArityMismatch: return "SchemeArityMismatch";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::MissingData: return "MissingData";
    case ErrorKind::RaggedRows: return "RaggedRows";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

ErrorClass classify(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::RankRequestTooLarge:
    case ErrorKind::InfeasibleSpacing:
    case ErrorKind::InvalidConfiguration:
    case ErrorKind::SchemeArityMismatch:
      return ErrorClass::Usage;
    case ErrorKind::EigenFailure:
      return ErrorClass::Numerical;
    default:
      return ErrorClass::Data;
  }
}

int exit_code(ErrorClass cls) noexcept {
  switch (cls) {
    case ErrorClass::Usage: return 2;
    case ErrorClass::Data: return 3;
    case ErrorClass::Numerical: return 4;
  }
  return 1;
}

}  // namespace breakscope
