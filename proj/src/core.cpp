#include "anisonorm/core.hpp"

namespace anisonorm {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Config: return "ConfigError";
    case ErrorKind::Format: return "FormatError";
    case ErrorKind::InadmissibleP: return "InadmissibleP";
    case ErrorKind::NonFiniteResult: return "NonFiniteResult";
    case ErrorKind::EmptyGrid: return "EmptyGrid";
    case ErrorKind::UnboundedFamily: return "UnboundedFamily";
    case ErrorKind::SingularOutputPoint: return "SingularOutputPoint";
    case ErrorKind::FrequencyOutOfBand: return "FrequencyOutOfBand";
    case ErrorKind::UnsupportedFamily: return "UnsupportedFamily";
    case ErrorKind::BlockDimension: return "BlockDimension";
    case ErrorKind::ZeroDenominator: return "ZeroDenominator";
    case ErrorKind::InsufficientSamples: return "InsufficientSamples";
  }
  return "Unknown";
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::Config:
    case ErrorKind::Format:
    case ErrorKind::UnsupportedFamily:
    case ErrorKind::BlockDimension:
      return 1;
    case ErrorKind::InadmissibleP:
      return 2;
    default:
      return 3;
  }
}

}  // namespace anisonorm
