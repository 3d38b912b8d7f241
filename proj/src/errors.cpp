#include "tow/errors.hpp"

namespace tow {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidExponent: return "InvalidExponent";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorKind::OutOfDomain: return "OutOfDomain";
    case ErrorKind::NotConverged: return "NotConverged";
    case ErrorKind::MismatchedProblems: return "MismatchedProblems";
    case ErrorKind::ExponentOutOfRange: return "ExponentOutOfRange";
    case ErrorKind::DegenerateDecomposition: return "DegenerateDecomposition";
    case ErrorKind::DegenerateGradient: return "DegenerateGradient";
    case ErrorKind::SamplerStall: return "SamplerStall";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::UnknownKey: return "UnknownKey";
    case ErrorKind::RangeError: return "RangeError";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::NonFinite: return "NonFinite";
  }
  return "Unknown";
}

}  // namespace tow
