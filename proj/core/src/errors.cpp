#include "timeset/errors.hpp"

namespace timeset {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::OffsetMismatch: return "OffsetMismatch";
    case ErrorKind::DanglingReference: return "DanglingReference";
    case ErrorKind::UnknownLabel: return "UnknownLabel";
    case ErrorKind::OverlappingSpans: return "OverlappingSpans";
    case ErrorKind::MissingPair: return "MissingPair";
    case ErrorKind::ManifestError: return "ManifestError";
    case ErrorKind::TooFewEvents: return "TooFewEvents";
    case ErrorKind::InsufficientDevDocs: return "InsufficientDevDocs";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::MissingSlot: return "MissingSlot";
    case ErrorKind::CyclicGraph: return "CyclicGraph";
    case ErrorKind::UnknownEvent: return "UnknownEvent";
    case ErrorKind::CacheMiss: return "CacheMiss";
    case ErrorKind::MixedFormulations: return "MixedFormulations";
    case ErrorKind::Transient: return "Transient";
    case ErrorKind::Permanent: return "Permanent";
    case ErrorKind::Timeout: return "Timeout";
    case ErrorKind::MissingSource: return "MissingSource";
    case ErrorKind::FormatError: return "FormatError";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "UnknownError";
}

void fail(ErrorKind kind, const std::string& message) {
  throw TimesetError(kind, message);
}

}  // namespace timeset
