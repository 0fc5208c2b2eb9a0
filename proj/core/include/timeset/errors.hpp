#pragma once

#include <stdexcept>
#include <string>

namespace timeset {

enum class ErrorKind {
  OffsetMismatch,
  DanglingReference,
  UnknownLabel,
  OverlappingSpans,
  MissingPair,
  ManifestError,
  TooFewEvents,
  InsufficientDevDocs,
  BudgetExceeded,
  MissingSlot,
  CyclicGraph,
  UnknownEvent,
  CacheMiss,
  MixedFormulations,
  Transient,
  Permanent,
  Timeout,
  MissingSource,
  FormatError,
  ConfigError,
};

const char* to_string(ErrorKind kind);

class TimesetError : public std::runtime_error {
 public:
  TimesetError(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace timeset
