#pragma once

#include <stdexcept>
#include <string>

namespace ensemble {

/// Coarse failure category; the CLI maps each to a distinct exit code.
enum class ErrorKind {
  Usage,       ///< bad invocation or configuration
  Validation,  ///< input violates a domain constraint (shape, range, label)
  Data,        ///< unreadable or malformed file, missing coverage
  Runtime,     ///< training or evaluation could not proceed
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define ENSEMBLE_ERROR_TYPE(Name, Kind)                                  \
  class Name : public Error {                                            \
   public:                                                               \
    explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {} \
  }

ENSEMBLE_ERROR_TYPE(DimensionError, Validation);
ENSEMBLE_ERROR_TYPE(PairingError, Validation);
ENSEMBLE_ERROR_TYPE(DomainError, Validation);
ENSEMBLE_ERROR_TYPE(LabelError, Validation);
ENSEMBLE_ERROR_TYPE(SingularModeError, Validation);
ENSEMBLE_ERROR_TYPE(FormatError, Data);
ENSEMBLE_ERROR_TYPE(ParseError, Data);
ENSEMBLE_ERROR_TYPE(CoverageError, Data);
ENSEMBLE_ERROR_TYPE(IoError, Data);
ENSEMBLE_ERROR_TYPE(EmptyEvaluationError, Runtime);
ENSEMBLE_ERROR_TYPE(DegenerateRocError, Runtime);
ENSEMBLE_ERROR_TYPE(DegenerateTrainingError, Runtime);
ENSEMBLE_ERROR_TYPE(StratificationError, Runtime);
ENSEMBLE_ERROR_TYPE(UsageError, Usage);

#undef ENSEMBLE_ERROR_TYPE

}  // namespace ensemble
