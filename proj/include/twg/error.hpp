#pragma once

#include <stdexcept>
#include <string>

namespace twg {

enum class ErrorKind {
  InvalidParameter,
  ConstructionFailed,
  ConditioningFailed,
  InstanceTooLarge,
  NumericFailure,
  PredictionMismatch,
  ParseError,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

  // CLI exit-code mapping: 2 config, 3 numeric, 4 construction.
  int exit_code() const {
    switch (kind_) {
      case ErrorKind::InvalidParameter:
      case ErrorKind::ParseError:
        return 2;
      case ErrorKind::NumericFailure:
      case ErrorKind::PredictionMismatch:
        return 3;
      default:
        return 4;
    }
  }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace twg
