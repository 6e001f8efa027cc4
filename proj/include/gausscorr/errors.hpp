#pragma once

#include <stdexcept>
#include <string>

namespace gausscorr {

enum class ErrorKind { InvalidInput, NonphysicalState, NumericalFailure };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InvalidInput : public Error {
 public:
  explicit InvalidInput(const std::string& what) : Error(ErrorKind::InvalidInput, what) {}
};

class NonphysicalState : public Error {
 public:
  explicit NonphysicalState(const std::string& what) : Error(ErrorKind::NonphysicalState, what) {}
};

class NumericalFailure : public Error {
 public:
  explicit NumericalFailure(const std::string& what) : Error(ErrorKind::NumericalFailure, what) {}
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput:
      return "invalid-input";
    case ErrorKind::NonphysicalState:
      return "nonphysical-state";
    case ErrorKind::NumericalFailure:
      return "numerical-failure";
  }
  return "unknown";
}

}  // namespace gausscorr
