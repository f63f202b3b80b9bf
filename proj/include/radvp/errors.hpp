#pragma once

#include <stdexcept>
#include <string>

namespace radvp {

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class StepSizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A marker left D(delta/2).
class SupportViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MismatchedRunError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace radvp
