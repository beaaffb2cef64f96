#pragma once

#include <stdexcept>
#include <string>

namespace tdscat {

// Exceptions carry the module that raised them so the CLI can print
// "module: message" and map the category onto an exit code.
class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string& what)
      : std::runtime_error(module + ": " + what), module_(std::move(module)) {}
  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

// Malformed or unknown configuration input (exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A physics or numerical precondition does not hold (exit code 3).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// An iterative or quadrature procedure failed to converge (exit code 4).
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace tdscat
