#pragma once

#include <stdexcept>
#include <string>

namespace radcorr {

/// Failure categories. Each maps onto one CLI exit code.
enum class ErrorKind {
  Usage,          // bad flags, unknown subcommand
  Domain,         // argument outside an operation's admissible set
  Resonance,      // a denominator A - B cos(theta) touched zero
  Integrability,  // a form-factor norm is not finite
  Accuracy,       // a numerical method did not reach its tolerance
  Internal,       // a runtime consistency assertion failed
  Resource,       // memory budget or I/O
  Unimplemented,  // API exists but order/feature is not built
};

const char* to_string(ErrorKind kind);

/// Process exit code for an error kind: 2 usage, 3 domain, 4 accuracy, 5 resource.
int exit_code(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string module, const std::string& what)
      : std::runtime_error(what), kind_(kind), module_(std::move(module)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& module() const noexcept { return module_; }

  /// Single-line rendering: "<module>: <kind>: <message>".
  std::string line() const;

 private:
  ErrorKind kind_;
  std::string module_;
};

/// Accuracy failure that still carries the best available estimate.
class AccuracyError : public Error {
 public:
  AccuracyError(std::string module, const std::string& what, double best_estimate,
                double error_estimate)
      : Error(ErrorKind::Accuracy, std::move(module), what),
        best_estimate_(best_estimate),
        error_estimate_(error_estimate) {}

  double best_estimate() const noexcept { return best_estimate_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double best_estimate_;
  double error_estimate_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& module, const std::string& what);

}  // namespace radcorr
