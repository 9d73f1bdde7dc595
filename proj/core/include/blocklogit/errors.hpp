#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace blocklogit {

// The CLI maps error kinds to exit codes: Validation -> 1, Estimation -> 2.
enum class ErrorKind { Validation, Estimation };

// All library failures are thrown as Error with a module-qualified code,
// e.g. "logit/RankDeficient" or "tabular/MissingColumn".
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message),
        kind_(kind),
        code_(std::move(code)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& code() const noexcept { return code_; }

 private:
  ErrorKind kind_;
  std::string code_;
};

[[noreturn]] inline void fail_validation(const std::string& code,
                                         const std::string& message) {
  throw Error(ErrorKind::Validation, code, message);
}

[[noreturn]] inline void fail_estimation(const std::string& code,
                                         const std::string& message) {
  throw Error(ErrorKind::Estimation, code, message);
}

}  // namespace blocklogit
