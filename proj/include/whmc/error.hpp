#pragma once

#include <stdexcept>
#include <string>

namespace whmc {

enum class ErrorKind {
  kInvalidState,
  kIntegrationFailure,
  kNumerical,
  kNoConvergence,
  kConfig,
  kProtocol,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace whmc
