#include "whmc/error.hpp"

namespace whmc {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidState: return "invalid-state";
    case ErrorKind::kIntegrationFailure: return "integration-failure";
    case ErrorKind::kNumerical: return "numerical";
    case ErrorKind::kNoConvergence: return "no-convergence";
    case ErrorKind::kConfig: return "configuration";
    case ErrorKind::kProtocol: return "protocol";
  }
  return "unknown";
}

}  // namespace whmc
