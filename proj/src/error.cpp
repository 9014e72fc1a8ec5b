#include "plslab/error.hpp"

#include <utility>

namespace plslab {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Shape: return "shape";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Config: return "config";
    case ErrorKind::Nyquist: return "nyquist";
    case ErrorKind::NonConvergence: return "non-convergence";
    case ErrorKind::Budget: return "budget";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message, std::string path)
    : std::runtime_error(path.empty() ? message : path + ": " + message),
      kind_(kind),
      path_(std::move(path)) {}

NonConvergenceError::NonConvergenceError(const std::string& message, double best_estimate,
                                         double residual, int iterations)
    : Error(ErrorKind::NonConvergence, message),
      best_estimate_(best_estimate),
      residual_(residual),
      iterations_(iterations) {}

}  // namespace plslab
