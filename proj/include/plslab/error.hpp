#pragma once

#include <stdexcept>
#include <string>

namespace plslab {

enum class ErrorKind {
  Shape,           // array/grid mismatch
  Domain,          // parameter outside its admissible range
  Config,          // invalid or missing configuration entry
  Nyquist,         // spectral region does not fit the frequency lattice
  NonConvergence,  // eigensolver hit max_iter
  Budget,          // requested work exceeds a guard
  Io,
};

const char* to_string(ErrorKind kind);

/// Structured error carrying a category and, for configuration problems, the
/// dotted path of the offending entry (e.g. "grid.N").
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::string path = {});

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& path() const noexcept { return path_; }

 private:
  ErrorKind kind_;
  std::string path_;
};

/// Thrown when an iterative eigensolve exhausts its iteration budget. Carries
/// the best estimate available at that point.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& message, double best_estimate, double residual,
                      int iterations);

  double best_estimate() const noexcept { return best_estimate_; }
  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double best_estimate_;
  double residual_;
  int iterations_;
};

}  // namespace plslab
