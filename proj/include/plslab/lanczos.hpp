#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include "plslab/lattice.hpp"

namespace plslab {

/// out = A in for a Hermitian operator A on C^n.
using LinearOperator = std::function<void(std::span<const cplx> in, std::span<cplx> out)>;

struct LanczosOptions {
  double tol = 1e-10;
  int max_iter = 500;
  std::uint64_t seed = 1;
  /// Known bound on ||A|| for the residual test; 0 uses the largest Ritz value.
  double norm_bound = 0.0;
};

struct LanczosResult {
  double value = 0.0;       // largest eigenvalue
  ComplexField vector;      // unit Ritz vector
  double residual = 0.0;    // ||A v - value v||, recomputed with a final matvec
  int iterations = 0;
  bool invariant = false;   // Krylov space became invariant before max_iter
};

/// Largest eigenpair of a Hermitian operator by Lanczos with full
/// reorthogonalization and a seeded random start. Stops when the Ritz
/// residual estimate drops below tol * ||A||. Throws NonConvergenceError
/// after max_iter iterations.
LanczosResult lanczos_largest(std::size_t n, const LinearOperator& op, const LanczosOptions& options);

}  // namespace plslab
