#pragma once

// Uniform-in-lambda lower bound for
//
//   H_lambda = c(lambda) (Lambda_s - lambda)^2 + chi_{U_delta(E)},
//   Lambda_s = (|xi|^2 + 1)^{s/2},  c(lambda) = (1 + lambda)^{2/s - 2},
//
// acting on Fourier coefficients over the whole lattice (FFT ordering).
//
// Per lambda the spectrum is truncated to S = {m : c (sigma_m - lambda)^2 <= K}.
// With T the diagonal part and X = P chi P (0 <= X <= I), H restricted to S^c
// is >= K and the S / S^c coupling has norm <= 1/2, so
//
//   lambda_min(H) >= (a + K) / 2 - sqrt(((K - a) / 2)^2 + 1/4),  a = lambda_min(H_SS),
//
// while lambda_min(H) <= a. Both ends are reported; c_star uses the lower one.

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "plslab/geometry.hpp"
#include "plslab/lattice.hpp"
#include "plslab/observability.hpp"

namespace plslab {

double resolvent_weight(double lambda, double s);

/// Largest admissible gap after lambda: 0.5 (1 + lambda)^{1 - 1/s}.
double lambda_spacing(double lambda, double s);
/// 0 = l_0 < l_1 < ... < l_n = lambda_max with maximal admissible steps.
std::vector<double> lambda_grid(double lambda_max, double s);
/// Error(Config) naming the first offending gap.
void check_lambda_grid(std::span<const double> lambdas, double s);

/// Certified lower bound from the truncated minimum a and cutoff K.
double truncation_lower_bound(double a, double cutoff);

class ResolventProblem {
 public:
  ResolventProblem(const TorusGrid& grid, double s, const SetSpec& set, double delta);
  ResolventProblem(const TorusGrid& grid, double s, Mask observed);

  const TorusGrid& grid() const noexcept { return concentration_->grid(); }
  double order() const noexcept { return s_; }
  double delta() const noexcept { return delta_; }
  const ConcentrationProblem& concentration() const noexcept { return *concentration_; }
  std::span<const double> symbol() const noexcept { return symbol_; }

  /// c (sigma_m - lambda)^2 per lattice mode.
  std::vector<double> diagonal(double lambda) const;

 private:
  std::shared_ptr<ConcentrationProblem> concentration_;
  double s_;
  double delta_ = 0.0;
  std::vector<double> symbol_;
};

/// out = H_lambda in, both over all lattice coefficients.
void resolvent_matvec(const ResolventProblem& problem, double lambda, std::span<const cplx> in, std::span<cplx> out);
ComplexField resolvent_matvec(const ResolventProblem& problem, double lambda, std::span<const cplx> in);

struct ResolventOptions {
  double tol = 1e-10;
  int max_iter = 1000;
  std::uint64_t seed = 1;
  double cutoff = 50.0;          // K
  std::size_t dense_cap = 2048;  // per coupling block
};

struct ResolventRow {
  double lambda = 0.0;
  double weight = 0.0;
  double upper = 0.0;  // lambda_min of the truncated problem
  double lower = 0.0;  // certified bound for the full lattice problem
  double residual = 0.0;
  int iterations = 0;
  std::size_t band_size = 0;
  std::size_t blocks = 0;
  std::string method;
  double seconds = 0.0;
};

struct ResolventBound {
  std::vector<ResolventRow> rows;
  double c_star = 0.0;  // min of the certified lower bounds
  double argmin = 0.0;
  double constant = 0.0;  // 1 / c_star
  double c_star_upper = 0.0;  // min of the truncated minima; bounds the true value from above
  double argmin_upper = 0.0;
};

/// Smallest eigenvalue of H_lambda at one lambda.
ResolventRow resolvent_eigenvalue(const ResolventProblem& problem, double lambda, const ResolventOptions& options = {});

/// Rows in grid order (parallel across lambda). NonConvergenceError names the
/// offending lambda. The grid must pass check_lambda_grid.
ResolventBound uniform_lower_bound(const ResolventProblem& problem, std::span<const double> lambdas,
                                   const ResolventOptions& options = {});

}  // namespace plslab
