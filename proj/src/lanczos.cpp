#include "plslab/lanczos.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "plslab/error.hpp"

namespace plslab {
namespace {

void axpy(cplx a, std::span<const cplx> x, std::span<cplx> y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

}  // namespace

LanczosResult lanczos_largest(std::size_t n, const LinearOperator& op, const LanczosOptions& options) {
  if (!(options.tol > 0.0)) throw Error(ErrorKind::Domain, "eigensolver tolerance must be positive");
  if (options.max_iter < 1) throw Error(ErrorKind::Domain, "max_iter must be at least 1");
  if (n == 0) throw Error(ErrorKind::Shape, "operator dimension is zero");

  const auto kmax = static_cast<std::size_t>(std::min<std::size_t>(n, options.max_iter));
  std::vector<ComplexField> basis;
  basis.reserve(kmax);
  std::vector<double> alpha, beta;

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss;
  ComplexField v(n);
  for (auto& z : v) z = {gauss(rng), gauss(rng)};
  const double v0 = l2_norm(v);
  for (auto& z : v) z /= v0;

  ComplexField w(n);
  double theta = 0.0, estimate = std::numeric_limits<double>::infinity();
  Eigen::VectorXd ritz;
  bool invariant = false;
  int iterations = 0;

  for (std::size_t k = 0; k < kmax; ++k) {
    basis.push_back(v);
    op(basis.back(), w);
    const double a = inner_product(basis.back(), w).real();
    alpha.push_back(a);
    axpy(-a, basis.back(), w);
    if (k > 0) axpy(-beta.back(), basis[k - 1], w);
    // Two passes of classical Gram-Schmidt against the whole basis.
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : basis) axpy(-inner_product(q, w), q, w);
    const double b = l2_norm(w);
    iterations = static_cast<int>(k + 1);

    const std::size_t m = alpha.size();
    const bool last = m == kmax;
    const double scale = std::max({options.norm_bound, std::abs(theta), 1e-300});
    invariant = b <= 1e-13 * std::max(scale, std::abs(a));
    if (m < 40 || m % 4 == 0 || last || invariant) {
      Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha.data(), static_cast<Eigen::Index>(m));
      Eigen::VectorXd sub(static_cast<Eigen::Index>(std::max<std::size_t>(m, 2) - 1));
      for (std::size_t i = 0; i + 1 < m; ++i) sub[static_cast<Eigen::Index>(i)] = beta[i];
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
      if (m == 1) {
        theta = diag[0];
        ritz = Eigen::VectorXd::Ones(1);
      } else {
        tri.computeFromTridiagonal(diag, sub.head(static_cast<Eigen::Index>(m - 1)), Eigen::ComputeEigenvectors);
        theta = tri.eigenvalues()[static_cast<Eigen::Index>(m - 1)];
        ritz = tri.eigenvectors().col(static_cast<Eigen::Index>(m - 1));
      }
      estimate = invariant ? 0.0 : b * std::abs(ritz[static_cast<Eigen::Index>(m - 1)]);
      const double norm = std::max({options.norm_bound, std::abs(theta), 1e-300});
      if (invariant || estimate <= options.tol * norm) break;
    }
    if (last) break;
    beta.push_back(b);
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / b;
  }

  const double norm = std::max({options.norm_bound, std::abs(theta), 1e-300});
  if (!invariant && estimate > options.tol * norm && iterations < static_cast<int>(n))
    throw NonConvergenceError(
        fmt::format("Lanczos did not converge in {} iterations (residual estimate {:.3e})", iterations, estimate),
        theta, estimate, iterations);

  LanczosResult res;
  res.value = theta;
  res.iterations = iterations;
  res.invariant = invariant || iterations == static_cast<int>(n);
  res.vector.assign(n, 0.0);
  for (Eigen::Index j = 0; j < ritz.size(); ++j) axpy(ritz[j], basis[static_cast<std::size_t>(j)], res.vector);
  const double vn = l2_norm(res.vector);
  for (auto& z : res.vector) z /= vn;
  op(res.vector, w);
  axpy(-theta, res.vector, w);
  res.residual = l2_norm(w);
  return res;
}

}  // namespace plslab
