#include "plslab/resolvent.hpp"

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "plslab/error.hpp"
#include "plslab/lanczos.hpp"
#include "plslab/parallel.hpp"

namespace plslab {

double resolvent_weight(double lambda, double s) {
  return std::pow(1.0 + lambda, 2.0 / s - 2.0);
}

double lambda_spacing(double lambda, double s) {
  return 0.5 * std::pow(1.0 + lambda, 1.0 - 1.0 / s);
}

std::vector<double> lambda_grid(double lambda_max, double s) {
  if (!(lambda_max >= 0.0) || !std::isfinite(lambda_max))
    throw Error(ErrorKind::Config, "lambda_max must be a non-negative number", "lambda_max");
  if (!(s > 0.0)) throw Error(ErrorKind::Config, "fractional order s must be positive", "s");
  std::vector<double> out{0.0};
  while (out.back() < lambda_max) {
    const double next = out.back() + lambda_spacing(out.back(), s);
    out.push_back(std::min(next, lambda_max));
    if (out.size() > 10'000'000) throw Error(ErrorKind::Budget, "lambda grid too large");
  }
  return out;
}

void check_lambda_grid(std::span<const double> lambdas, double s) {
  if (lambdas.empty()) throw Error(ErrorKind::Config, "lambda grid is empty", "lambdas");
  if (lambdas.front() != 0.0) throw Error(ErrorKind::Config, "lambda grid must start at 0", "lambdas[0]");
  for (std::size_t i = 1; i < lambdas.size(); ++i) {
    const double gap = lambdas[i] - lambdas[i - 1];
    const double allowed = lambda_spacing(lambdas[i - 1], s);
    if (!(gap > 0.0))
      throw Error(ErrorKind::Config, "lambda grid must be strictly increasing", fmt::format("lambdas[{}]", i));
    if (gap > allowed * (1.0 + 1e-12))
      throw Error(ErrorKind::Config,
                  fmt::format("gap {:.6g} after lambda = {:.6g} exceeds the allowed spacing {:.6g}", gap,
                              lambdas[i - 1], allowed),
                  fmt::format("lambdas[{}]", i));
  }
}

double truncation_lower_bound(double a, double cutoff) {
  const double h = 0.5 * (cutoff - a);
  return 0.5 * (a + cutoff) - std::sqrt(h * h + 0.25);
}

ResolventProblem::ResolventProblem(const TorusGrid& grid, double s, Mask observed)
    : concentration_(std::make_shared<ConcentrationProblem>(grid, Mask(grid.size(), 1), std::move(observed))),
      s_(s) {
  if (!(s > 0.0)) throw Error(ErrorKind::Domain, "fractional order s must be positive");
  const FractionalSymbol sym(grid, s);
  symbol_.assign(sym.values().begin(), sym.values().end());
}

ResolventProblem::ResolventProblem(const TorusGrid& grid, double s, const SetSpec& set, double delta)
    : ResolventProblem(grid, s, observation_mask(set, delta, grid)) {
  delta_ = delta;
}

std::vector<double> ResolventProblem::diagonal(double lambda) const {
  if (!(lambda >= 0.0)) throw Error(ErrorKind::Domain, "lambda must be non-negative");
  const double c = resolvent_weight(lambda, s_);
  std::vector<double> out(symbol_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = c * (symbol_[i] - lambda) * (symbol_[i] - lambda);
  return out;
}

void resolvent_matvec(const ResolventProblem& problem, double lambda, std::span<const cplx> in, std::span<cplx> out) {
  const auto t = problem.diagonal(lambda);
  if (in.size() != t.size() || out.size() != t.size())
    throw Error(ErrorKind::Shape, "coefficient vector does not match the lattice");
  concentration_apply(problem.concentration(), {}, in, out);
  for (std::size_t i = 0; i < t.size(); ++i) out[i] += t[i] * in[i];
}

ComplexField resolvent_matvec(const ResolventProblem& problem, double lambda, std::span<const cplx> in) {
  ComplexField out(in.size());
  resolvent_matvec(problem, lambda, in, out);
  return out;
}

ResolventRow resolvent_eigenvalue(const ResolventProblem& problem, double lambda, const ResolventOptions& options) {
  if (!(options.cutoff > 1.0)) throw Error(ErrorKind::Domain, "truncation cutoff must exceed 1");
  const auto start = std::chrono::steady_clock::now();
  const auto t = problem.diagonal(lambda);
  const auto& cp = problem.concentration();

  ResolventRow row;
  row.lambda = lambda;
  row.weight = resolvent_weight(lambda, problem.order());
  std::size_t kept = 0;
  for (double v : t) kept += v <= options.cutoff ? 1 : 0;
  row.band_size = kept;

  if (kept == 0) {
    // H >= K everywhere; the Rayleigh quotient of the best mode caps it.
    double best = std::numeric_limits<double>::infinity();
    for (double v : t) best = std::min(best, v + cp.kernel()[0].real());
    row.upper = best;
    row.lower = options.cutoff;
    row.method = "diagonal";
    return row;
  }

  bool any_dense = false, any_iter = false;
  double a = std::numeric_limits<double>::infinity();
  std::uint64_t b = 0;
  for (const auto& block : coupling_blocks(cp)) {
    std::vector<std::size_t> sub;
    for (std::size_t p : block)
      if (t[p] <= options.cutoff) sub.push_back(p);
    if (sub.empty()) continue;
    ++row.blocks;
    if (sub.size() <= options.dense_cap) {
      Eigen::MatrixXcd h = dense_gram(cp, sub);
      for (std::size_t i = 0; i < sub.size(); ++i) h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += t[sub[i]];
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h, Eigen::EigenvaluesOnly);
      if (eig.info() != Eigen::Success)
        throw Error(ErrorKind::NonConvergence, fmt::format("dense eigensolve failed at lambda = {:.6g}", lambda));
      a = std::min(a, eig.eigenvalues()[0]);
      any_dense = true;
    } else {
      double shift = 0.0;
      for (std::size_t p : sub) shift = std::max(shift, t[p]);
      shift += 1.0;
      const LinearOperator op = [&](std::span<const cplx> in, std::span<cplx> out) {
        concentration_apply(cp, sub, in, out);
        for (std::size_t i = 0; i < sub.size(); ++i) out[i] = shift * in[i] - (out[i] + t[sub[i]] * in[i]);
      };
      LanczosOptions lo{options.tol, options.max_iter, options.seed + b, shift};
      LanczosResult lz;
      try {
        lz = lanczos_largest(sub.size(), op, lo);
      } catch (const NonConvergenceError& e) {
        throw NonConvergenceError(fmt::format("no convergence at lambda = {:.6g}: {}", lambda, e.what()),
                                  shift - e.best_estimate(), e.residual(), e.iterations());
      }
      a = std::min(a, shift - lz.value);
      row.residual = std::max(row.residual, lz.residual);
      row.iterations += lz.iterations;
      any_iter = true;
    }
    ++b;
  }
  row.upper = a;
  row.lower = kept == t.size() ? a : truncation_lower_bound(a, options.cutoff);
  row.method = any_dense && any_iter ? "mixed" : (any_dense ? "dense" : "iterative");
  row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

ResolventBound uniform_lower_bound(const ResolventProblem& problem, std::span<const double> lambdas,
                                   const ResolventOptions& options) {
  check_lambda_grid(lambdas, problem.order());
  ResolventBound out;
  out.rows.resize(lambdas.size());
  parallel_for(lambdas.size(), [&](std::size_t i) { out.rows[i] = resolvent_eigenvalue(problem, lambdas[i], options); });
  out.c_star = out.c_star_upper = std::numeric_limits<double>::infinity();
  for (const auto& r : out.rows) {
    if (r.lower < out.c_star) {
      out.c_star = r.lower;
      out.argmin = r.lambda;
    }
    if (r.upper < out.c_star_upper) {
      out.c_star_upper = r.upper;
      out.argmin_upper = r.lambda;
    }
  }
  out.constant = out.c_star > 0.0 ? 1.0 / out.c_star : std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace plslab
