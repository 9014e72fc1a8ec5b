#include "plslab/observability.hpp"

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <limits>
#include <map>

#include <fmt/format.h>

#include "plslab/error.hpp"
#include "plslab/parallel.hpp"

namespace plslab {
namespace {

std::vector<std::size_t> all_positions(std::size_t n) {
  std::vector<std::size_t> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = i;
  return out;
}

LatticeIndex difference(const LatticeIndex& a, const LatticeIndex& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

struct BlockResult {
  double lambda = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool dense = true;
  ComplexField vector;
};

BlockResult solve_block(const ConcentrationProblem& problem, std::span<const std::size_t> block,
                        const EigOptions& options) {
  const bool dense = options.method == EigMethod::Dense ||
                     (options.method == EigMethod::Auto && block.size() <= options.dense_cap);
  BlockResult out;
  if (dense) {
    if (block.size() > options.dense_cap)
      throw Error(ErrorKind::Budget,
                  fmt::format("dense eigensolve of size {} exceeds the cap {}; use the iterative method",
                              block.size(), options.dense_cap));
    const Eigen::MatrixXcd g = dense_gram(problem, block);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(g, Eigen::ComputeEigenvectors);
    if (eig.info() != Eigen::Success) throw Error(ErrorKind::NonConvergence, "dense Hermitian eigensolve failed");
    out.lambda = eig.eigenvalues()[0];
    const Eigen::VectorXcd v = eig.eigenvectors().col(0);
    out.residual = (g * v - out.lambda * v).norm();
    out.vector.assign(v.data(), v.data() + v.size());
    return out;
  }
  LanczosOptions lo{options.tol, options.max_iter, options.seed, 1.0};
  const LinearOperator op = [&](std::span<const cplx> in, std::span<cplx> res) {
    concentration_apply(problem, block, in, res, true);
  };
  const auto lz = lanczos_largest(block.size(), op, lo);
  out.dense = false;
  out.lambda = 1.0 - lz.value;
  out.residual = lz.residual;
  out.iterations = lz.iterations;
  out.vector = lz.vector;
  return out;
}

}  // namespace

ConcentrationProblem::ConcentrationProblem(const TorusGrid& grid, Mask band, Mask observed)
    : transform_(std::make_shared<FourierTransform>(grid)),
      band_(std::move(band)),
      observed_(std::move(observed)) {
  if (band_.size() != grid.size()) throw Error(ErrorKind::Shape, "band mask does not match grid");
  if (observed_.size() != grid.size()) throw Error(ErrorKind::Shape, "observation mask does not match grid");
  modes_ = mask_indices(band_);
  if (modes_.empty()) throw Error(ErrorKind::Domain, "band mask is empty");
  fraction_ = mask_fraction(observed_);
  kernel_.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) kernel_[i] = observed_[i] ? 1.0 : 0.0;
  transform_->forward_inplace(kernel_);
  const double scale = 1.0 / std::sqrt(static_cast<double>(grid.size()));
  for (auto& z : kernel_) z *= scale;
}

Mask observation_mask(const SetSpec& set, double delta, const TorusGrid& grid) {
  if (!(delta >= 0.0)) throw Error(ErrorKind::Domain, "neighborhood radius delta must be non-negative");
  if (delta == 0.0) return sample_indicator(set, grid);
  return sample_indicator(SetSpec::dilated(set, delta), grid);
}

ConcentrationProblem make_concentration_problem(const TorusGrid& grid, const SpectralRegion& region,
                                                const SetSpec& set, double delta) {
  return ConcentrationProblem(grid, region_mask(region, grid), observation_mask(set, delta, grid));
}

void concentration_apply(const ConcentrationProblem& problem, std::span<const std::size_t> subset,
                         std::span<const cplx> in, std::span<cplx> out, bool complement) {
  const auto& modes = problem.modes();
  const std::size_t n = subset.empty() ? modes.size() : subset.size();
  if (in.size() != n || out.size() != n)
    throw Error(ErrorKind::Shape, "coefficient vector does not match the band");
  auto position = [&](std::size_t i) { return subset.empty() ? i : subset[i]; };
  ComplexField buf(problem.grid().size(), 0.0);
  for (std::size_t i = 0; i < n; ++i) buf[modes[position(i)]] = in[i];
  problem.transform().inverse_inplace(buf);
  const auto& chi = problem.observed();
  for (std::size_t j = 0; j < buf.size(); ++j)
    if ((chi[j] != 0) == complement) buf[j] = 0.0;
  problem.transform().forward_inplace(buf);
  for (std::size_t i = 0; i < n; ++i) out[i] = buf[modes[position(i)]];
}

ComplexField concentration_matvec(const ConcentrationProblem& problem, std::span<const cplx> coefficients) {
  ComplexField out(problem.size());
  concentration_apply(problem, {}, coefficients, out);
  return out;
}

Eigen::MatrixXcd dense_gram(const ConcentrationProblem& problem, std::span<const std::size_t> subset) {
  const auto& grid = problem.grid();
  const auto& modes = problem.modes();
  const auto n = static_cast<Eigen::Index>(subset.size());
  std::vector<LatticeIndex> m(subset.size());
  for (std::size_t i = 0; i < subset.size(); ++i) m[i] = grid.lattice_index(modes[subset[i]]);
  Eigen::MatrixXcd g(n, n);
  const auto& k = problem.kernel();
  for (Eigen::Index a = 0; a < n; ++a) {
    g(a, a) = k[0].real();
    for (Eigen::Index b = a + 1; b < n; ++b) {
      const cplx v = k[grid.flat_index(difference(m[static_cast<std::size_t>(a)], m[static_cast<std::size_t>(b)]))];
      g(a, b) = v;
      g(b, a) = std::conj(v);
    }
  }
  return g;
}

Eigen::MatrixXcd dense_gram(const ConcentrationProblem& problem, std::size_t cap) {
  if (problem.size() > cap)
    throw Error(ErrorKind::Budget,
                fmt::format("band has {} modes, above the dense cap {}; use the iterative path",
                            problem.size(), cap));
  const auto all = all_positions(problem.size());
  return dense_gram(problem, all);
}

std::array<std::size_t, 3> mask_periods(const Mask& mask, const TorusGrid& grid) {
  if (mask.size() != grid.size()) throw Error(ErrorKind::Shape, "mask does not match grid");
  const std::size_t n = grid.points();
  std::array<std::size_t, 3> out{1, 1, 1};
  for (int a = 0; a < grid.dim(); ++a) {
    std::size_t stride = 1;
    for (int b = a + 1; b < grid.dim(); ++b) stride *= n;
    for (std::size_t s = 1; s <= n; s *= 2) {
      bool ok = true;
      for (std::size_t j = 0; j < mask.size() && ok; ++j) {
        const std::size_t coord = (j / stride) % n;
        const std::size_t shifted = j - coord * stride + ((coord + s) % n) * stride;
        ok = mask[j] == mask[shifted];
      }
      if (ok) {
        out[a] = s;
        break;
      }
    }
  }
  return out;
}

std::vector<std::vector<std::size_t>> coupling_blocks(const ConcentrationProblem& problem) {
  const auto& grid = problem.grid();
  const auto periods = mask_periods(problem.observed(), grid);
  std::array<std::ptrdiff_t, 3> q{1, 1, 1};
  for (int a = 0; a < grid.dim(); ++a) q[a] = static_cast<std::ptrdiff_t>(grid.points() / periods[a]);
  std::map<std::array<std::ptrdiff_t, 3>, std::size_t> index;
  std::vector<std::vector<std::size_t>> blocks;
  const auto& modes = problem.modes();
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const auto m = grid.lattice_index(modes[i]);
    std::array<std::ptrdiff_t, 3> key{};
    for (int a = 0; a < 3; ++a) key[a] = ((m[a] % q[a]) + q[a]) % q[a];
    auto [it, inserted] = index.emplace(key, blocks.size());
    if (inserted) blocks.emplace_back();
    blocks[it->second].push_back(i);
  }
  return blocks;
}

EigResult smallest_eigenvalue(const ConcentrationProblem& problem, const EigOptions& options) {
  if (!(options.tol > 0.0)) throw Error(ErrorKind::Domain, "eigensolver tolerance must be positive");
  const auto blocks = options.use_blocks ? coupling_blocks(problem)
                                         : std::vector<std::vector<std::size_t>>{all_positions(problem.size())};
  std::vector<BlockResult> results(blocks.size());
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    EigOptions o = options;
    o.seed = options.seed + b;
    results[b] = solve_block(problem, blocks[b], o);
  }

  std::size_t best = 0;
  bool any_dense = false, any_iter = false;
  EigResult res;
  res.tol = options.tol;
  res.blocks = blocks.size();
  for (std::size_t b = 0; b < results.size(); ++b) {
    if (results[b].lambda < results[best].lambda) best = b;
    any_dense |= results[b].dense;
    any_iter |= !results[b].dense;
    res.iterations += results[b].iterations;
    res.residual = std::max(res.residual, results[b].residual);
  }
  res.lambda_min = results[best].lambda;
  res.method = any_dense && any_iter ? "mixed" : (any_dense ? "dense" : "iterative");
  if (options.want_vector) {
    ComplexField v(problem.size(), 0.0);
    for (std::size_t i = 0; i < blocks[best].size(); ++i) v[blocks[best][i]] = results[best].vector[i];
    res.vector = std::move(v);
  }
  return res;
}

PlsConstant pls_constant(double lambda_min) {
  PlsConstant c;
  c.lambda_min = lambda_min;
  if (!(lambda_min >= kLambdaFloor)) {
    c.floor_hit = true;
    c.value = std::numeric_limits<double>::infinity();
    return c;
  }
  c.value = 1.0 / std::sqrt(lambda_min);
  return c;
}

double theoretical_bound_log10(BoundForm form, const BoundInputs& in, const BoundConstants& c) {
  if (!(in.gamma > 0.0 && in.gamma < 1.0)) throw Error(ErrorKind::Domain, "gamma must lie in (0, 1)");
  if (!(in.ell > 0.0) || !(in.beta > 0.0))
    throw Error(ErrorKind::Domain, "ell and beta must be positive");
  if (!(c.c0 > 0.0) || !(c.c1 > 0.0) || !(c.c2 > 0.0))
    throw Error(ErrorKind::Domain, "bound constants must be positive");
  switch (form) {
    case BoundForm::Strip:
      return c.c0 * in.beta * in.ell * std::log10(c.c0 / in.gamma);
    case BoundForm::Proposition:
      return c.c2 * in.beta * in.ell * std::log10(c.c2 / in.gamma);
    case BoundForm::Neighborhood:
      if (!(in.delta > 0.0)) throw Error(ErrorKind::Domain, "delta must be positive");
      return std::log10(c.c1) + (in.d + 1) * std::log10(in.ell / in.delta) +
             c.c0 * in.ell * in.beta * std::log10(c.c0 / in.gamma);
  }
  return 0.0;
}

double theoretical_bound(BoundForm form, const BoundInputs& in, const BoundConstants& c) {
  return std::pow(10.0, theoretical_bound_log10(form, in, c));
}

const char* to_string(RegionFamily family) {
  switch (family) {
    case RegionFamily::Annulus:
      return "annulus";
    case RegionFamily::Ball:
      return "ball";
    case RegionFamily::Shell:
      return "shell";
  }
  return "?";
}

const char* to_string(BoundForm form) {
  switch (form) {
    case BoundForm::Strip:
      return "strip";
    case BoundForm::Proposition:
      return "proposition";
    case BoundForm::Neighborhood:
      return "neighborhood";
  }
  return "?";
}

SpectralRegion family_region(const SweepSpec& spec, double radius) {
  switch (spec.family) {
    case RegionFamily::Annulus:
      return regions::Annulus{radius, spec.beta};
    case RegionFamily::Ball:
      return regions::Ball{radius};
    case RegionFamily::Shell:
      return regions::Shell{spec.manifold, radius, spec.beta, spec.exact_distance};
  }
  return regions::Ball{radius};
}

std::vector<SweepRow> radius_sweep(const SweepSpec& spec) {
  if (spec.radii.empty()) throw Error(ErrorKind::Domain, "radius list is empty");
  for (double r : spec.radii) {
    const auto extent = region_extent(family_region(spec, r));
    if (extent && *extent >= spec.grid.nyquist())
      throw Error(ErrorKind::Nyquist,
                  fmt::format("R = {:.6g} puts the region at |xi| = {:.6g}, beyond the Nyquist bound {:.6g}", r,
                              *extent, spec.grid.nyquist()));
  }
  const Mask observed = observation_mask(spec.set, spec.delta, spec.grid);
  std::vector<SweepRow> rows(spec.radii.size());
  parallel_for(spec.radii.size(), [&](std::size_t i) {
    const auto start = std::chrono::steady_clock::now();
    const double r = spec.radii[i];
    ConcentrationProblem problem(spec.grid, region_mask(family_region(spec, r), spec.grid), observed);
    const auto eig = smallest_eigenvalue(problem, spec.eig);
    SweepRow row;
    row.radius = r;
    row.beta = spec.family == RegionFamily::Ball ? 0.0 : spec.beta;
    row.delta = spec.delta;
    row.lambda_min = eig.lambda_min;
    row.constant = pls_constant(eig.lambda_min);
    row.mask_size = problem.size();
    row.method = eig.method;
    row.residual = eig.residual;
    row.iterations = eig.iterations;
    row.blocks = eig.blocks;
    if (spec.bound) {
      BoundInputs in = *spec.bound;
      in.beta = spec.family == RegionFamily::Ball ? r : spec.beta;
      row.bound_log10 = theoretical_bound_log10(spec.bound_form, in, spec.constants);
    }
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rows[i] = std::move(row);
  });
  return rows;
}

}  // namespace plslab
