#pragma once

// Concentration operators A = P_M chi_Omega P_M on band-limited lattice
// functions and the observability constant C = lambda_min(A)^{-1/2}.
//
// Coefficients are indexed by the band's flat indices in ascending order.
// With the unitary DFT, A has entries G_ab = c_hat(m_a - m_b) where
// c_hat(k) = N^{-d} sum_j chi_j exp(-2 pi i k.j / N), so A = I for the full
// torus and A = 0 for the empty set.

#include <Eigen/Dense>

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "plslab/geometry.hpp"
#include "plslab/lanczos.hpp"
#include "plslab/lattice.hpp"
#include "plslab/spectra.hpp"

namespace plslab {

/// Below this the PLS constant is reported as +infinity.
inline constexpr double kLambdaFloor = 1e-14;

class ConcentrationProblem {
 public:
  /// `observed` is the indicator of Omega on the spatial grid.
  ConcentrationProblem(const TorusGrid& grid, Mask band, Mask observed);

  const TorusGrid& grid() const noexcept { return transform_->grid(); }
  const FourierTransform& transform() const noexcept { return *transform_; }
  const Mask& band() const noexcept { return band_; }
  const Mask& observed() const noexcept { return observed_; }
  const std::vector<std::size_t>& modes() const noexcept { return modes_; }
  std::size_t size() const noexcept { return modes_.size(); }
  /// |Omega| / |T|.
  double observed_fraction() const noexcept { return fraction_; }
  /// c_hat over the lattice (FFT ordering).
  const ComplexField& kernel() const noexcept { return kernel_; }

 private:
  std::shared_ptr<FourierTransform> transform_;
  Mask band_;
  Mask observed_;
  std::vector<std::size_t> modes_;
  double fraction_ = 0.0;
  ComplexField kernel_;
};

/// Indicator of U_delta(E) on the grid. delta = 0 samples E itself.
Mask observation_mask(const SetSpec& set, double delta, const TorusGrid& grid);

ConcentrationProblem make_concentration_problem(const TorusGrid& grid, const SpectralRegion& region,
                                                const SetSpec& set, double delta);

/// c -> restrict_M(DFT(chi * IDFT(extend(c)))). Restricted to a subset of
/// positions into modes() when `subset` is given; with `complement` the
/// multiplier is 1 - chi.
ComplexField concentration_matvec(const ConcentrationProblem& problem, std::span<const cplx> coefficients);
void concentration_apply(const ConcentrationProblem& problem, std::span<const std::size_t> subset,
                         std::span<const cplx> in, std::span<cplx> out, bool complement = false);

/// Dense Gram matrix over modes() (or a subset); Error(Budget) above `cap`.
Eigen::MatrixXcd dense_gram(const ConcentrationProblem& problem, std::size_t cap = 4096);
Eigen::MatrixXcd dense_gram(const ConcentrationProblem& problem, std::span<const std::size_t> subset);

/// Smallest shift (in grid points) along each axis that leaves the mask
/// invariant; the axis period divides N.
std::array<std::size_t, 3> mask_periods(const Mask& mask, const TorusGrid& grid);

/// Partition of modes() into classes that the Gram matrix never couples:
/// when chi has period N / q along an axis, c_hat vanishes off q Z on that
/// axis, so modes only interact within a residue class modulo q.
std::vector<std::vector<std::size_t>> coupling_blocks(const ConcentrationProblem& problem);

enum class EigMethod { Auto, Dense, Iterative };

struct EigOptions {
  double tol = 1e-10;
  int max_iter = 500;
  std::uint64_t seed = 1;
  EigMethod method = EigMethod::Auto;
  std::size_t dense_cap = 4096;
  bool use_blocks = true;
  bool want_vector = false;
};

struct EigResult {
  double lambda_min = 0.0;
  double residual = 0.0;
  int iterations = 0;
  std::string method;  // "dense", "iterative" or "mixed" over blocks
  double tol = 0.0;
  std::size_t blocks = 1;
  std::optional<ComplexField> vector;  // over modes()
};

EigResult smallest_eigenvalue(const ConcentrationProblem& problem, const EigOptions& options = {});

struct PlsConstant {
  double value = 1.0;  // +infinity when the floor is hit
  double lambda_min = 1.0;
  bool floor_hit = false;
  double floor = kLambdaFloor;
};

PlsConstant pls_constant(double lambda_min);

// --- bound curves --------------------------------------------------------------

enum class BoundForm {
  Strip,         // (C0 / gamma)^{C0 beta ell}
  Proposition,   // (C2 / gamma)^{C2 beta ell}
  Neighborhood,  // C1 (ell / delta)^{d + 1} (C0 / gamma)^{C0 ell beta}
};

struct BoundConstants {
  double c0 = 10.0, c1 = 10.0, c2 = 10.0;
};

struct BoundInputs {
  double gamma = 0.5;
  double ell = 1.0;
  double beta = 1.0;
  double delta = 1.0;
  int d = 2;
};

/// log10 of the bound (the bound itself overflows quickly).
double theoretical_bound_log10(BoundForm form, const BoundInputs& in, const BoundConstants& c = {});
double theoretical_bound(BoundForm form, const BoundInputs& in, const BoundConstants& c = {});

// --- radius sweeps -------------------------------------------------------------

enum class RegionFamily { Annulus, Ball, Shell };

struct SweepSpec {
  TorusGrid grid{2, 1.0, 8};
  SetSpec set = SetSpec::full();
  double delta = 0.0;
  RegionFamily family = RegionFamily::Annulus;
  std::vector<double> radii;  // physical units
  double beta = 1.0;
  Manifold manifold;
  bool exact_distance = true;
  EigOptions eig;
  // gamma, ell, delta, d for the envelope column; beta is filled per row with
  // the shell width (annulus, shell) or the radius (ball).
  std::optional<BoundInputs> bound;
  BoundForm bound_form = BoundForm::Neighborhood;
  BoundConstants constants;
};

struct SweepRow {
  double radius = 0.0, beta = 0.0, delta = 0.0;
  double lambda_min = 0.0;
  PlsConstant constant;
  std::size_t mask_size = 0;
  std::string method;
  double residual = 0.0;
  int iterations = 0;
  std::size_t blocks = 1;
  double seconds = 0.0;
  std::optional<double> bound_log10;
};

SpectralRegion family_region(const SweepSpec& spec, double radius);
/// One row per radius, computed in parallel across radii.
std::vector<SweepRow> radius_sweep(const SweepSpec& spec);

const char* to_string(RegionFamily family);
const char* to_string(BoundForm form);

}  // namespace plslab
