#pragma once

// Discrete periodic tori, the unitary DFT, band projection and fractional
// Sobolev symbols.
//
// Normalization used everywhere in the library:
//
//   forward:  u_hat[m] = N^{-d/2} sum_j u[j] exp(-2 pi i m.j / N)
//   inverse:  u[j]     = N^{-d/2} sum_m u_hat[m] exp(+2 pi i m.j / N)
//
// so that sum_j |u[j]|^2 == sum_m |u_hat[m]|^2 (Parseval holds on plain
// sums, without a cell-volume factor). Physical frequencies are
// xi_m = (2 pi / L) m with m in {-N/2, ..., N/2 - 1}^d; arrays are stored
// row-major with axis 0 slowest and FFT ordering (index k maps to m = k for
// k < N/2, m = k - N otherwise).

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace plslab {

using cplx = std::complex<double>;
using ComplexField = std::vector<cplx>;
using Mask = std::vector<std::uint8_t>;
using Point = std::array<double, 3>;
using LatticeIndex = std::array<std::ptrdiff_t, 3>;

/// Dimension and side length of a periodic box, without a discretization.
struct Torus {
  int dim = 2;
  double side = 1.0;
};

class TorusGrid {
 public:
  /// Throws Error(Domain) unless 1 <= dim <= 3, side > 0 and points is a
  /// power of two >= 8.
  TorusGrid(int dim, double side, std::size_t points);

  int dim() const noexcept { return dim_; }
  double side() const noexcept { return side_; }
  std::size_t points() const noexcept { return points_; }
  double spacing() const noexcept { return side_ / static_cast<double>(points_); }
  std::size_t size() const noexcept { return size_; }
  Torus torus() const noexcept { return {dim_, side_}; }

  /// 2 pi / L.
  double frequency_unit() const noexcept;
  /// Largest representable |xi| component, (2 pi / L) (N / 2).
  double nyquist() const noexcept;

  LatticeIndex lattice_index(std::size_t flat) const noexcept;
  std::size_t flat_index(const LatticeIndex& m) const noexcept;  // wraps modulo N
  Point node(std::size_t flat) const noexcept;
  Point frequency(std::size_t flat) const noexcept;
  double frequency_norm2(std::size_t flat) const noexcept;

  bool operator==(const TorusGrid& other) const noexcept {
    return dim_ == other.dim_ && side_ == other.side_ && points_ == other.points_;
  }

 private:
  int dim_;
  double side_;
  std::size_t points_;
  std::size_t size_;
};

/// Unitary DFT on a TorusGrid backed by FFTW. Plans are created once; the
/// execute calls are safe to use concurrently on distinct buffers.
class FourierTransform {
 public:
  explicit FourierTransform(const TorusGrid& grid);
  ~FourierTransform();
  FourierTransform(const FourierTransform&) = delete;
  FourierTransform& operator=(const FourierTransform&) = delete;

  const TorusGrid& grid() const noexcept { return grid_; }

  void forward_inplace(std::span<cplx> data) const;
  void inverse_inplace(std::span<cplx> data) const;
  ComplexField forward(std::span<const cplx> spatial) const;
  ComplexField inverse(std::span<const cplx> spectral) const;

 private:
  void check(std::span<const cplx> data) const;

  TorusGrid grid_;
  struct Plans;
  std::unique_ptr<Plans> plans_;
};

/// Complex field together with the frequency support it claims to live in.
struct BandField {
  TorusGrid grid;
  ComplexField values;
  Mask mask;
};

/// Builds a BandField after projecting values onto mask, so the invariant
/// holds by construction.
BandField make_band_field(const FourierTransform& transform, ComplexField values, Mask mask);

/// Relative L2 distance between a band field and its own projection.
double band_defect(const FourierTransform& transform, const BandField& field);

BandField band_project(const FourierTransform& transform, const BandField& field,
                       const Mask& mask);
ComplexField band_project(const FourierTransform& transform, std::span<const cplx> spatial,
                          const Mask& mask);

/// sigma_m = (|xi_m|^2 + 1)^{s/2} over the frequency lattice.
class FractionalSymbol {
 public:
  FractionalSymbol(const TorusGrid& grid, double order);

  double order() const noexcept { return order_; }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t flat) const noexcept { return values_[flat]; }

 private:
  double order_;
  std::vector<double> values_;
};

/// Multiplies every Fourier coefficient of a spatial field by sigma_m^power.
ComplexField apply_symbol(const FourierTransform& transform, std::span<const cplx> spatial,
                          const FractionalSymbol& symbol, double power);

/// ( sum_m (|xi_m|^2 + 1)^r |u_hat_m|^2 )^{1/2}.
double sobolev_norm(const FourierTransform& transform, std::span<const cplx> spatial,
                    double r);

double l2_norm(std::span<const cplx> values);
cplx inner_product(std::span<const cplx> a, std::span<const cplx> b);  // sum conj(a) b

/// Flat indices of the true entries of a mask, ascending.
std::vector<std::size_t> mask_indices(const Mask& mask);

}  // namespace plslab
