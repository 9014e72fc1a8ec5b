#include "plslab/lattice.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

#include "plslab/error.hpp"

namespace plslab {
namespace {

// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

TorusGrid::TorusGrid(int dim, double side, std::size_t points)
    : dim_(dim), side_(side), points_(points), size_(1) {
  if (dim < 1 || dim > 3) throw Error(ErrorKind::Domain, "torus dimension must be 1, 2 or 3");
  if (!(side > 0.0) || !std::isfinite(side))
    throw Error(ErrorKind::Domain, "torus side length must be positive");
  if (!is_power_of_two(points) || points < 8)
    throw Error(ErrorKind::Domain, "points per side must be a power of two >= 8");
  for (int a = 0; a < dim; ++a) size_ *= points;
}

double TorusGrid::frequency_unit() const noexcept { return 2.0 * std::numbers::pi / side_; }

double TorusGrid::nyquist() const noexcept {
  return frequency_unit() * static_cast<double>(points_ / 2);
}

LatticeIndex TorusGrid::lattice_index(std::size_t flat) const noexcept {
  LatticeIndex m{0, 0, 0};
  const auto n = static_cast<std::ptrdiff_t>(points_);
  for (int a = dim_ - 1; a >= 0; --a) {
    auto k = static_cast<std::ptrdiff_t>(flat % points_);
    flat /= points_;
    m[a] = k < n / 2 ? k : k - n;
  }
  return m;
}

std::size_t TorusGrid::flat_index(const LatticeIndex& m) const noexcept {
  const auto n = static_cast<std::ptrdiff_t>(points_);
  std::size_t flat = 0;
  for (int a = 0; a < dim_; ++a) {
    std::ptrdiff_t k = m[a] % n;
    if (k < 0) k += n;
    flat = flat * points_ + static_cast<std::size_t>(k);
  }
  return flat;
}

Point TorusGrid::node(std::size_t flat) const noexcept {
  Point x{0.0, 0.0, 0.0};
  const double h = spacing();
  for (int a = dim_ - 1; a >= 0; --a) {
    x[a] = h * static_cast<double>(flat % points_);
    flat /= points_;
  }
  return x;
}

Point TorusGrid::frequency(std::size_t flat) const noexcept {
  const auto m = lattice_index(flat);
  const double u = frequency_unit();
  return {u * static_cast<double>(m[0]), u * static_cast<double>(m[1]),
          u * static_cast<double>(m[2])};
}

double TorusGrid::frequency_norm2(std::size_t flat) const noexcept {
  const auto xi = frequency(flat);
  return xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
}

struct FourierTransform::Plans {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
  double scale = 1.0;
};

FourierTransform::FourierTransform(const TorusGrid& grid)
    : grid_(grid), plans_(std::make_unique<Plans>()) {
  std::array<int, 3> dims{};
  for (int a = 0; a < grid.dim(); ++a) dims[a] = static_cast<int>(grid.points());
  ComplexField scratch(grid.size());
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  {
    std::lock_guard lock(planner_mutex());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    plans_->forward = fftw_plan_dft(grid.dim(), dims.data(), buf, buf, FFTW_FORWARD, flags);
    plans_->inverse = fftw_plan_dft(grid.dim(), dims.data(), buf, buf, FFTW_BACKWARD, flags);
  }
  if (!plans_->forward || !plans_->inverse)
    throw Error(ErrorKind::Domain, "FFTW could not create a plan for this grid");
  plans_->scale = 1.0 / std::sqrt(static_cast<double>(grid.size()));
}

FourierTransform::~FourierTransform() {
  if (!plans_) return;
  std::lock_guard lock(planner_mutex());
  if (plans_->forward) fftw_destroy_plan(plans_->forward);
  if (plans_->inverse) fftw_destroy_plan(plans_->inverse);
}

void FourierTransform::check(std::span<const cplx> data) const {
  if (data.size() != grid_.size())
    throw Error(ErrorKind::Shape, "array of size " + std::to_string(data.size()) +
                                      " does not match grid of size " +
                                      std::to_string(grid_.size()));
}

void FourierTransform::forward_inplace(std::span<cplx> data) const {
  check(data);
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plans_->forward, buf, buf);
  for (auto& c : data) c *= plans_->scale;
}

void FourierTransform::inverse_inplace(std::span<cplx> data) const {
  check(data);
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plans_->inverse, buf, buf);
  for (auto& c : data) c *= plans_->scale;
}

ComplexField FourierTransform::forward(std::span<const cplx> spatial) const {
  check(spatial);
  ComplexField out(spatial.begin(), spatial.end());
  forward_inplace(out);
  return out;
}

ComplexField FourierTransform::inverse(std::span<const cplx> spectral) const {
  check(spectral);
  ComplexField out(spectral.begin(), spectral.end());
  inverse_inplace(out);
  return out;
}

ComplexField band_project(const FourierTransform& transform, std::span<const cplx> spatial,
                          const Mask& mask) {
  if (mask.size() != transform.grid().size())
    throw Error(ErrorKind::Shape, "mask does not match grid");
  ComplexField hat = transform.forward(spatial);
  for (std::size_t i = 0; i < hat.size(); ++i)
    if (!mask[i]) hat[i] = 0.0;
  transform.inverse_inplace(hat);
  return hat;
}

BandField band_project(const FourierTransform& transform, const BandField& field,
                       const Mask& mask) {
  if (!(field.grid == transform.grid()))
    throw Error(ErrorKind::Shape, "band field grid does not match transform grid");
  return {field.grid, band_project(transform, field.values, mask), mask};
}

BandField make_band_field(const FourierTransform& transform, ComplexField values, Mask mask) {
  ComplexField projected = band_project(transform, values, mask);
  return {transform.grid(), std::move(projected), std::move(mask)};
}

double band_defect(const FourierTransform& transform, const BandField& field) {
  const ComplexField p = band_project(transform, field.values, field.mask);
  double diff = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) diff += std::norm(p[i] - field.values[i]);
  const double norm = l2_norm(field.values);
  return norm == 0.0 ? std::sqrt(diff) : std::sqrt(diff) / norm;
}

FractionalSymbol::FractionalSymbol(const TorusGrid& grid, double order)
    : order_(order), values_(grid.size()) {
  if (!(order > 0.0)) throw Error(ErrorKind::Domain, "fractional order must be positive");
  for (std::size_t i = 0; i < values_.size(); ++i)
    values_[i] = std::pow(grid.frequency_norm2(i) + 1.0, 0.5 * order);
}

ComplexField apply_symbol(const FourierTransform& transform, std::span<const cplx> spatial,
                          const FractionalSymbol& symbol, double power) {
  if (symbol.values().size() != transform.grid().size())
    throw Error(ErrorKind::Shape, "symbol does not match grid");
  ComplexField hat = transform.forward(spatial);
  if (power != 0.0)
    for (std::size_t i = 0; i < hat.size(); ++i) hat[i] *= std::pow(symbol[i], power);
  transform.inverse_inplace(hat);
  return hat;
}

double sobolev_norm(const FourierTransform& transform, std::span<const cplx> spatial, double r) {
  const ComplexField hat = transform.forward(spatial);
  const TorusGrid& grid = transform.grid();
  double sum = 0.0;
  for (std::size_t i = 0; i < hat.size(); ++i) {
    const double w = r == 0.0 ? 1.0 : std::pow(grid.frequency_norm2(i) + 1.0, r);
    sum += w * std::norm(hat[i]);
  }
  return std::sqrt(sum);
}

double l2_norm(std::span<const cplx> values) {
  double sum = 0.0;
  for (const auto& v : values) sum += std::norm(v);
  return std::sqrt(sum);
}

cplx inner_product(std::span<const cplx> a, std::span<const cplx> b) {
  if (a.size() != b.size()) throw Error(ErrorKind::Shape, "inner product of unequal sizes");
  cplx sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::conj(a[i]) * b[i];
  return sum;
}

std::vector<std::size_t> mask_indices(const Mask& mask) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) out.push_back(i);
  return out;
}

}  // namespace plslab
