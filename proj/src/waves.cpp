#include "plslab/waves.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include <fmt/format.h>

#include "plslab/error.hpp"

namespace plslab {
namespace {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

template <class T>
void put(std::ofstream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T get(std::ifstream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw Error(ErrorKind::Io, "truncated snapshot");
  return value;
}

void damp(std::span<cplx> v, std::span<const double> factor) {
  for (std::size_t j = 0; j < v.size(); ++j) v[j] *= factor[j];
}

}  // namespace

std::vector<double> damping_field(const SetSpec& damping, const TorusGrid& grid, double amplitude) {
  std::vector<double> gamma;
  if (is_profile(damping)) {
    gamma = sample_profile(damping, grid);
    for (auto& g : gamma) g *= amplitude;
  } else {
    const Mask m = sample_indicator(damping, grid);
    gamma.resize(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) gamma[i] = m[i] ? amplitude : 0.0;
  }
  return gamma;
}

WaveSolver::WaveSolver(const TorusGrid& grid, double s, std::vector<double> gamma)
    : transform_(std::make_shared<FourierTransform>(grid)), s_(s), gamma_(std::move(gamma)) {
  if (!(s > 0.0)) throw Error(ErrorKind::Domain, "fractional order s must be positive");
  if (gamma_.size() != grid.size()) throw Error(ErrorKind::Shape, "damping does not match grid");
  for (double g : gamma_)
    if (!(g >= 0.0)) throw Error(ErrorKind::Domain, "damping must be non-negative everywhere");
  omega_.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) omega_[i] = std::pow(grid.frequency_norm2(i) + 1.0, 0.25 * s);
}

WaveSolver::WaveSolver(const TorusGrid& grid, double s, const SetSpec& damping, double amplitude)
    : WaveSolver(grid, s, damping_field(damping, grid, amplitude)) {}

void WaveSolver::check_state(const WaveState& state) const {
  if (!(state.grid == grid()) || state.w.size() != grid().size() || state.v.size() != grid().size())
    throw Error(ErrorKind::Shape, "wave state does not match the solver grid");
  if (state.s != s_) throw Error(ErrorKind::Domain, "wave state order differs from the solver order");
}

double energy(const FourierTransform& transform, const WaveState& state) {
  const auto& grid = transform.grid();
  const auto w_hat = transform.forward(state.w);
  double e2 = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    e2 += std::pow(grid.frequency_norm2(i) + 1.0, 0.5 * state.s) * std::norm(w_hat[i]);
  for (const auto& z : state.v) e2 += std::norm(z);  // Parseval
  return std::sqrt(e2);
}

double WaveSolver::energy(const WaveState& state) const {
  check_state(state);
  return plslab::energy(*transform_, state);
}

void WaveSolver::step(WaveState& state, double dt) const {
  check_state(state);
  if (!(dt > 0.0)) throw Error(ErrorKind::Domain, "time step must be positive");
  std::vector<double> half(gamma_.size());
  for (std::size_t j = 0; j < half.size(); ++j) half[j] = std::exp(-0.5 * dt * gamma_[j]);
  damp(state.v, half);
  transform_->forward_inplace(state.w);
  transform_->forward_inplace(state.v);
  for (std::size_t i = 0; i < omega_.size(); ++i) {
    const double om = omega_[i], c = std::cos(om * dt), sn = std::sin(om * dt);
    const cplx w = state.w[i], v = state.v[i];
    state.w[i] = w * c + v * (sn / om);
    state.v[i] = -w * (om * sn) + v * c;
  }
  transform_->inverse_inplace(state.w);
  transform_->inverse_inplace(state.v);
  damp(state.v, half);
  state.t += dt;
}

EnergySeries WaveSolver::evolve(WaveState& state, double dt, double horizon, std::size_t stride,
                                const SnapshotHook& hook) const {
  check_state(state);
  if (!(dt > 0.0)) throw Error(ErrorKind::Domain, "time step must be positive");
  if (!(horizon >= 0.0)) throw Error(ErrorKind::Domain, "horizon must be non-negative");
  if (stride == 0) throw Error(ErrorKind::Domain, "sample stride must be positive");
  const double ratio = horizon / dt;
  if (ratio > static_cast<double>(kMaxSteps))
    throw Error(ErrorKind::Budget, fmt::format("horizon / dt = {:.3g} exceeds the step budget {}", ratio, kMaxSteps));
  const auto steps = static_cast<std::size_t>(std::llround(ratio));

  const auto& grid = this->grid();
  const std::size_t n = grid.size();
  std::vector<double> half(n), weight(n), c(n), sn(n);
  for (std::size_t j = 0; j < n; ++j) {
    half[j] = std::exp(-0.5 * dt * gamma_[j]);
    weight[j] = omega_[j] * omega_[j];
    c[j] = std::cos(omega_[j] * dt);
    sn[j] = std::sin(omega_[j] * dt);
  }

  // w is kept in frequency space and v in physical space between steps.
  ComplexField w_hat = transform_->forward(state.w);
  auto current_energy = [&] {
    double e2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) e2 += weight[i] * std::norm(w_hat[i]);
    for (const auto& z : state.v) e2 += std::norm(z);
    return std::sqrt(e2);
  };
  auto emit = [&] {
    if (!hook) return;
    state.w = transform_->inverse(w_hat);
    hook(state);
  };

  EnergySeries series;
  series.dt = dt;
  series.steps = steps;
  double e = current_energy();
  series.t.push_back(state.t);
  series.energy.push_back(e);
  emit();
  const double t_start = state.t;
  for (std::size_t k = 1; k <= steps; ++k) {
    damp(state.v, half);
    transform_->forward_inplace(state.v);
    for (std::size_t i = 0; i < n; ++i) {
      const cplx w = w_hat[i], v = state.v[i];
      w_hat[i] = w * c[i] + v * (sn[i] / omega_[i]);
      state.v[i] = -w * (omega_[i] * sn[i]) + v * c[i];
    }
    transform_->inverse_inplace(state.v);
    damp(state.v, half);
    state.t = t_start + static_cast<double>(k) * dt;
    const double next = current_energy();
    if (e > 0.0) series.max_step_increase = std::max(series.max_step_increase, next / e - 1.0);
    e = next;
    if (k % stride == 0 || k == steps) {
      series.t.push_back(state.t);
      series.energy.push_back(e);
      emit();
    }
  }
  state.w = transform_->inverse(w_hat);
  return series;
}

WaveState gaussian_state(const TorusGrid& grid, double s, const Point& center, double width, double filter) {
  if (!(width >= 8.0 * grid.spacing()))
    throw Error(ErrorKind::Domain, "initial bump must span at least 8 grid spacings");
  if (!(filter >= 0.0)) throw Error(ErrorKind::Domain, "filter power must be non-negative");
  WaveState st{grid, ComplexField(grid.size()), ComplexField(grid.size(), 0.0), s, 0.0};
  const double L = grid.side();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Point x = grid.node(i);
    double r2 = 0.0;
    for (int a = 0; a < grid.dim(); ++a) {
      double d = x[a] - center[a];
      d -= L * std::round(d / L);
      r2 += d * d;
    }
    st.w[i] = std::exp(-0.5 * r2 / (width * width));
  }
  if (filter > 0.0) {
    FourierTransform ft(grid);
    ft.forward_inplace(st.w);
    for (std::size_t i = 0; i < grid.size(); ++i) st.w[i] *= std::pow(1.0 + grid.frequency_norm2(i), -filter);
    ft.inverse_inplace(st.w);
  }
  return st;
}

DecayFit fit_decay(std::span<const double> t, std::span<const double> energy, DecayModel model, double t0) {
  if (t.size() != energy.size()) throw Error(ErrorKind::Shape, "time and energy series differ in length");
  if (t.empty()) throw Error(ErrorKind::Domain, "empty energy series");
  for (double e : energy)
    if (!(e > 0.0)) throw Error(ErrorKind::Domain, "energy series has non-positive entries; log undefined");
  DecayFit fit;
  fit.model = model;
  fit.t0 = t0 < 0.0 ? 0.2 * t.back() : t0;
  fit.t1 = t.back();
  std::vector<double> x, y;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < fit.t0) continue;
    x.push_back(model == DecayModel::Polynomial ? std::log1p(t[i]) : t[i]);
    y.push_back(std::log(energy[i]));
  }
  fit.samples = x.size();
  if (fit.samples < 50)
    throw Error(ErrorKind::Domain, fmt::format("decay fit needs at least 50 samples in the window, got {}", fit.samples));
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorKind::Domain, "decay fit window has no spread in time");
  const double slope = sxy / sxx;
  fit.intercept = my - slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + slope * x[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  fit.exponent = model == DecayModel::Polynomial ? slope : -slope;
  return fit;
}

const char* to_string(DecayModel model) {
  return model == DecayModel::Polynomial ? "polynomial" : "exponential";
}

void write_snapshot(const std::string& path, const TorusGrid& grid, std::span<const cplx> field, double t,
                    std::size_t stride) {
  if (field.size() != grid.size()) throw Error(ErrorKind::Shape, "snapshot field does not match grid");
  if (stride == 0 || grid.points() % stride != 0)
    throw Error(ErrorKind::Domain, "snapshot stride must divide N");
  const std::size_t n = grid.points() / stride;
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot open " + tmp);
    put<std::uint64_t>(out, static_cast<std::uint64_t>(grid.dim()));
    put<std::uint64_t>(out, n);
    put<double>(out, grid.side());
    put<double>(out, t);
    const std::size_t total = grid.dim() == 1 ? n : (grid.dim() == 2 ? n * n : n * n * n);
    for (std::size_t k = 0; k < total; ++k) {
      LatticeIndex j{0, 0, 0};
      std::size_t rest = k;
      for (int a = grid.dim() - 1; a >= 0; --a) {
        j[a] = static_cast<std::ptrdiff_t>((rest % n) * stride);
        rest /= n;
      }
      const cplx z = field[grid.flat_index(j)];
      put<double>(out, z.real());
      put<double>(out, z.imag());
    }
    if (!out) throw Error(ErrorKind::Io, "write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw Error(ErrorKind::Io, "cannot move snapshot to " + path);
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  Snapshot s;
  s.dim = static_cast<int>(get<std::uint64_t>(in));
  s.points = static_cast<std::size_t>(get<std::uint64_t>(in));
  s.side = get<double>(in);
  s.t = get<double>(in);
  if (s.dim < 1 || s.dim > 3) throw Error(ErrorKind::Io, "bad snapshot dimension");
  std::size_t total = 1;
  for (int a = 0; a < s.dim; ++a) total *= s.points;
  s.values.resize(total);
  for (auto& z : s.values) {
    const double re = get<double>(in);
    const double im = get<double>(in);
    z = {re, im};
  }
  return s;
}

}  // namespace plslab
