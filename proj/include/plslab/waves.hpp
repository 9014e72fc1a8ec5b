#pragma once

// Damped fractional wave equation  w_tt + gamma(x) w_t + (-Delta + 1)^{s/2} w = 0
// on a torus, advanced by Strang splitting with exact substeps:
//
//   v <- exp(-gamma dt / 2) v                          (pointwise)
//   (w_hat, v_hat) <- rotation by omega dt per mode    omega = (|xi|^2 + 1)^{s/4}
//   v <- exp(-gamma dt / 2) v
//
// Energy: E^2 = sum_m (|xi_m|^2 + 1)^{s/2} |w_hat_m|^2 + sum_m |v_hat_m|^2.

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "plslab/geometry.hpp"
#include "plslab/lattice.hpp"

namespace plslab {

struct WaveState {
  TorusGrid grid;
  ComplexField w;  // spatial
  ComplexField v;  // spatial, w_t
  double s = 2.0;
  double t = 0.0;
};

/// gamma sampled on the grid: the profile itself, or amplitude * indicator
/// for indicator-type specs. Error(Domain) when any value is negative.
std::vector<double> damping_field(const SetSpec& damping, const TorusGrid& grid, double amplitude = 1.0);

struct EnergySeries {
  std::vector<double> t;
  std::vector<double> energy;
  std::size_t steps = 0;
  double dt = 0.0;
  double max_step_increase = 0.0;  // largest E(t + dt) / E(t) - 1 over all steps
};

/// Called with the state at every sample time (after the sample's energy).
using SnapshotHook = std::function<void(const WaveState&)>;

/// Hard cap on horizon / dt.
inline constexpr std::size_t kMaxSteps = 10'000'000;

class WaveSolver {
 public:
  WaveSolver(const TorusGrid& grid, double s, std::vector<double> gamma);
  WaveSolver(const TorusGrid& grid, double s, const SetSpec& damping, double amplitude = 1.0);

  const TorusGrid& grid() const noexcept { return transform_->grid(); }
  double order() const noexcept { return s_; }
  std::span<const double> gamma() const noexcept { return gamma_; }

  double energy(const WaveState& state) const;
  /// One Strang step of size dt (> 0).
  void step(WaveState& state, double dt) const;
  /// Advances to the horizon in round(horizon / dt) steps, sampling the
  /// energy every `stride` steps (and at t = 0).
  EnergySeries evolve(WaveState& state, double dt, double horizon, std::size_t stride,
                      const SnapshotHook& hook = {}) const;

 private:
  void check_state(const WaveState& state) const;

  std::shared_ptr<FourierTransform> transform_;
  double s_;
  std::vector<double> gamma_;
  std::vector<double> omega_;  // per lattice mode
};

/// Energy with the state's own order s (no damping needed).
double energy(const FourierTransform& transform, const WaveState& state);

/// Periodic Gaussian exp(-|x - c|^2 / (2 width^2)) in w, v = 0, followed by
/// the spectral filter w_hat <- w_hat (1 + |xi|^2)^{-filter}. The width must
/// be at least 8 grid spacings.
WaveState gaussian_state(const TorusGrid& grid, double s, const Point& center, double width, double filter = 0.0);

enum class DecayModel { Polynomial, Exponential };

struct DecayFit {
  DecayModel model = DecayModel::Polynomial;
  double exponent = 0.0;  // polynomial: slope of log E vs log(1 + t); exponential: -slope of log E vs t
  double intercept = 0.0;
  double t0 = 0.0, t1 = 0.0;
  double residual = 0.0;  // RMS of the log-model error
  std::size_t samples = 0;
};

/// Least-squares fit on samples with t >= t0; t0 < 0 selects 20% of the last
/// sample time. Needs at least 50 samples in the window.
DecayFit fit_decay(std::span<const double> t, std::span<const double> energy, DecayModel model, double t0 = -1.0);

const char* to_string(DecayModel model);

/// Flat binary snapshot: uint64 d, uint64 N, f64 L, f64 t, then row-major
/// (re, im) f64 pairs, all little-endian. `stride` downsamples each axis.
void write_snapshot(const std::string& path, const TorusGrid& grid, std::span<const cplx> field, double t,
                    std::size_t stride = 1);

struct Snapshot {
  int dim = 0;
  std::size_t points = 0;
  double side = 0.0, t = 0.0;
  ComplexField values;
};

Snapshot read_snapshot(const std::string& path);

}  // namespace plslab
