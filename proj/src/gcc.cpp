#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "plslab/error.hpp"
#include "plslab/geometry.hpp"
#include "plslab/parallel.hpp"

namespace plslab {
namespace {

using Frame = std::array<Point, 3>;

double radical_inverse(std::size_t index, unsigned base) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (index > 0) {
    r += f * static_cast<double>(index % base);
    index /= base;
    f *= inv;
  }
  return r;
}

// Gram-Schmidt completion of `first` to an orthonormal frame of R^dim.
Frame complete_frame(const Point& first, int dim) {
  Frame frame{};
  std::vector<Point> candidates{first};
  for (int a = 0; a < dim; ++a) {
    Point e{0.0, 0.0, 0.0};
    e[a] = 1.0;
    candidates.push_back(e);
  }
  int filled = 0;
  for (const auto& c : candidates) {
    if (filled == dim) break;
    Point v = c;
    for (int pass = 0; pass < 2; ++pass)
      for (int j = 0; j < filled; ++j) {
        double proj = 0.0;
        for (int a = 0; a < dim; ++a) proj += v[a] * frame[j][a];
        for (int a = 0; a < dim; ++a) v[a] -= proj * frame[j][a];
      }
    double norm = 0.0;
    for (int a = 0; a < dim; ++a) norm += v[a] * v[a];
    norm = std::sqrt(norm);
    if (norm < 1e-8) continue;
    for (int a = 0; a < dim; ++a) v[a] /= norm;
    frame[filled++] = v;
  }
  return frame;
}

void add_axis_frames(int dim, int k, std::vector<Frame>& out) {
  std::vector<int> pick(k);
  std::iota(pick.begin(), pick.end(), 0);
  while (true) {
    Frame f{};
    for (int i = 0; i < k; ++i) f[i][pick[i]] = 1.0;
    out.push_back(f);
    int i = k - 1;
    while (i >= 0 && pick[i] == dim - k + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
}

void add_rational_frames(int dim, int order, std::vector<Frame>& out) {
  const int r1 = dim >= 2 ? order : 0;
  const int r2 = dim >= 3 ? order : 0;
  for (int a = -order; a <= order; ++a)
    for (int b = -r1; b <= r1; ++b)
      for (int c = -r2; c <= r2; ++c) {
        const int nonzero = (a != 0) + (b != 0) + (c != 0);
        if (nonzero < 2) continue;  // axis directions are already covered
        if (std::gcd(std::gcd(std::abs(a), std::abs(b)), std::abs(c)) != 1) continue;
        const int lead = a != 0 ? a : (b != 0 ? b : c);
        if (lead < 0) continue;  // one representative per line
        Point v{static_cast<double>(a), static_cast<double>(b), static_cast<double>(c)};
        const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
        for (auto& x : v) x /= n;
        out.push_back(complete_frame(v, dim));
      }
}

void add_random_frames(int dim, std::size_t count, std::mt19937_64& rng, std::vector<Frame>& out) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t i = 0; i < count; ++i) {
    Point v{0.0, 0.0, 0.0};
    for (int a = 0; a < dim; ++a) v[a] = gauss(rng);
    double n = 0.0;
    for (int a = 0; a < dim; ++a) n += v[a] * v[a];
    n = std::sqrt(n);
    if (n < 1e-12) continue;
    for (int a = 0; a < dim; ++a) v[a] /= n;
    Frame f = complete_frame(v, dim);
    // A random rotation of the completed frame's remaining axes.
    if (dim >= 3) {
      const double phi = 2.0 * std::numbers::pi * std::uniform_real_distribution<double>(0, 1)(rng);
      Point a = f[1], b = f[2];
      for (int c = 0; c < 3; ++c) {
        f[1][c] = std::cos(phi) * a[c] + std::sin(phi) * b[c];
        f[2][c] = -std::sin(phi) * a[c] + std::cos(phi) * b[c];
      }
    }
    out.push_back(f);
  }
}

void rotate_in_plane(Frame& frame, int k, int i, int j, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  for (int a = 0; a < k; ++a) {
    const double xi = frame[a][i], xj = frame[a][j];
    frame[a][i] = c * xi - s * xj;
    frame[a][j] = s * xi + c * xj;
  }
}

}  // namespace

double cube_fraction(const SetSpec& set, const Torus& torus, const CubeFrame& cube, int k,
                     double side, std::size_t quadrature, double threshold) {
  const std::size_t n = quadrature;
  const double step = side / static_cast<double>(n);
  std::array<std::size_t, 3> extent{1, 1, 1};
  for (int i = 0; i < k; ++i) extent[i] = n;
  std::size_t hits = 0;
  for (std::size_t q0 = 0; q0 < extent[0]; ++q0)
    for (std::size_t q1 = 0; q1 < extent[1]; ++q1)
      for (std::size_t q2 = 0; q2 < extent[2]; ++q2) {
        const std::array<std::size_t, 3> q{q0, q1, q2};
        Point x = cube.center;
        for (int i = 0; i < k; ++i) {
          const double t = -0.5 * side + (static_cast<double>(q[i]) + 0.5) * step;
          for (int a = 0; a < torus.dim; ++a) x[a] += t * cube.axes[i][a];
        }
        if (indicator(set, x, torus, threshold)) ++hits;
      }
  double total = 1.0;
  for (int i = 0; i < k; ++i) total *= static_cast<double>(n);
  return static_cast<double>(hits) / total;
}

GccEstimate estimate_gcc(const SetSpec& set, const Torus& torus, int k, double side,
                         const GccBudget& budget, std::uint64_t seed, double threshold) {
  const int dim = torus.dim;
  if (k < 1 || k > dim) throw Error(ErrorKind::Domain, "cube dimension k must satisfy 1 <= k <= d");
  if (!(side > 0.0) || side > 0.5 * torus.side + 1e-12)
    throw Error(ErrorKind::Domain, "cube side must lie in (0, L/2]");
  if (budget.centers == 0 || budget.quadrature == 0)
    throw Error(ErrorKind::Budget, "GCC sampling budget must be non-zero");
  if (budget.quadrature < 64)
    throw Error(ErrorKind::Domain, "cube quadrature needs at least 64 points per dimension");

  std::mt19937_64 rng(seed);
  std::vector<Frame> frames;
  add_axis_frames(dim, k, frames);
  add_rational_frames(dim, budget.rational_order, frames);
  add_random_frames(dim, budget.random_frames, rng, frames);

  std::vector<Point> centers;
  const std::size_t n_halton = (budget.centers + 1) / 2;
  static constexpr unsigned kBases[3] = {2, 3, 5};
  for (std::size_t i = 0; i < n_halton; ++i) {
    Point c{0.0, 0.0, 0.0};
    for (int a = 0; a < dim; ++a) c[a] = torus.side * radical_inverse(i + 1, kBases[a]);
    centers.push_back(c);
  }
  std::uniform_real_distribution<double> uniform(0.0, torus.side);
  while (centers.size() < budget.centers) {
    Point c{0.0, 0.0, 0.0};
    for (int a = 0; a < dim; ++a) c[a] = uniform(rng);
    centers.push_back(c);
  }

  const std::size_t nf = frames.size();
  std::vector<double> values(centers.size() * nf);
  parallel_for(centers.size(), [&](std::size_t ci) {
    for (std::size_t fi = 0; fi < nf; ++fi)
      values[ci * nf + fi] =
          cube_fraction(set, torus, CubeFrame{centers[ci], frames[fi]}, k, side,
                        budget.quadrature, threshold);
  });

  const auto worst = static_cast<std::size_t>(
      std::min_element(values.begin(), values.end()) - values.begin());
  GccEstimate est;
  est.k = k;
  est.side = side;
  est.samples = values.size();
  est.quadrature = budget.quadrature;
  est.threshold = threshold;
  est.sampled_min = values[worst];
  est.witness = CubeFrame{centers[worst / nf], frames[worst % nf]};
  double best = values[worst];

  // Coordinate descent on the worst cube: center coordinates, then small
  // rotations in each coordinate plane.
  double center_step = 0.25 * side;
  double angle_step = std::numbers::pi / 8.0;
  for (int sweep = 0; sweep < budget.refine_steps && best > 0.0; ++sweep) {
    bool improved = false;
    for (int a = 0; a < dim; ++a)
      for (double sign : {1.0, -1.0}) {
        CubeFrame trial = est.witness;
        trial.center[a] += sign * center_step;
        const double f = cube_fraction(set, torus, trial, k, side, budget.quadrature, threshold);
        if (f < best) {
          best = f;
          est.witness = trial;
          improved = true;
        }
      }
    for (int i = 0; i < dim; ++i)
      for (int j = i + 1; j < dim; ++j)
        for (double sign : {1.0, -1.0}) {
          CubeFrame trial = est.witness;
          rotate_in_plane(trial.axes, k, i, j, sign * angle_step);
          const double f = cube_fraction(set, torus, trial, k, side, budget.quadrature, threshold);
          if (f < best) {
            best = f;
            est.witness = trial;
            improved = true;
          }
        }
    if (!improved) {
      center_step *= 0.5;
      angle_step *= 0.5;
    }
  }
  est.gamma_hat = std::clamp(best, 0.0, 1.0);
  return est;
}

}  // namespace plslab
