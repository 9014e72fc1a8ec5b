#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "plslab/error.hpp"
#include "plslab/observability.hpp"

using namespace plslab;

namespace {

const double kTwoPi = 2.0 * std::numbers::pi;

Mask half_torus(const TorusGrid& g) {
  Mask m(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) m[i] = g.node(i)[0] < 0.5 * g.side() ? 1 : 0;
  return m;
}

Mask single_mode(const TorusGrid& g, LatticeIndex m) {
  Mask b(g.size(), 0);
  b[g.flat_index(m)] = 1;
  return b;
}

ComplexField random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  ComplexField v(n);
  for (auto& z : v) z = {gauss(rng), gauss(rng)};
  return v;
}

Eigen::VectorXd spectrum(const ConcentrationProblem& p) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(dense_gram(p), Eigen::EigenvaluesOnly);
  return eig.eigenvalues();
}

ConcentrationProblem strip_problem(std::size_t n) {
  const TorusGrid g(2, kTwoPi, n);
  const double period = kTwoPi / 8.0;
  return make_concentration_problem(g, regions::Strip{1, 2.0}, SetSpec::grid_pattern(0.15 * period, period),
                                    period / 8.0);
}

ConcentrationProblem annulus_problem() {
  const TorusGrid g(2, kTwoPi, 64);
  return make_concentration_problem(g, regions::Annulus{12.0, 2.0}, SetSpec::ball({1.0, 2.0}, 1.2), 0.0);
}

}  // namespace

TEST_CASE("full and empty observation sets") {
  const TorusGrid g(2, kTwoPi, 32);
  const Mask band = region_mask(regions::Annulus{6.0, 1.5}, g);
  const ConcentrationProblem full(g, band, Mask(g.size(), 1));
  const ConcentrationProblem none(g, band, Mask(g.size(), 0));
  const auto v = random_vector(full.size(), 1);
  const auto a = concentration_matvec(full, v);
  const auto z = concentration_matvec(none, v);
  for (std::size_t i = 0; i < v.size(); ++i) {
    CHECK(std::abs(a[i] - v[i]) < 1e-12);
    CHECK(std::abs(z[i]) < 1e-12);
  }
  CHECK((dense_gram(full) - Eigen::MatrixXcd::Identity(full.size(), full.size())).norm() < 1e-12);
  CHECK(smallest_eigenvalue(full).lambda_min == doctest::Approx(1.0));
  EigOptions it;
  it.method = EigMethod::Iterative;
  CHECK(smallest_eigenvalue(full, it).lambda_min == doctest::Approx(1.0));
  CHECK(std::abs(smallest_eigenvalue(none).lambda_min) < 1e-12);
}

TEST_CASE("single frequency sees the observed fraction") {
  const TorusGrid g(2, 3.0, 32);
  const ConcentrationProblem half(g, single_mode(g, {3, -2, 0}), half_torus(g));
  const ComplexField one{1.0};
  CHECK(std::abs(concentration_matvec(half, one)[0] - 0.5) < 1e-13);

  const auto box = observation_mask(SetSpec::box({0.0, 0.0}, {0.9, 3.0}), 0.0, g);
  const ConcentrationProblem p(g, single_mode(g, {1, 1, 0}), box);
  CHECK(dense_gram(p)(0, 0).real() == doctest::Approx(p.observed_fraction()).epsilon(1e-12));
  CHECK(smallest_eigenvalue(p).lambda_min == doctest::Approx(p.observed_fraction()).epsilon(1e-12));
  CHECK(p.observed_fraction() == doctest::Approx(0.3).epsilon(0.05));
}

TEST_CASE("two frequencies on the half torus") {
  double prev = 0.0;
  for (std::size_t n : {64, 128, 256}) {
    const TorusGrid g(1, kTwoPi, n);
    Mask band(g.size(), 0);
    band[g.flat_index({0, 0, 0})] = 1;
    band[g.flat_index({1, 0, 0})] = 1;
    const ConcentrationProblem p(g, band, half_torus(g));
    const auto gram = dense_gram(p);
    const double off = oracle::half_torus_offdiag(static_cast<int>(n));
    CHECK(std::abs(gram(0, 1)) == doctest::Approx(off).epsilon(1e-12));
    const double lam = smallest_eigenvalue(p).lambda_min;
    CHECK(lam == doctest::Approx(oracle::two_by_two_min(off)).epsilon(1e-12));
    CHECK(lam > prev);
    prev = lam;
  }
  CHECK(std::abs(prev - (0.5 - 1.0 / std::numbers::pi)) < 0.01 * (0.5 - 1.0 / std::numbers::pi));
  CHECK(pls_constant(prev).value == doctest::Approx(2.346).epsilon(0.01));
}

TEST_CASE("dense Gram matches the matrix-free operator") {
  const auto p = strip_problem(32);
  const auto g = dense_gram(p);
  for (std::size_t b = 0; b < p.size(); b += 7) {
    ComplexField e(p.size(), 0.0);
    e[b] = 1.0;
    const auto col = concentration_matvec(p, e);
    for (std::size_t a = 0; a < p.size(); ++a)
      CHECK(std::abs(col[a] - g(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b))) < 1e-12);
  }
  for (Eigen::Index a = 0; a < g.rows(); ++a) CHECK(g(a, a).real() == doctest::Approx(p.observed_fraction()));
  CHECK((g - g.adjoint()).norm() < 1e-13);
}

TEST_CASE("matvec is Hermitian with spectrum in [0, fraction]") {
  const auto p = strip_problem(32);
  for (std::uint64_t s = 0; s < 4; ++s) {
    const auto v = random_vector(p.size(), 10 + s), w = random_vector(p.size(), 20 + s);
    const auto av = concentration_matvec(p, v), aw = concentration_matvec(p, w);
    CHECK(std::abs(inner_product(av, w) - inner_product(v, aw)) < 1e-12 * l2_norm(v) * l2_norm(w));
  }
  const auto ev = spectrum(p);
  CHECK(ev.minCoeff() >= -1e-12);
  CHECK(ev.maxCoeff() <= 1.0 + 1e-12);
  CHECK(ev.minCoeff() <= p.observed_fraction() + 1e-12);
}

TEST_CASE("dense and iterative agree") {
  const auto p = strip_problem(64);
  EigOptions dense, iter;
  dense.method = EigMethod::Dense;
  dense.use_blocks = false;
  iter.method = EigMethod::Iterative;
  iter.use_blocks = false;
  const auto a = smallest_eigenvalue(p, dense);
  const auto b = smallest_eigenvalue(p, iter);
  CHECK(a.method == "dense");
  CHECK(b.method == "iterative");
  CHECK(std::abs(a.lambda_min - b.lambda_min) <= 10 * iter.tol);
  CHECK(b.residual <= iter.tol);

  // A problem whose Krylov space does not collapse in a few steps.
  const auto q = annulus_problem();
  const auto c = smallest_eigenvalue(q, dense);
  const auto d = smallest_eigenvalue(q, iter);
  CHECK(d.iterations > 20);
  CHECK(std::abs(c.lambda_min - d.lambda_min) <= 10 * iter.tol);
}

TEST_CASE("block decomposition is exact") {
  const TorusGrid g(2, kTwoPi, 128);
  const double period = kTwoPi / 8.0;
  const auto set = SetSpec::grid_pattern(0.15 * period, period);
  const auto p = make_concentration_problem(g, regions::Annulus{20.0, 2.0}, set, period / 8.0);
  const auto periods = mask_periods(p.observed(), g);
  CHECK(periods[0] == 16);
  CHECK(periods[1] == 16);
  const auto blocks = coupling_blocks(p);
  CHECK(blocks.size() <= 64);
  std::size_t total = 0;
  for (const auto& b : blocks) total += b.size();
  CHECK(total == p.size());
  // Entries between different blocks vanish.
  const auto gram = dense_gram(p);
  std::vector<std::size_t> owner(p.size());
  for (std::size_t b = 0; b < blocks.size(); ++b)
    for (auto i : blocks[b]) owner[i] = b;
  double cross = 0.0;
  for (std::size_t a = 0; a < p.size(); ++a)
    for (std::size_t c = 0; c < p.size(); ++c)
      if (owner[a] != owner[c]) cross = std::max(cross, std::abs(gram(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c))));
  CHECK(cross < 1e-13);
  EigOptions whole;
  whole.use_blocks = false;
  CHECK(smallest_eigenvalue(p).lambda_min == doctest::Approx(smallest_eigenvalue(p, whole).lambda_min).epsilon(1e-11));
}

TEST_CASE("monotone in the observation set") {
  const TorusGrid g(2, kTwoPi, 64);
  const auto band = region_mask(regions::Annulus{10.0, 2.0}, g);
  const auto set = SetSpec::grid_pattern(0.1, kTwoPi / 4.0);
  double prev = -1.0;
  for (double delta : {0.05, 0.1, 0.2, 0.4}) {
    const ConcentrationProblem p(g, band, observation_mask(set, delta, g));
    const double lam = smallest_eigenvalue(p).lambda_min;
    CHECK(lam >= prev - 1e-12);
    prev = lam;
  }
}

TEST_CASE("modulation invariance") {
  const TorusGrid g(2, kTwoPi, 32);
  const auto omega = observation_mask(SetSpec::ball({2.0, 3.0}, 1.7), 0.0, g);
  const auto band = region_mask(regions::Annulus{5.0, 1.0}, g);
  Mask shifted(g.size(), 0);
  for (std::size_t i = 0; i < g.size(); ++i)
    if (band[i]) {
      auto m = g.lattice_index(i);
      m[0] += 3;
      m[1] -= 2;
      shifted[g.flat_index(m)] = 1;
    }
  const auto a = spectrum(ConcentrationProblem(g, band, omega));
  const auto b = spectrum(ConcentrationProblem(g, shifted, omega));
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("caps and convergence errors") {
  const auto p = annulus_problem();
  CHECK_THROWS_AS(dense_gram(p, 100), Error);
  EigOptions forced;
  forced.method = EigMethod::Dense;
  forced.use_blocks = false;
  forced.dense_cap = 100;
  CHECK_THROWS_AS(smallest_eigenvalue(p, forced), Error);
  EigOptions short_run;
  short_run.method = EigMethod::Iterative;
  short_run.use_blocks = false;
  short_run.max_iter = 3;
  try {
    smallest_eigenvalue(p, short_run);
    FAIL("expected throw");
  } catch (const NonConvergenceError& e) {
    CHECK(e.iterations() == 3);
    CHECK(e.residual() > 0.0);
  }
}

TEST_CASE("pls constant") {
  CHECK(pls_constant(1.0).value == 1.0);
  CHECK(pls_constant(0.25).value == 2.0);
  const auto c = pls_constant(1e-16);
  CHECK(c.floor_hit);
  CHECK(std::isinf(c.value));
}

TEST_CASE("bound curves") {
  BoundInputs in{0.3, 2.0, 1.0, 0.5, 2};
  const BoundConstants c;
  for (auto form : {BoundForm::Strip, BoundForm::Proposition, BoundForm::Neighborhood}) {
    const double base = theoretical_bound_log10(form, in, c);
    auto more = in;
    more.beta = 1.5;
    CHECK(theoretical_bound_log10(form, more, c) > base);
    more = in;
    more.ell = 2.5;
    CHECK(theoretical_bound_log10(form, more, c) > base);
    more = in;
    more.gamma = 0.6;
    CHECK(theoretical_bound_log10(form, more, c) < base);
  }
  auto twice = in;
  twice.beta = 2.0;
  CHECK(theoretical_bound_log10(BoundForm::Strip, twice, c) ==
        doctest::Approx(2.0 * theoretical_bound_log10(BoundForm::Strip, in, c)));
  auto half = in;
  half.delta = 0.25;
  CHECK(theoretical_bound_log10(BoundForm::Neighborhood, half, c) - theoretical_bound_log10(BoundForm::Neighborhood, in, c) ==
        doctest::Approx(3.0 * std::log10(2.0)));
  const BoundConstants e{std::numbers::e, 1.0, 1.0};
  BoundInputs near1{1.0 - 1e-12, 1.0, 0.5, 1.0, 2};
  CHECK(theoretical_bound(BoundForm::Strip, near1, e) ==
        doctest::Approx(std::pow(std::numbers::e, std::numbers::e * 0.5)));
  CHECK_THROWS_AS(theoretical_bound_log10(BoundForm::Strip, BoundInputs{1.0, 1.0, 1.0, 1.0, 2}, c), Error);
  CHECK_THROWS_AS(theoretical_bound_log10(BoundForm::Strip, BoundInputs{0.0, 1.0, 1.0, 1.0, 2}, c), Error);
}

TEST_CASE("radius sweep rows") {
  SweepSpec s{TorusGrid(2, kTwoPi, 64)};
  const double period = kTwoPi / 8.0;
  s.set = SetSpec::grid_pattern(0.15 * period, period);
  s.delta = period / 8.0;
  s.radii = {4.0, 8.0};
  s.beta = 1.0;
  s.bound = BoundInputs{0.2, 1.0, 1.0, s.delta, 2};
  const auto rows = radius_sweep(s);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].radius == 4.0);
  CHECK(rows[1].mask_size > rows[0].mask_size);
  CHECK(rows[0].constant.value == doctest::Approx(1.0 / std::sqrt(rows[0].lambda_min)));
  CHECK(rows[0].bound_log10.has_value());
  s.radii = {40.0};
  CHECK_THROWS_AS(radius_sweep(s), Error);
}
