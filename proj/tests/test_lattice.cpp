#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "plslab/error.hpp"
#include "plslab/lattice.hpp"

using namespace plslab;

namespace {

ComplexField random_field(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  ComplexField f(n);
  for (auto& z : f) z = {g(rng), g(rng)};
  return f;
}

double rel_diff(std::span<const cplx> a, std::span<const cplx> b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / std::max(den, 1e-300));
}

Mask random_mask(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Mask m(n);
  for (auto& b : m) b = static_cast<std::uint8_t>(rng() & 1u);
  return m;
}

}  // namespace

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(TorusGrid(0, 1.0, 8), Error);
  CHECK_THROWS_AS(TorusGrid(4, 1.0, 8), Error);
  CHECK_THROWS_AS(TorusGrid(2, 1.0, 12), Error);
  CHECK_THROWS_AS(TorusGrid(2, 1.0, 4), Error);
  CHECK_THROWS_AS(TorusGrid(2, -1.0, 8), Error);
  TorusGrid g(2, 2.0 * std::numbers::pi, 16);
  CHECK(g.size() == 256);
  CHECK(g.frequency_unit() == doctest::Approx(1.0));
  CHECK(g.nyquist() == doctest::Approx(8.0));
}

TEST_CASE("lattice index round trip and FFT ordering") {
  TorusGrid g(3, 1.0, 8);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(g.flat_index(g.lattice_index(i)) == i);
  CHECK(g.lattice_index(4)[2] == -4);
  CHECK(g.lattice_index(3)[2] == 3);
  CHECK(g.flat_index({-1, 0, 0}) == 7 * 64);
}

TEST_CASE("DFT of a constant is a spike of size sqrt(N)") {
  TorusGrid g(1, 1.0, 8);
  FourierTransform ft(g);
  ComplexField ones(8, 1.0);
  auto hat = ft.forward(ones);
  CHECK(std::abs(hat[0] - cplx(std::sqrt(8.0))) < 1e-14);
  for (std::size_t k = 1; k < 8; ++k) CHECK(std::abs(hat[k]) < 1e-14);
}

TEST_CASE("sampled exponential maps to its lattice mode") {
  TorusGrid g(1, 3.0, 16);
  FourierTransform ft(g);
  ComplexField e(16);
  for (std::size_t j = 0; j < 16; ++j) e[j] = std::exp(cplx(0.0, g.frequency_unit() * g.node(j)[0]));
  auto hat = ft.forward(e);
  for (std::size_t k = 0; k < 16; ++k) CHECK(std::abs(hat[k]) == doctest::Approx(k == 1 ? 4.0 : 0.0));
}

TEST_CASE("Parseval and round trip") {
  for (int d = 1; d <= 3; ++d) {
    TorusGrid g(d, 5.0, 16);
    FourierTransform ft(g);
    auto u = random_field(g.size(), 7 + d);
    auto hat = ft.forward(u);
    CHECK(std::abs(l2_norm(u) - l2_norm(hat)) <= 1e-12 * l2_norm(u));
    CHECK(rel_diff(ft.inverse(hat), u) < 1e-13);
  }
}

TEST_CASE("shape mismatch is a structured error") {
  TorusGrid g(2, 1.0, 8);
  FourierTransform ft(g);
  ComplexField wrong(10);
  try {
    ft.forward(wrong);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Shape);
  }
}

TEST_CASE("band projection is an orthogonal projection") {
  TorusGrid g(2, 1.0, 16);
  FourierTransform ft(g);
  const auto mask = random_mask(g.size(), 3);
  const auto u = random_field(g.size(), 11), w = random_field(g.size(), 12);
  const auto pu = band_project(ft, u, mask);
  const auto ppu = band_project(ft, pu, mask);
  CHECK(rel_diff(ppu, pu) < 1e-13);
  const auto pw = band_project(ft, w, mask);
  CHECK(std::abs(inner_product(pu, w) - inner_product(u, pw)) < 1e-12 * l2_norm(u) * l2_norm(w));
  CHECK(l2_norm(pu) <= l2_norm(u));

  CHECK(rel_diff(band_project(ft, u, Mask(g.size(), 1)), u) < 1e-13);
  CHECK(l2_norm(band_project(ft, u, Mask(g.size(), 0))) == 0.0);

  const auto bf = make_band_field(ft, u, mask);
  CHECK(band_defect(ft, bf) < 1e-12);
  const auto bf2 = band_project(ft, bf, mask);
  CHECK(rel_diff(bf2.values, bf.values) < 1e-13);
}

TEST_CASE("fractional symbol values") {
  TorusGrid g(2, 2.0 * std::numbers::pi, 8);
  FractionalSymbol sym(g, 2.0);
  CHECK(sym[0] == doctest::Approx(1.0));
  CHECK(sym[g.flat_index({1, 1, 0})] == doctest::Approx(3.0));
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(sym[i] >= 1.0);
  CHECK_THROWS_AS(FractionalSymbol(g, 0.0), Error);
}

TEST_CASE("apply_symbol") {
  // |xi|^2 = 3 needs a torus with frequency unit sqrt(3) on one axis.
  TorusGrid g(1, 2.0 * std::numbers::pi / std::sqrt(3.0), 8);
  FourierTransform ft(g);
  FractionalSymbol sym(g, 2.0);
  ComplexField hat(8, 0.0);
  hat[1] = 1.0;
  auto u = ft.inverse(hat);
  auto out = ft.forward(apply_symbol(ft, u, sym, 0.5));
  CHECK(std::abs(out[1] - cplx(2.0)) < 1e-13);

  TorusGrid g2(2, 3.0, 16);
  FourierTransform ft2(g2);
  FractionalSymbol s2(g2, 1.3);
  auto v = random_field(g2.size(), 5);
  CHECK(rel_diff(apply_symbol(ft2, v, s2, 0.0), v) < 1e-13);
  auto ab = apply_symbol(ft2, apply_symbol(ft2, v, s2, 0.7), s2, -0.3);
  CHECK(rel_diff(ab, apply_symbol(ft2, v, s2, 0.4)) < 1e-12);

  const auto mask = random_mask(g2.size(), 9);
  auto sp = apply_symbol(ft2, band_project(ft2, v, mask), s2, 1.0);
  auto ps = band_project(ft2, apply_symbol(ft2, v, s2, 1.0), mask);
  CHECK(rel_diff(sp, ps) < 1e-13);
}

TEST_CASE("sobolev norm") {
  TorusGrid g(1, 2.0 * std::numbers::pi / std::sqrt(3.0), 8);
  FourierTransform ft(g);
  CHECK(sobolev_norm(ft, ComplexField(8, 0.0), 1.0) == 0.0);
  ComplexField hat(8, 0.0);
  hat[0] = 1.0;
  CHECK(sobolev_norm(ft, ft.inverse(hat), 2.7) == doctest::Approx(1.0));
  hat[0] = 0.0;
  hat[1] = 1.0;
  CHECK(sobolev_norm(ft, ft.inverse(hat), 1.0) == doctest::Approx(2.0));
  auto u = random_field(8, 2);
  CHECK(std::abs(sobolev_norm(ft, u, 0.0) - l2_norm(u)) < 1e-13 * l2_norm(u));
}
