#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "plslab/error.hpp"
#include "plslab/spectra.hpp"

using namespace plslab;

namespace {

const TorusGrid kGrid(2, 2.0 * std::numbers::pi, 64);  // lattice unit 1

bool subset(const Mask& a, const Mask& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] && !b[i]) return false;
  return true;
}

}  // namespace

TEST_CASE("annulus membership and symmetry") {
  const TorusGrid g(2, 3.0, 64);
  const double u = g.frequency_unit();
  const auto mask = region_mask(regions::Annulus{5.0 * u, 0.5 * u}, g);
  CHECK(mask[g.flat_index({5, 0, 0})]);
  CHECK(mask[g.flat_index({0, -5, 0})]);
  CHECK(mask[g.flat_index({3, 4, 0})]);
  CHECK_FALSE(mask[g.flat_index({6, 0, 0})]);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto m = g.lattice_index(i);
    if (m[0] == -32 || m[1] == -32) continue;
    const bool v = mask[i];
    CHECK(mask[g.flat_index({-m[0], m[1], 0})] == v);
    CHECK(mask[g.flat_index({m[1], m[0], 0})] == v);
  }
}

TEST_CASE("strip and ball masks") {
  const auto strip = region_mask(regions::Strip{1, 0.0}, kGrid);
  for (std::size_t i = 0; i < kGrid.size(); ++i) CHECK(static_cast<bool>(strip[i]) == (kGrid.lattice_index(i)[0] == 0));
  const auto ball = region_mask(regions::Ball{3.0}, kGrid);
  CHECK(mask_count(ball) == 29);  // lattice points with m1^2 + m2^2 <= 9

  regions::Strip rot{1, 0.5};
  const double th = std::numbers::pi / 4.0;
  rot.rotation[0] = {std::cos(th), std::sin(th), 0.0};
  rot.rotation[1] = {-std::sin(th), std::cos(th), 0.0};
  const auto diag = region_mask(rot, kGrid);
  CHECK(diag[kGrid.flat_index({3, -3, 0})]);
  CHECK_FALSE(diag[kGrid.flat_index({3, 3, 0})]);
}

TEST_CASE("Nyquist and emptiness errors") {
  try {
    region_mask(regions::Annulus{30.0, 2.5}, kGrid);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Nyquist);
    CHECK(std::string(e.what()).find("R + beta") != std::string::npos);
  }
  try {
    region_mask(regions::Annulus{2.5, 0.1}, kGrid);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Domain);
  }
}

TEST_CASE("nesting") {
  for (double r : {4.0, 9.5, 17.0}) {
    CHECK(subset(region_mask(regions::Annulus{r, 1.0}, kGrid), region_mask(regions::Annulus{r, 2.0}, kGrid)));
    CHECK(subset(region_mask(regions::Shell{Manifold::ellipse(1.0, 0.7), r, 1.0, false}, kGrid),
                 region_mask(regions::Shell{Manifold::ellipse(1.0, 0.7), r, 1.5, false}, kGrid)));
  }
  CHECK(subset(region_mask(regions::Strip{1, 1.0}, kGrid), region_mask(regions::Strip{1, 3.0}, kGrid)));
}

TEST_CASE("circle shell equals the annulus") {
  for (double r : {6.0, 12.3, 20.0}) {
    const auto ann = region_mask(regions::Annulus{r, 1.5}, kGrid);
    CHECK(region_mask(regions::Shell{Manifold::circle(), r, 1.5, true}, kGrid) == ann);
    // Sampled distance: any disagreement sits within beta/100 of the boundary.
    const auto sampled = region_mask(regions::Shell{Manifold::circle(), r, 1.5, false}, kGrid);
    for (std::size_t i = 0; i < kGrid.size(); ++i) {
      if (sampled[i] == ann[i]) continue;
      const double dist = std::abs(std::sqrt(kGrid.frequency_norm2(i)) - r);
      CHECK(std::abs(dist - 1.5) <= kShellSlack * 1.5);
    }
  }
}

TEST_CASE("ellipse and spline shells") {
  const auto ell = region_mask(regions::Shell{Manifold::ellipse(1.0, 0.5), 20.0, 1.0, false}, kGrid);
  CHECK(ell[kGrid.flat_index({20, 0, 0})]);
  CHECK(ell[kGrid.flat_index({0, 10, 0})]);
  CHECK_FALSE(ell[kGrid.flat_index({0, 20, 0})]);
  const auto sq = Manifold::spline({{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}});
  const auto sm = region_mask(regions::Shell{sq, 15.0, 1.0, false}, kGrid);
  CHECK(sm[kGrid.flat_index({15, 0, 0})]);
  CHECK_FALSE(sm[kGrid.flat_index({0, 0, 0})]);
  CHECK_THROWS_AS(region_mask(regions::Shell{sq, 15.0, 1.0, true}, kGrid), Error);
}

TEST_CASE("sphere shell in 3D") {
  const TorusGrid g(3, 2.0 * std::numbers::pi, 32);
  const auto m = region_mask(regions::Shell{Manifold::sphere(), 8.0, 1.0, true}, g);
  CHECK(m == region_mask(regions::Annulus{8.0, 1.0}, g));
  CHECK_THROWS_AS(region_mask(regions::Shell{Manifold::circle(), 8.0, 1.0, true}, g), Error);
}

TEST_CASE("cardinality growth: annulus ~ R^{d-1}, ball ~ R^d") {
  const TorusGrid g(2, 2.0 * std::numbers::pi, 256);
  for (double r : {8.0, 16.0, 32.0}) {
    const double ann = static_cast<double>(mask_count(region_mask(regions::Annulus{2 * r, 2.0}, g))) /
                       static_cast<double>(mask_count(region_mask(regions::Annulus{r, 2.0}, g)));
    CHECK(ann >= 1.0);
    CHECK(ann <= 4.0);
    const double ball = static_cast<double>(mask_count(region_mask(regions::Ball{2 * r}, g))) /
                        static_cast<double>(mask_count(region_mask(regions::Ball{r}, g)));
    CHECK(ball >= 2.0);
    CHECK(ball <= 8.0);
  }
}

TEST_CASE("mask flatness") {
  const auto strip = region_mask(regions::Strip{1, 2.0}, kGrid);
  CHECK(mask_flatness(strip, kGrid, 1).value <= 2.0 + 1e-12);

  const auto ann = region_mask(regions::Annulus{24.0, 1.0}, kGrid);
  const auto pts = mask_points(ann, kGrid, std::pair{Point{24.0, 0.0, 0.0}, 8.0});
  double theta = 0.0;
  for (const auto& p : pts) theta = std::max(theta, 2.0 * std::abs(std::atan2(p[1], p[0])));
  const double got = mask_flatness(ann, kGrid, 1, std::pair{Point{24.0, 0.0, 0.0}, 8.0}).value;
  CHECK(got == doctest::Approx(oracle::half_width_pairs(pts)).epsilon(1e-9));
  CHECK(std::abs(got - oracle::annular_arc_half_width(23.0, 25.0, theta)) <= 0.1 * got);

  const auto ball = region_mask(regions::Ball{0.5}, kGrid);
  CHECK(mask_flatness(ball, kGrid, 0).value == 0.0);
  CHECK_THROWS_AS(mask_flatness(ann, kGrid, 1, std::pair{Point{0.0, 0.0, 0.0}, 3.0}), Error);
}

TEST_CASE("region serialization") {
  const std::vector<SpectralRegion> all{
      regions::Annulus{5.0, 0.5}, regions::Ball{3.0}, regions::Strip{1, 2.0},
      regions::Shell{Manifold::ellipse(1.0, 0.6), 10.0, 1.0, false},
      regions::Shell{Manifold::spline({{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.2}}), 10.0, 1.0, false},
      regions::Shell{Manifold::sphere(), 10.0, 1.0, true}};
  for (const auto& r : all) {
    const Json j = to_json(r);
    CHECK(to_json(region_from_json(ConfigNode(j, "region"))) == j);
  }
  const Json lat = {{"type", "annulus"}, {"R", 4}, {"beta", 1}, {"units", "lattice"}};
  const auto r = std::get<regions::Annulus>(region_from_json(ConfigNode(lat, "region"), 0.5));
  CHECK(r.radius == 2.0);
  const Json bad = {{"type", "annulus"}, {"R", 4}, {"width", 1}};
  try {
    region_from_json(ConfigNode(bad, "sweep.region"));
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.path() == "sweep.region.beta");
  }
}
