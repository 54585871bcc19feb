#include "carma/stability.hpp"

#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"

using namespace carma;

TEST_CASE("halfplane_check locates companion spectra") {
  SUBCASE("z + 2: single eigenvalue -2, pass") {
    const HalfPlaneReport r = halfplane_check(MatrixPoly::scalar({2.0, 1.0}));
    REQUIRE(r.eigenvalues.size() == 1);
    CHECK(r.eigenvalues[0].real() == doctest::Approx(-2.0));
    CHECK(r.max_real_part == doctest::Approx(-2.0));
    CHECK(r.margin == doctest::Approx(2.0));
    CHECK(r.pass);
  }
  SUBCASE("(z+1)^3: triple eigenvalue -1, pass") {
    const HalfPlaneReport r = halfplane_check(MatrixPoly::scalar({1.0, 3.0, 3.0, 1.0}));
    REQUIRE(r.eigenvalues.size() == 3);
    for (const Complex& l : r.eigenvalues) CHECK(std::abs(l - Complex(-1.0, 0.0)) < 1e-5);
    CHECK(r.pass);
  }
  SUBCASE("z - 1: right-half-plane root, fail") {
    const HalfPlaneReport r = halfplane_check(MatrixPoly::scalar({-1.0, 1.0}));
    CHECK(r.max_real_part == doctest::Approx(1.0));
    CHECK_FALSE(r.pass);
  }
  SUBCASE("non-monic input rejected") {
    CHECK_THROWS_AS((void)halfplane_check(MatrixPoly::scalar({1.0, 2.0})), std::invalid_argument);
  }
}

TEST_CASE("halfplane_check is invariant under z -> cz rescaling") {
  std::mt19937_64 rng(314);
  for (int n : {1, 2}) {
    const MatrixPoly p = carma::testing::random_stable_poly(rng, n, 3);
    MatrixPoly flipped = p;
    // Flip one root family to the right half-plane for a failing variant.
    flipped.coeffs[0] = -flipped.coeffs[0];
    for (const MatrixPoly& poly : {p, flipped}) {
      const bool base = halfplane_check(poly).pass;
      for (double c : {0.1, 10.0}) {
        MatrixPoly scaled = poly;
        // P(cz)/c^p monic again: coefficient k scales by c^{k-p}.
        const int deg = poly.degree();
        for (int k = 0; k <= deg; ++k)
          scaled.coeffs[static_cast<std::size_t>(k)] *= std::pow(c, k - deg);
        CHECK(halfplane_check(scaled).pass == base);
      }
    }
  }
}

TEST_CASE("msdde_char_scan on the OU measure") {
  // eta = -2 delta_0, h(iy) = -iy + 2, |h| minimized at y = 0.
  DelayMeasure eta = DelayMeasure::atoms_only(1, {{0.0, Matrix::Constant(1, 1, -2.0)}});
  std::vector<double> grid;
  for (int i = -2048; i <= 2048; ++i) grid.push_back(50.0 * i / 2048.0);
  const CharScan scan = msdde_char_scan(eta, grid);
  CHECK(scan.min_abs_det == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(scan.argmin == doctest::Approx(0.0));
}

TEST_CASE("msdde_char_scan flags the degenerate zero measure") {
  DelayMeasure eta = DelayMeasure::atoms_only(1, {{0.0, Matrix::Zero(1, 1)}});
  std::vector<double> grid{-1.0, -0.5, 0.0, 0.5, 1.0};
  const CharScan scan = msdde_char_scan(eta, grid);
  CHECK(scan.min_abs_det == doctest::Approx(0.0));
  CHECK(scan.argmin == doctest::Approx(0.0));
}

TEST_CASE("msdde_char_scan rejects asymmetric grids") {
  DelayMeasure eta = DelayMeasure::atoms_only(1, {{0.0, Matrix::Constant(1, 1, -2.0)}});
  CHECK_THROWS_AS((void)msdde_char_scan(eta, {0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS((void)msdde_char_scan(eta, {}), std::invalid_argument);
}

TEST_CASE("default_scan_grid is symmetric and sized by the measure scale") {
  DelayMeasure eta = DelayMeasure::atoms_only(1, {{0.0, Matrix::Constant(1, 1, -2.0)}});
  const std::vector<double> grid = default_scan_grid(eta, 64);
  REQUIRE(grid.size() == 64);
  CHECK(grid.front() == doctest::Approx(-grid.back()));
  CHECK(grid.back() == doctest::Approx(100.0)); // 50 * max(1, |{-2}|)
}
