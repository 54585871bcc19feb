#include "carma/matpoly.hpp"

#include <random>

#include "doctest.h"
#include "helpers.hpp"

using namespace carma;
using carma::testing::random_carma_coeffs;
using carma::testing::random_stable_poly;

namespace {

MatrixPoly cube_poly() { return MatrixPoly::scalar({1.0, 3.0, 3.0, 1.0}); } // (z+1)^3
MatrixPoly z_plus_2() { return MatrixPoly::scalar({2.0, 1.0}); }

double scalar_of(const CMatrix& m) {
  REQUIRE(m.rows() == 1);
  return m(0, 0).real();
}

} // namespace

TEST_CASE("mp_eval basics") {
  const MatrixPoly eye = MatrixPoly::identity(3);
  CHECK(max_abs(CMatrix(mp_eval(eye, Complex(5.0, 0.0)) - CMatrix::Identity(3, 3))) == 0.0);

  // z = -1 is a triple root of (z+1)^3.
  CHECK(std::abs(mp_eval(cube_poly(), Complex(-1.0, 0.0))(0, 0)) < 1e-14);

  const CMatrix lin = mp_eval(z_plus_2(), Complex(0.0, 1.0));
  CHECK(std::abs(lin(0, 0) - Complex(2.0, 1.0)) < 1e-15);
}

TEST_CASE("mp_mul matches hand expansion and respects order") {
  const MatrixPoly prod = mp_mul(z_plus_2(), MatrixPoly::scalar({1.0, 1.0, 1.0}));
  const MatrixPoly expected = MatrixPoly::scalar({2.0, 3.0, 3.0, 1.0});
  REQUIRE(prod.degree() == 3);
  for (int k = 0; k <= 3; ++k)
    CHECK(prod.coeff(k)(0, 0) == doctest::Approx(expected.coeff(k)(0, 0)).epsilon(1e-15));

  const MatrixPoly eye = MatrixPoly::identity(2);
  Matrix up = Matrix::Zero(2, 2), down = Matrix::Zero(2, 2);
  up(0, 1) = 1.0;
  down(1, 0) = 1.0;
  const MatrixPoly pu(2, {up}), pd(2, {down});
  CHECK(max_abs(Matrix(mp_mul(eye, pd).coeff(0) - down)) == 0.0);
  // Non-commutativity witness: up*down != down*up.
  CHECK(max_abs(Matrix(mp_mul(pu, pd).coeff(0) - mp_mul(pd, pu).coeff(0))) == 1.0);

  const MatrixPoly bad = MatrixPoly::identity(3);
  CHECK_THROWS_AS((void)mp_mul(pu, bad), std::invalid_argument);
}

TEST_CASE("long_divide worked examples") {
  SUBCASE("q = 0 collapses to R = P, S = 0") {
    const LongDivision div = long_divide(cube_poly(), MatrixPoly::identity(1), 0);
    REQUIRE(div.c.size() == 3);
    CHECK(div.c[0](0, 0) == 1.0);
    CHECK(div.c[1](0, 0) == 3.0);
    CHECK(div.c[2](0, 0) == 3.0);
    CHECK(div.r.degree() == 3);
    CHECK(max_abs(div.s.coeff(0)) == 0.0);
  }
  SUBCASE("p=3, q=1: (z+1)^3 over z+2") {
    const LongDivision div = long_divide(cube_poly(), z_plus_2(), 1);
    REQUIRE(div.c.size() == 2);
    CHECK(div.c[1](0, 0) == doctest::Approx(1.0).epsilon(1e-15)); // C_1 = A_1 - B_0
    CHECK(div.c[0](0, 0) == doctest::Approx(1.0).epsilon(1e-15)); // C_0 = A_2 + B_0(B_0 - A_1)
    REQUIRE(div.s.degree() == 0);
    CHECK(div.s.coeff(0)(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("p=2, q=1: z^2+4z+3 over z+2") {
    const MatrixPoly p = MatrixPoly::scalar({3.0, 4.0, 1.0});
    const LongDivision div = long_divide(p, z_plus_2(), 1);
    REQUIRE(div.c.size() == 1);
    CHECK(div.c[0](0, 0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(div.s.coeff(0)(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("precondition violations") {
    const MatrixPoly nonmonic = MatrixPoly::scalar({1.0, 2.0});
    CHECK_THROWS_AS((void)long_divide(nonmonic, MatrixPoly::identity(1), 0), std::invalid_argument);
    CHECK_THROWS_AS((void)long_divide(z_plus_2(), cube_poly(), 3), std::invalid_argument);
    const MatrixPoly wrong_lead = MatrixPoly::scalar({2.0, 2.0});
    CHECK_THROWS_AS((void)long_divide(cube_poly(), wrong_lead, 1), std::invalid_argument);
  }
}

TEST_CASE("solve_E worked examples") {
  SUBCASE("p = 1, q = 0") {
    const MatrixPoly p = MatrixPoly::scalar({2.0, 1.0});
    const MatrixList e = solve_E(p, MatrixPoly::identity(1));
    REQUIRE(e.size() == 1);
    CHECK(e[0](0, 0) == 1.0);
  }
  SUBCASE("MCARMA(3,1) block example: E_1 = 0, E_2 = I, E_3 = B_0 - A_1") {
    const int n = 2;
    Matrix a1(n, n), a2(n, n), a3(n, n), b0(n, n);
    a1 << 3.0, 0.4, -0.2, 2.5;
    a2 << 2.0, 0.1, 0.3, 1.5;
    a3 << 0.7, 0.0, -0.1, 0.9;
    b0 << 1.8, 0.2, 0.0, 2.2;
    const MatrixPoly p = build_p_poly(n, {a1, a2, a3});
    const MatrixPoly q = build_q_poly(n, 1, {b0});
    const MatrixList e = solve_E(p, q);
    REQUIRE(e.size() == 3);
    CHECK(max_abs(e[0]) == 0.0);
    CHECK(max_abs(Matrix(e[1] - Matrix::Identity(n, n))) == 0.0);
    CHECK(max_abs(Matrix(e[2] - (b0 - a1))) < 1e-14);
  }
  SUBCASE("scalar p=2, q=1") {
    const MatrixPoly p = MatrixPoly::scalar({3.0, 4.0, 1.0});
    const MatrixPoly q = MatrixPoly::scalar({2.0, 1.0});
    const MatrixList e = solve_E(p, q);
    REQUIRE(e.size() == 2);
    CHECK(e[0](0, 0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(e[1](0, 0) == doctest::Approx(-2.0).epsilon(1e-15));
  }
}

TEST_CASE("solve_F worked examples") {
  SUBCASE("p=3, q=1 gives F = 1") {
    const LongDivision div = long_divide(cube_poly(), z_plus_2(), 1);
    const MatrixList f = solve_F(z_plus_2(), div.s, 1);
    REQUIRE(f.size() == 1);
    // Symbolic route: F = B_0 (A_2 - B_0 (A_1 - B_0)) - A_3 = 2(3-2*1)-1 = 1.
    CHECK(f[0](0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("p=2, q=1 gives F = 1") {
    const MatrixPoly p = MatrixPoly::scalar({3.0, 4.0, 1.0});
    const LongDivision div = long_divide(p, z_plus_2(), 1);
    const MatrixList f = solve_F(z_plus_2(), div.s, 1);
    REQUIRE(f.size() == 1);
    CHECK(f[0](0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("zero residue gives F = 0") {
    const MatrixList f = solve_F(z_plus_2(), MatrixPoly::zero(1), 1);
    REQUIRE(f.size() == 1);
    CHECK(f[0](0, 0) == 0.0);
  }
  SUBCASE("q = 0 is an error (f vanishes by convention)") {
    CHECK_THROWS_AS((void)solve_F(MatrixPoly::identity(1), MatrixPoly::zero(1), 0),
                    std::invalid_argument);
  }
}

TEST_CASE("companion matrices") {
  CHECK(companion(MatrixList{Matrix::Constant(1, 1, 2.0)})(0, 0) == -2.0);

  const MatrixPoly p = MatrixPoly::scalar({3.0, 4.0, 1.0});
  const Matrix comp = companion(p);
  Matrix expected(2, 2);
  expected << 0.0, 1.0, -3.0, -4.0;
  CHECK(max_abs(Matrix(comp - expected)) == 0.0);

  CHECK_THROWS_AS((void)companion(MatrixList{}), std::invalid_argument);

  // det(zI - companion(P)) == det P(z) at random complex points.
  std::mt19937_64 rng(7101);
  std::uniform_real_distribution<double> unit(-2.0, 2.0);
  for (int n : {1, 2}) {
    const MatrixPoly poly = random_stable_poly(rng, n, 3);
    const Matrix c = companion(poly);
    for (int trial = 0; trial < 5; ++trial) {
      const Complex z(unit(rng), unit(rng));
      const CMatrix zi = z * CMatrix::Identity(c.rows(), c.cols()) - c.cast<Complex>();
      const Complex lhs = zi.determinant();
      const Complex rhs = mp_eval(poly, z).determinant();
      CHECK(std::abs(lhs - rhs) < 1e-9 * (1.0 + std::abs(rhs)));
    }
  }
}

TEST_CASE("long-division degree law on random stable models") {
  std::mt19937_64 rng(20240811);
  std::uniform_int_distribution<int> pick_n(1, 2);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = pick_n(rng);
    std::uniform_int_distribution<int> pick_p(1, 5);
    const int p = pick_p(rng);
    std::uniform_int_distribution<int> pick_q(0, p - 1);
    const int q = pick_q(rng);
    const auto coeffs = random_carma_coeffs(rng, n, p, q);
    const MatrixPoly pp = build_p_poly(n, coeffs.a);
    const MatrixPoly qp = build_q_poly(n, q, coeffs.b);
    const LongDivision div = long_divide(pp, qp, q);
    // Independent check: rebuild Q*R - P by coefficient multiplication.
    const MatrixPoly resid = mp_sub(mp_mul(qp, div.r), pp);
    for (int k = q; k <= resid.degree(); ++k)
      CHECK(max_abs(resid.coeff(k)) < 1e-10);
    // And the returned S matches the low-degree part.
    for (int k = 0; k < q; ++k)
      CHECK(max_abs(Matrix(resid.coeff(k) - div.s.coeff(k))) < 1e-12);
  }
}

TEST_CASE("division and solves are bit-reproducible") {
  std::mt19937_64 rng(99);
  const auto coeffs = random_carma_coeffs(rng, 2, 4, 2);
  const MatrixPoly pp = build_p_poly(2, coeffs.a);
  const MatrixPoly qp = build_q_poly(2, 2, coeffs.b);
  const LongDivision d1 = long_divide(pp, qp, 2);
  const LongDivision d2 = long_divide(pp, qp, 2);
  for (std::size_t j = 0; j < d1.c.size(); ++j)
    CHECK(d1.c[j] == d2.c[j]);
  const MatrixList e1 = solve_E(pp, qp), e2 = solve_E(pp, qp);
  for (std::size_t j = 0; j < e1.size(); ++j) CHECK(e1[j] == e2[j]);
  const MatrixList f1 = solve_F(qp, d1.s, 2), f2 = solve_F(qp, d2.s, 2);
  for (std::size_t j = 0; j < f1.size(); ++j) CHECK(f1[j] == f2[j]);
}

TEST_CASE("scalar characteristic evaluation sanity") {
  // (z+1)^3 at z = 2: 27; through Horner on the ascending coefficients.
  CHECK(scalar_of(mp_eval(cube_poly(), Complex(2.0, 0.0))) == doctest::Approx(27.0));
}
