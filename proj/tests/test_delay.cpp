#include "carma/delay.hpp"

#include <cmath>
#include <random>

#include "carma/model.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace carma;

namespace {

CarmaModel carma21() {
  // P = z^2 + 4z + 3, Q = z + 2.
  return CarmaModel(1, 2, 1, {Matrix::Constant(1, 1, 4.0), Matrix::Constant(1, 1, 3.0)},
                    {Matrix::Constant(1, 1, 2.0)});
}

CarmaModel carma31() {
  // P = (z+1)^3, Q = z + 2.
  return CarmaModel(1, 3, 1,
                    {Matrix::Constant(1, 1, 3.0), Matrix::Constant(1, 1, 3.0),
                     Matrix::Constant(1, 1, 1.0)},
                    {Matrix::Constant(1, 1, 2.0)});
}

DelayMeasure random_measure(std::mt19937_64& rng, int n) {
  std::uniform_int_distribution<int> n_atoms(0, 2);
  std::uniform_real_distribution<double> loc(0.0, 1.5);
  std::uniform_real_distribution<double> weight(-1.0, 1.0);
  std::bernoulli_distribution with_density(0.5);
  DelayMeasure eta;
  eta.n = n;
  const int atoms = n_atoms(rng);
  for (int a = 0; a < atoms; ++a) {
    Matrix w(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) w(r, c) = weight(rng);
    eta.atoms.push_back({a == 0 ? 0.0 : loc(rng), w});
  }
  if (eta.atoms.empty() || with_density(rng)) {
    // rho(u) = H e^{-lambda u} K with random small H, K.
    ExpFamilyDensity d;
    std::uniform_real_distribution<double> rate(0.8, 2.5);
    d.m = Matrix::Constant(1, 1, -rate(rng));
    d.h = Matrix::Zero(n, 1);
    d.k = Matrix::Zero(1, n);
    for (int r = 0; r < n; ++r) d.h(r, 0) = weight(rng);
    for (int c = 0; c < n; ++c) d.k(0, c) = weight(rng);
    eta.exp_density = d;
  }
  return eta;
}

} // namespace

TEST_CASE("eval_h on atoms and densities") {
  SUBCASE("OU: h(z) = -z + 2") {
    DelayMeasure eta = DelayMeasure::atoms_only(1, {{0.0, Matrix::Constant(1, 1, -2.0)}});
    const CMatrix h = eval_h(eta, Complex(0.5, 1.0));
    CHECK(std::abs(h(0, 0) - Complex(1.5, -1.0)) < 1e-15);
  }
  SUBCASE("unit atom at 1: h(iy) = -iy - e^{iy}") {
    DelayMeasure eta = DelayMeasure::atoms_only(1, {{1.0, Matrix::Identity(1, 1)}});
    const double y = 0.75;
    const CMatrix h = eval_h(eta, Complex(0.0, y));
    const Complex expected = Complex(0.0, -y) - std::exp(Complex(0.0, y));
    CHECK(std::abs(h(0, 0) - expected) < 1e-15);
  }
  SUBCASE("CARMA(2,1) delay measure at z = 0: det h(0) = P(0)/Q(0) = 3/2") {
    const CarmaModel model = carma21();
    const DelayMeasure eta = nest(model.to_higher_order_sdde());
    const CMatrix h = eval_h(eta, Complex(0.0, 0.0));
    CHECK(std::abs(h.determinant() - Complex(1.5, 0.0)) < 1e-12);
  }
  SUBCASE("convergence strip enforced for densities") {
    const CarmaModel model = carma21();
    DelayMeasure eta = nest(model.to_higher_order_sdde());
    // f decays like e^{-2u}; Re(z) far beyond the rate must be rejected.
    CHECK_THROWS_AS((void)eval_h(eta, Complex(5.0, 0.0)), std::invalid_argument);
  }
}

TEST_CASE("exp-family Laplace transform matches quadrature") {
  ExpFamilyDensity d;
  d.h = Matrix::Constant(1, 1, 1.0);
  d.m = Matrix::Constant(1, 1, -2.0);
  d.k = Matrix::Constant(1, 1, 1.0);
  const Complex z(0.3, 1.7);
  // integral_0^inf e^{zu} e^{-2u} du = 1/(2 - z).
  CHECK(std::abs(d.laplace(z)(0, 0) - 1.0 / (Complex(2.0, 0.0) - z)) < 1e-14);
}

TEST_CASE("sampled density Laplace agrees with the exp-family closed form") {
  ExpFamilyDensity d;
  d.h = Matrix::Constant(1, 1, 1.0);
  d.m = Matrix::Constant(1, 1, -2.0);
  d.k = Matrix::Constant(1, 1, 1.0);
  SampledDensity s;
  s.dt = 1.0 / 512.0;
  const int count = 1 << 14; // support 32, tail e^{-64}
  for (int k = 0; k < count; ++k)
    s.values.push_back(Matrix::Constant(1, 1, std::exp(-2.0 * s.dt * k)));
  s.bound_constant = 1.0;
  s.bound_rate = 2.0;
  for (double y : {0.0, 0.5, 3.0}) {
    const Complex zq = s.laplace(Complex(0.0, y))(0, 0);
    const Complex cf = d.laplace(Complex(0.0, y))(0, 0);
    CHECK(std::abs(zq - cf) < 1e-5);
  }
}

TEST_CASE("nest embeds higher-order systems") {
  SUBCASE("m = 1 passes through") {
    HigherOrderSdde sys;
    sys.n = 1;
    sys.varpi.push_back(DelayMeasure::atoms_only(1, {{0.0, Matrix::Constant(1, 1, -2.0)}}));
    const DelayMeasure eta = nest(sys);
    CHECK(eta.n == 1);
    REQUIRE(eta.atoms.size() == 1);
    CHECK(eta.atoms[0].weight(0, 0) == -2.0);
  }
  SUBCASE("m = 2, n = 1 block layout") {
    HigherOrderSdde sys;
    sys.n = 1;
    sys.varpi.push_back(DelayMeasure::atoms_only(1, {{0.0, Matrix::Constant(1, 1, -3.0)}}));
    sys.varpi.push_back(DelayMeasure::atoms_only(1, {{0.0, Matrix::Constant(1, 1, -4.0)}}));
    const DelayMeasure eta = nest(sys);
    CHECK(eta.n == 2);
    Matrix total = eta.weight_at_zero();
    Matrix expected(2, 2);
    expected << 0.0, 1.0, -3.0, -4.0;
    CHECK(max_abs(Matrix(total - expected)) == 0.0);
  }
}

TEST_CASE("determinant reduction identity") {
  SUBCASE("m = 1 trivially equal") {
    HigherOrderSdde sys;
    sys.n = 1;
    sys.varpi.push_back(DelayMeasure::atoms_only(1, {{0.0, Matrix::Constant(1, 1, -2.0)}}));
    const DetReduction d = det_reduction_check(sys, Complex(0.3, 0.9));
    CHECK(std::abs(d.lhs - d.rhs) < 1e-15);
  }
  SUBCASE("scalar m = 2 hand value at z = i") {
    HigherOrderSdde sys;
    sys.n = 1;
    sys.varpi.push_back(DelayMeasure::atoms_only(1, {{0.0, Matrix::Constant(1, 1, -3.0)}}));
    sys.varpi.push_back(DelayMeasure::atoms_only(1, {{0.0, Matrix::Constant(1, 1, -4.0)}}));
    const DetReduction d = det_reduction_check(sys, Complex(0.0, 1.0));
    CHECK(std::abs(d.rhs - Complex(2.0, -4.0)) < 1e-14);
    CHECK(std::abs(d.lhs - d.rhs) < 1e-13);
  }
  SUBCASE("CARMA(3,1) system: det h(z) = det P(-z)/det Q(-z)") {
    const CarmaModel model = carma31();
    const HigherOrderSdde sys = model.to_higher_order_sdde();
    for (const Complex z : {Complex(0.0, 2.0), Complex(-0.4, 1.3), Complex(0.2, -0.8)}) {
      const DetReduction d = det_reduction_check(sys, z);
      const Complex expected = mp_eval(model.p_poly(), -z).determinant() /
                               mp_eval(model.q_poly(), -z).determinant();
      CHECK(std::abs(d.lhs - expected) < 1e-10 * (1.0 + std::abs(expected)));
      CHECK(std::abs(d.rhs - expected) < 1e-10 * (1.0 + std::abs(expected)));
    }
  }
  SUBCASE("random systems at random strip points") {
    std::mt19937_64 rng(5150);
    std::uniform_int_distribution<int> pick_n(1, 2), pick_m(1, 3);
    std::uniform_real_distribution<double> re(-0.5, 0.2), im(-5.0, 5.0);
    for (int trial = 0; trial < 20; ++trial) {
      HigherOrderSdde sys;
      sys.n = pick_n(rng);
      const int m = pick_m(rng);
      for (int j = 0; j < m; ++j) sys.varpi.push_back(random_measure(rng, sys.n));
      const Complex z(re(rng), im(rng));
      const DetReduction d = det_reduction_check(sys, z);
      CHECK(std::abs(d.lhs - d.rhs) <= 1e-8 * (1.0 + std::abs(d.rhs)));
    }
  }
}

TEST_CASE("delay measure bounds are finite and positive") {
  const CarmaModel model = carma21();
  const DelayMeasure eta = nest(model.to_higher_order_sdde());
  CHECK(eta.total_variation_bound() > 0.0);
  CHECK(std::isfinite(eta.total_variation_bound()));
  CHECK(std::isfinite(eta.second_moment_bound()));
}
