#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "carma/matpoly.hpp"
#include "carma/model.hpp"
#include "carma/types.hpp"

namespace carma::testing {

// Random monic stable polynomial: product of degree-1 factors (zI + G) with
// eig(G) in the right half-plane, so all zeros of det P sit left of the
// axis.  Root real parts in [0.2, 2], imaginary parts in [-2, 2].
inline Matrix random_positive_stable_block(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> re(0.2, 2.0);
  std::uniform_real_distribution<double> im(0.2, 2.0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::bernoulli_distribution complex_pair(0.5);
  if (n == 1) return Matrix::Constant(1, 1, re(rng));
  Matrix core(2, 2);
  if (complex_pair(rng)) {
    const double a = re(rng), b = im(rng);
    core << a, b, -b, a;
  } else {
    core << re(rng), 0.0, 0.0, re(rng);
  }
  Matrix basis(2, 2);
  do {
    basis << unit(rng), unit(rng), unit(rng), unit(rng);
  } while (std::abs(basis.determinant()) < 0.3);
  return basis * core * basis.inverse();
}

inline MatrixPoly random_stable_poly(std::mt19937_64& rng, int n, int degree) {
  MatrixPoly acc = MatrixPoly::identity(n);
  for (int i = 0; i < degree; ++i) {
    MatrixPoly factor(n, {random_positive_stable_block(rng, n), Matrix::Identity(n, n)});
    acc = mp_mul(acc, factor);
  }
  return acc;
}

struct RandomCarmaCoeffs {
  MatrixList a; // A_1..A_p
  MatrixList b; // B_0..B_{q-1}
};

inline RandomCarmaCoeffs random_carma_coeffs(std::mt19937_64& rng, int n, int p, int q) {
  const MatrixPoly pp = random_stable_poly(rng, n, p);
  const MatrixPoly qp = random_stable_poly(rng, n, q);
  RandomCarmaCoeffs out;
  for (int i = 1; i <= p; ++i) out.a.push_back(pp.coeff(p - i));
  for (int j = 0; j < q; ++j) out.b.push_back(qp.coeff(j));
  return out;
}

// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
    const double fa = static_cast<double>(i) / a.size();
    const double fb = static_cast<double>(j) / b.size();
    d = std::max(d, std::abs(fa - fb));
  }
  return d;
}

// Simpson rule on [a, b] for scalar integrands.
template <typename F>
double simpson(F f, double a, double b, int intervals) {
  if (intervals % 2 != 0) ++intervals;
  const double h = (b - a) / intervals;
  double acc = f(a) + f(b);
  for (int i = 1; i < intervals; ++i) acc += f(a + h * i) * (i % 2 == 1 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

inline double sample_mean(const std::vector<double>& xs) {
  double acc = 0.0;
  for (double x : xs) acc += x;
  return acc / static_cast<double>(xs.size());
}

inline double sample_variance(const std::vector<double>& xs) {
  const double mu = sample_mean(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - mu) * (x - mu);
  return acc / static_cast<double>(xs.size() - 1);
}

inline double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  const double ma = sample_mean(a), mb = sample_mean(b);
  double num = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - ma) * (b[i] - mb);
    va += (a[i] - ma) * (a[i] - ma);
    vb += (b[i] - mb) * (b[i] - mb);
  }
  return num / std::sqrt(va * vb);
}

// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double mx = sample_mean(x), my = sample_mean(y);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (x[i] - mx) * (y[i] - my);
    den += (x[i] - mx) * (x[i] - mx);
  }
  return num / den;
}

} // namespace carma::testing
