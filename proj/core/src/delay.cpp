#include "carma/delay.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

#include "carma/errors.hpp"
#include "carma/matexp.hpp"
#include "carma/numeric.hpp"

namespace carma {

namespace {

double spectral_abscissa(const Matrix& m) {
  Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw NumericalError("spectral_abscissa: eigensolver failed to converge");
  double a = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i)
    a = std::max(a, solver.eigenvalues()[i].real());
  return a;
}

} // namespace

Matrix ExpFamilyDensity::eval(double u) const {
  if (u < 0.0) return Matrix::Zero(h.rows(), k.cols());
  return h * matrix_exp(m * u) * k;
}

CMatrix ExpFamilyDensity::laplace(Complex z) const {
  // integral_0^inf e^{zu} H e^{Mu} K du = -H (M + zI)^{-1} K.
  const Eigen::Index s = m.rows();
  CMatrix shifted = m.cast<Complex>() + z * CMatrix::Identity(s, s);
  Eigen::PartialPivLU<CMatrix> lu(shifted);
  CMatrix out = -(h.cast<Complex>() * lu.solve(k.cast<Complex>()));
  if (!out.allFinite()) throw NumericalError("ExpFamilyDensity::laplace: singular shift");
  return out;
}

double ExpFamilyDensity::decay_rate() const {
  const double a = spectral_abscissa(m);
  if (a >= 0.0) throw std::invalid_argument("ExpFamilyDensity: e^{Mu} must decay");
  return -0.9 * a; // safety factor against polynomial-in-u transients
}

double ExpFamilyDensity::decay_constant() const {
  const double rate = decay_rate();
  const double horizon = 6.0 / rate;
  double c = 0.0;
  for (int i = 0; i <= 256; ++i) {
    const double u = horizon * i / 256.0;
    c = std::max(c, max_abs(eval(u)) * std::exp(rate * u));
  }
  return std::max(c, 1e-300);
}

Matrix SampledDensity::eval(double u) const {
  const Eigen::Index rows = values.front().rows();
  const Eigen::Index cols = values.front().cols();
  if (u < 0.0 || values.empty()) return Matrix::Zero(rows, cols);
  const double pos = u / dt;
  const auto k = static_cast<std::size_t>(pos);
  if (k + 1 >= values.size()) {
    if (k < values.size() && std::abs(pos - static_cast<double>(k)) < 1e-9)
      return values[k];
    return Matrix::Zero(rows, cols);
  }
  const double w = pos - static_cast<double>(k);
  return (1.0 - w) * values[k] + w * values[k + 1];
}

CMatrix SampledDensity::laplace(Complex z) const {
  const int count = static_cast<int>(values.size());
  CMatrix acc = CMatrix::Zero(values.front().rows(), values.front().cols());
  for (int i = 0; i < count; ++i) {
    const Complex e = std::exp(z * (dt * i));
    acc += (trapezoid_weight(i, count) * e) * values[static_cast<std::size_t>(i)].cast<Complex>();
  }
  return acc * dt;
}

DelayMeasure DelayMeasure::atoms_only(int n, std::vector<Atom> atoms) {
  DelayMeasure eta;
  eta.n = n;
  eta.atoms = std::move(atoms);
  for (const Atom& a : eta.atoms) {
    if (a.location < 0.0)
      throw std::invalid_argument("DelayMeasure: atoms must sit on [0, inf)");
    if (a.weight.rows() != n || a.weight.cols() != n)
      throw std::invalid_argument("DelayMeasure: atom dimension mismatch");
  }
  return eta;
}

Matrix DelayMeasure::weight_at_zero() const {
  Matrix w = Matrix::Zero(n, n);
  for (const Atom& a : atoms)
    if (a.location == 0.0) w += a.weight;
  return w;
}

double DelayMeasure::convergence_abscissa() const {
  if (exp_density) return exp_density->decay_rate();
  if (sampled_density) return sampled_density->bound_rate;
  return std::numeric_limits<double>::infinity();
}

double DelayMeasure::total_variation_bound() const {
  double tv = 0.0;
  for (const Atom& a : atoms) tv += max_abs(a.weight);
  if (exp_density) tv += exp_density->decay_constant() / exp_density->decay_rate();
  if (sampled_density) {
    std::vector<Matrix> abs_vals;
    abs_vals.reserve(sampled_density->values.size());
    for (const Matrix& v : sampled_density->values) abs_vals.push_back(v.cwiseAbs());
    tv += max_abs(trapezoid(abs_vals, sampled_density->dt));
    tv += sampled_density->bound_constant / sampled_density->bound_rate;
  }
  return tv;
}

double DelayMeasure::second_moment_bound() const {
  double m2 = 0.0;
  for (const Atom& a : atoms) m2 += a.location * a.location * max_abs(a.weight);
  if (exp_density) {
    const double l = exp_density->decay_rate();
    m2 += 2.0 * exp_density->decay_constant() / (l * l * l);
  }
  if (sampled_density) {
    const double l = sampled_density->bound_rate;
    m2 += 2.0 * sampled_density->bound_constant / (l * l * l);
    const double support = sampled_density->dt * static_cast<double>(sampled_density->values.size());
    std::vector<Matrix> w;
    w.reserve(sampled_density->values.size());
    for (std::size_t i = 0; i < sampled_density->values.size(); ++i) {
      const double u = sampled_density->dt * static_cast<double>(i);
      w.push_back(u * u * sampled_density->values[i].cwiseAbs());
    }
    if (support > 0.0 && !w.empty()) m2 += max_abs(trapezoid(w, sampled_density->dt));
  }
  return m2;
}

Matrix DelayMeasure::density_at(double u) const {
  Matrix out = Matrix::Zero(n, n);
  if (exp_density) out += exp_density->eval(u);
  if (sampled_density) out += sampled_density->eval(u);
  return out;
}

std::vector<Matrix> DelayMeasure::density_samples(double dt, int count) const {
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(count));
  if (exp_density && !sampled_density) {
    // Step e^{M dt} forward instead of one fresh exponential per sample.
    const Matrix step = matrix_exp(exp_density->m * dt);
    Matrix power = Matrix::Identity(step.rows(), step.cols());
    for (int k = 0; k < count; ++k) {
      out.push_back(exp_density->h * power * exp_density->k);
      power = power * step;
    }
    return out;
  }
  for (int k = 0; k < count; ++k) out.push_back(density_at(dt * k));
  return out;
}

CMatrix DelayMeasure::laplace(Complex z) const {
  if (has_density() && z.real() > convergence_abscissa())
    throw std::invalid_argument("DelayMeasure::laplace: z outside convergence strip");
  CMatrix acc = CMatrix::Zero(n, n);
  for (const Atom& a : atoms) acc += std::exp(z * a.location) * a.weight.cast<Complex>();
  if (exp_density) acc += exp_density->laplace(z);
  if (sampled_density) acc += sampled_density->laplace(z);
  return acc;
}

CMatrix eval_h(const DelayMeasure& eta, Complex z) {
  return -z * CMatrix::Identity(eta.n, eta.n) - eta.laplace(z);
}

DelayMeasure nest(const HigherOrderSdde& sys) {
  const int m = sys.order();
  const int n = sys.n;
  if (m < 1) throw std::invalid_argument("nest: order must be >= 1");
  for (const DelayMeasure& w : sys.varpi)
    if (w.n != n) throw std::invalid_argument("nest: dimension mismatch");
  if (m == 1) return sys.varpi[0];

  DelayMeasure eta;
  eta.n = m * n;
  // Identity atoms on the block super-diagonal.
  for (int i = 0; i + 1 < m; ++i) {
    Matrix w = Matrix::Zero(eta.n, eta.n);
    w.block(static_cast<Eigen::Index>(i) * n, static_cast<Eigen::Index>(i + 1) * n, n, n) =
        Matrix::Identity(n, n);
    eta.atoms.push_back({0.0, std::move(w)});
  }
  // Bottom block row: atoms of each varpi_j embedded into block (m-1, j).
  for (int j = 0; j < m; ++j) {
    for (const DelayMeasure::Atom& a : sys.varpi[static_cast<std::size_t>(j)].atoms) {
      Matrix w = Matrix::Zero(eta.n, eta.n);
      w.block(static_cast<Eigen::Index>(m - 1) * n, static_cast<Eigen::Index>(j) * n, n, n) =
          a.weight;
      eta.atoms.push_back({a.location, std::move(w)});
    }
  }
  // Densities: embed exp-family parts by block-diagonal merge of their
  // internal states.  Mixing sampled densities across components is not
  // supported; the sampled form can always be lifted by the caller.
  std::vector<std::pair<int, const ExpFamilyDensity*>> exps;
  for (int j = 0; j < m; ++j) {
    const DelayMeasure& w = sys.varpi[static_cast<std::size_t>(j)];
    if (w.sampled_density)
      throw std::invalid_argument("nest: sampled densities are not supported; use the exp-family form");
    if (w.exp_density) exps.emplace_back(j, &*w.exp_density);
  }
  if (!exps.empty()) {
    Eigen::Index s_total = 0;
    for (auto& [j, d] : exps) s_total += d->m.rows();
    ExpFamilyDensity merged;
    merged.h = Matrix::Zero(eta.n, s_total);
    merged.m = Matrix::Zero(s_total, s_total);
    merged.k = Matrix::Zero(s_total, eta.n);
    Eigen::Index off = 0;
    for (auto& [j, d] : exps) {
      const Eigen::Index s = d->m.rows();
      merged.h.block(static_cast<Eigen::Index>(m - 1) * n, off, n, s) = d->h;
      merged.m.block(off, off, s, s) = d->m;
      merged.k.block(off, static_cast<Eigen::Index>(j) * n, s, n) = d->k;
      off += s;
    }
    eta.exp_density = std::move(merged);
  }
  return eta;
}

DetReduction det_reduction_check(const HigherOrderSdde& sys, Complex z) {
  DetReduction out;
  out.lhs = eval_h(nest(sys), z).determinant();
  const int n = sys.n;
  const int m = sys.order();
  CMatrix acc = std::pow(-z, m) * CMatrix::Identity(n, n);
  Complex pw(1.0, 0.0);
  for (int j = 0; j < m; ++j) {
    acc -= sys.varpi[static_cast<std::size_t>(j)].laplace(z) * pw;
    pw *= -z;
  }
  out.rhs = acc.determinant();
  return out;
}

} // namespace carma
