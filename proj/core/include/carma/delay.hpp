#pragma once

#include <optional>
#include <vector>

#include "carma/matpoly.hpp"
#include "carma/types.hpp"

namespace carma {

/// Exponential-family density rho(u) = H e^{Mu} K on [0, inf).  Carries its
/// Laplace transform in closed form: L[rho](z) = -H (M + zI)^{-1} K, valid
/// for Re(z) below the decay rate of e^{Mu}.  CARMA delay kernels f are of
/// this form, with H the first block row selector, M the Q-companion and
/// K the stacked F coefficients.
struct ExpFamilyDensity {
  Matrix h;  // rows x s
  Matrix m;  // s x s, spectral abscissa < 0
  Matrix k;  // s x cols

  Matrix eval(double u) const;
  CMatrix laplace(Complex z) const;
  double decay_rate() const;     // lambda with |rho(u)| <= C e^{-lambda u}
  double decay_constant() const; // the C above, estimated on a grid
};

/// Density given by uniform samples on [0, (count-1)*dt] with an explicit
/// exponential decay bound beyond the sampled range.
struct SampledDensity {
  double dt = 0.0;
  std::vector<Matrix> values;
  double bound_constant = 0.0; // Cd
  double bound_rate = 0.0;     // lambda_d

  Matrix eval(double u) const; // linear interpolation, 0 beyond support
  CMatrix laplace(Complex z) const; // trapezoid over the sample grid
};

/// Finite signed n x n matrix measure on [0, inf): a list of atoms plus an
/// optional absolutely continuous part.
struct DelayMeasure {
  struct Atom {
    double location = 0.0; // >= 0
    Matrix weight;
  };

  int n = 0;
  std::vector<Atom> atoms;
  std::optional<ExpFamilyDensity> exp_density;
  std::optional<SampledDensity> sampled_density;

  static DelayMeasure atoms_only(int n, std::vector<Atom> atoms);

  bool has_density() const { return exp_density.has_value() || sampled_density.has_value(); }
  /// Weight of the atom at location 0 (zero matrix if absent).
  Matrix weight_at_zero() const;
  /// Largest Re(z) for which the Laplace transform converges (infinity for
  /// pure-atom measures).
  double convergence_abscissa() const;
  /// Upper bound on the total variation |eta|([0,inf)).
  double total_variation_bound() const;
  /// Upper bound on the second moment of |eta|; the existence theory
  /// requires this to be finite, which holds for both density forms.
  double second_moment_bound() const;
  /// Density value at u (zero when no density present).
  Matrix density_at(double u) const;
  /// Samples the density on t = k*dt, k = 0..count-1.
  std::vector<Matrix> density_samples(double dt, int count) const;
  /// L[eta](z) = sum_a W_a e^{z t_a} + integral e^{zu} rho(u) du.
  CMatrix laplace(Complex z) const;
};

/// Characteristic function h(z) = -z I - L[eta](z).  Errors if z lies
/// outside the convergence strip of the density part.
CMatrix eval_h(const DelayMeasure& eta, Complex z);

/// m-th order delay system given by measures varpi_0..varpi_{m-1} sharing
/// dimension n.
struct HigherOrderSdde {
  int n = 0;
  std::vector<DelayMeasure> varpi;

  int order() const { return static_cast<int>(varpi.size()); }
};

/// First-order embedding of an m-th order system: an mn-dimensional measure
/// with identity atoms at 0 on the block super-diagonal and bottom block
/// row (varpi_0, ..., varpi_{m-1}).  For m = 1 returns varpi_0 unchanged.
DelayMeasure nest(const HigherOrderSdde& sys);

struct DetReduction {
  Complex lhs; // det of the nested mn x mn characteristic function
  Complex rhs; // det(I (-z)^m - sum_j L[varpi_j](z) (-z)^j), n x n
};

/// Both sides of the order-reduction determinant identity at z.
DetReduction det_reduction_check(const HigherOrderSdde& sys, Complex z);

} // namespace carma
