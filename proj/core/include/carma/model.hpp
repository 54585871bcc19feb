#pragma once

#include <string>
#include <vector>

#include "carma/delay.hpp"
#include "carma/matexp.hpp"
#include "carma/matpoly.hpp"
#include "carma/stability.hpp"

namespace carma {

/// A causal, invertible CARMA(p, q) model in n dimensions together with
/// everything derived from its polynomials:
///   P(z) = I z^p + A_1 z^{p-1} + ... + A_p,
///   Q(z) = B_0 + B_1 z + ... + B_{q-1} z^{q-1} + I z^q
/// (the degree-q coefficient is the identity by convention, and Q == I when
/// q = 0).  Construction computes the autoregressive coefficients C_j, the
/// kernel coefficients E and F, both companion matrices and an exponential
/// decay certificate, and verifies the half-plane conditions on P and Q.
/// Instances are immutable after construction and safe to share.
class CarmaModel {
 public:
  CarmaModel(int n, int p, int q, MatrixList a_coeffs, MatrixList b_coeffs,
             double halfplane_tol = kHalfPlaneTolerance);

  int n() const { return n_; }
  int p() const { return p_; }
  int q() const { return q_; }
  int order() const { return p_ - q_; } // order m of the associated delay equation

  const MatrixPoly& p_poly() const { return p_poly_; }
  const MatrixPoly& q_poly() const { return q_poly_; }
  const MatrixList& c_coeffs() const { return c_; }      // C_0..C_{p-q-1}
  const MatrixPoly& s_poly() const { return s_; }        // S = QR - P
  const MatrixPoly& r_poly() const { return r_; }        // R = I z^{p-q} + ...
  const MatrixList& e_coeffs() const { return e_; }      // E_1..E_p
  const MatrixList& f_coeffs() const { return f_; }      // F_1..F_q, empty when q = 0
  const Matrix& a_companion() const { return a_comp_; }  // np x np
  const Matrix& b_companion() const;                     // nq x nq, q >= 1 only
  const Matrix& e_stack() const { return e_stack_; }     // np x n
  const Matrix& f_stack() const;                         // nq x n, q >= 1 only
  const HalfPlaneReport& p_report() const { return p_report_; }
  const HalfPlaneReport& q_report() const { return q_report_; }

  double decay_rate() const { return decay_rate_; }          // epsilon
  double decay_constant() const { return decay_constant_; }  // C with |kernels| <= C e^{-eps t}

  /// Moving-average kernel g~(t) = 1_{t>=0} (e_1 (x) I)^T e^{At} E.
  Matrix gtilde(double t) const;
  /// Inversion kernel f(t) = 1_{t>=0} (e_1 (x) I)^T e^{Bt} F; identically
  /// zero when q = 0.
  Matrix f_kernel(double t) const;
  /// Prediction weight g~_j(t), j = 1..p-q.
  Matrix gtilde_j(int j, double t) const;

  /// Kernel samples at t = offset + k*dt, k = 0..count-1, by exponential
  /// stepping (one matrix exponential, then repeated multiplication).
  std::vector<Matrix> sample_gtilde(double dt, int count, double offset = 0.0) const;
  std::vector<Matrix> sample_f(double dt, int count, double offset = 0.0) const;
  std::vector<Matrix> sample_gtilde_j(int j, double dt, int count, double offset = 0.0) const;

  /// Smallest grid-aligned horizon T with max(|g~(T)|, |f(T)|) < tol,
  /// found from the analytic guess log(C/tol)/eps and refined on a grid.
  double truncation_horizon(double tol, double grid_step = 1.0 / 64.0) const;

  /// The order-(p-q) delay system solved by the model: varpi_j = -C_j delta_0
  /// for j >= 1 and varpi_0 = -C_0 delta_0 + f(u) du.
  HigherOrderSdde to_higher_order_sdde() const;

  /// Delay kernel f as an exponential-family density (q >= 1 only).
  ExpFamilyDensity f_density() const;

  /// Human-readable summary: dimensions, coefficients, spectra, decay.
  std::string summary() const;

 private:
  int n_, p_, q_;
  MatrixPoly p_poly_, q_poly_;
  MatrixList c_;
  MatrixPoly r_, s_;
  MatrixList e_, f_;
  Matrix a_comp_, b_comp_;
  Matrix e_stack_, f_stack_;
  std::vector<Matrix> gtilde_j_loads_; // sum_{k=j}^{p-q} A^{k-j} E C_k per j
  HalfPlaneReport p_report_, q_report_;
  double decay_rate_ = 0.0;
  double decay_constant_ = 0.0;
};

/// Assembles P(z) = I z^p + A_1 z^{p-1} + ... + A_p from leading-term-first
/// coefficients A_1..A_p.
MatrixPoly build_p_poly(int n, const MatrixList& a_coeffs);

/// Assembles Q(z) = B_0 + ... + B_{q-1} z^{q-1} + I z^q from B_0..B_{q-1}.
MatrixPoly build_q_poly(int n, int q, const MatrixList& b_coeffs);

} // namespace carma
