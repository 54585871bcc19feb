#pragma once

#include <vector>

#include "carma/types.hpp"

namespace carma {

/// Matrix-coefficient polynomial over the reals.  Coefficients are stored
/// ascending in degree (coeffs[0] is the constant term); displays written
/// leading-term-first are converted at construction time by the caller.
struct MatrixPoly {
  int n = 0;               // coefficient dimension (n x n blocks)
  MatrixList coeffs;       // ascending degree, size deg+1

  MatrixPoly() = default;
  MatrixPoly(int dim, MatrixList c);

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  const Matrix& coeff(int k) const { return coeffs[static_cast<std::size_t>(k)]; }

  /// Exact test that the leading coefficient equals the identity.
  bool is_monic() const;

  static MatrixPoly identity(int dim) { return MatrixPoly(dim, {Matrix::Identity(dim, dim)}); }
  static MatrixPoly zero(int dim) { return MatrixPoly(dim, {Matrix::Zero(dim, dim)}); }

  /// Scalar polynomial helper: coefficients ascending in degree.
  static MatrixPoly scalar(const std::vector<double>& ascending);
};

/// Horner evaluation sum_k coeffs[k] z^k.
CMatrix mp_eval(const MatrixPoly& p, Complex z);

/// Coefficient-level product; the LEFT factor's coefficients multiply on
/// the left (matrix order matters).
MatrixPoly mp_mul(const MatrixPoly& p, const MatrixPoly& q);

MatrixPoly mp_add(const MatrixPoly& p, const MatrixPoly& q);
MatrixPoly mp_sub(const MatrixPoly& p, const MatrixPoly& q);

struct LongDivision {
  MatrixList c;   // C_0 .. C_{p-q-1}; R(z) = I z^{p-q} + sum_j C_j z^j
  MatrixPoly r;   // R assembled from c
  MatrixPoly s;   // S = Q*R - P, degree <= q-1 (zero polynomial when q = 0)
};

/// Division step defining the autoregressive polynomial R and the residue
/// S = Q*R - P of degree <= q-1.  Requires monic P of degree p, the
/// degree-q coefficient of Q equal to the identity, and q < p.  Solved by
/// back-substitution on degrees p-1 down to q; no inversions are needed
/// because the leading blocks are identities.  For q = 0 (constant Q) the
/// convention R = P, S = 0 applies.
LongDivision long_divide(const MatrixPoly& p, const MatrixPoly& q, int q_deg);

/// E(z) = E_1 z^{p-1} + ... + E_p making P(z)E(z) - Q(z)z^p of degree
/// <= p-1.  Returns E_1..E_p.
MatrixList solve_E(const MatrixPoly& p, const MatrixPoly& q);

/// F(z) = F_1 z^{q-1} + ... + F_q making Q(z)F(z) - S(z)z^q of degree
/// <= q-1.  Requires q >= 1.  Returns F_1..F_q.
MatrixList solve_F(const MatrixPoly& q, const MatrixPoly& s, int q_deg);

/// Block companion matrix for I z^m + A_1 z^{m-1} + ... + A_m: identity
/// super-diagonal blocks, last block row (-A_m, ..., -A_1).  The argument
/// lists A_1..A_m leading-term-first; for m = 1 this is just -A_1.
Matrix companion(const MatrixList& descending_coeffs);

/// Companion matrix of a monic MatrixPoly.
Matrix companion(const MatrixPoly& p);

} // namespace carma
