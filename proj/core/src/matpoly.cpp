#include "carma/matpoly.hpp"

#include <stdexcept>

namespace carma {

MatrixPoly::MatrixPoly(int dim, MatrixList c) : n(dim), coeffs(std::move(c)) {
  if (n <= 0) throw std::invalid_argument("MatrixPoly: dimension must be positive");
  if (coeffs.empty()) throw std::invalid_argument("MatrixPoly: needs at least one coefficient");
  for (const Matrix& m : coeffs) {
    if (m.rows() != n || m.cols() != n)
      throw std::invalid_argument("MatrixPoly: coefficient dimension mismatch");
    if (!m.allFinite()) throw std::invalid_argument("MatrixPoly: non-finite coefficient");
  }
}

bool MatrixPoly::is_monic() const {
  return coeffs.back() == Matrix::Identity(n, n);
}

MatrixPoly MatrixPoly::scalar(const std::vector<double>& ascending) {
  MatrixList c;
  c.reserve(ascending.size());
  for (double v : ascending) c.push_back(Matrix::Constant(1, 1, v));
  return MatrixPoly(1, std::move(c));
}

CMatrix mp_eval(const MatrixPoly& p, Complex z) {
  CMatrix acc = p.coeffs.back().cast<Complex>();
  for (int k = p.degree() - 1; k >= 0; --k)
    acc = acc * z + p.coeff(k).cast<Complex>();
  return acc;
}

MatrixPoly mp_mul(const MatrixPoly& p, const MatrixPoly& q) {
  if (p.n != q.n) throw std::invalid_argument("mp_mul: dimension mismatch");
  MatrixList out(static_cast<std::size_t>(p.degree() + q.degree()) + 1,
                 Matrix::Zero(p.n, p.n));
  for (int i = 0; i <= p.degree(); ++i)
    for (int j = 0; j <= q.degree(); ++j)
      out[static_cast<std::size_t>(i + j)] += p.coeff(i) * q.coeff(j);
  return MatrixPoly(p.n, std::move(out));
}

MatrixPoly mp_add(const MatrixPoly& p, const MatrixPoly& q) {
  if (p.n != q.n) throw std::invalid_argument("mp_add: dimension mismatch");
  MatrixList out(static_cast<std::size_t>(std::max(p.degree(), q.degree())) + 1,
                 Matrix::Zero(p.n, p.n));
  for (int k = 0; k <= p.degree(); ++k) out[static_cast<std::size_t>(k)] += p.coeff(k);
  for (int k = 0; k <= q.degree(); ++k) out[static_cast<std::size_t>(k)] += q.coeff(k);
  return MatrixPoly(p.n, std::move(out));
}

MatrixPoly mp_sub(const MatrixPoly& p, const MatrixPoly& q) {
  if (p.n != q.n) throw std::invalid_argument("mp_sub: dimension mismatch");
  MatrixList out(static_cast<std::size_t>(std::max(p.degree(), q.degree())) + 1,
                 Matrix::Zero(p.n, p.n));
  for (int k = 0; k <= p.degree(); ++k) out[static_cast<std::size_t>(k)] += p.coeff(k);
  for (int k = 0; k <= q.degree(); ++k) out[static_cast<std::size_t>(k)] -= q.coeff(k);
  return MatrixPoly(p.n, std::move(out));
}

LongDivision long_divide(const MatrixPoly& p, const MatrixPoly& q, int q_deg) {
  const int n = p.n;
  const int pd = p.degree();
  if (q.n != n) throw std::invalid_argument("long_divide: dimension mismatch");
  if (!p.is_monic()) throw std::invalid_argument("long_divide: P must be monic");
  if (q_deg >= pd) throw std::invalid_argument("long_divide: requires q < p");
  if (q.degree() < q_deg || q.coeff(q_deg) != Matrix::Identity(n, n))
    throw std::invalid_argument("long_divide: degree-q coefficient of Q must be identity");
  for (int j = q_deg + 1; j <= q.degree(); ++j)
    if (max_abs(q.coeff(j)) != 0.0)
      throw std::invalid_argument("long_divide: Q must vanish above degree q");

  LongDivision out;
  const int m = pd - q_deg;
  if (q_deg == 0) {
    // Constant Q = I: R = P and S = 0.
    out.c = MatrixList(p.coeffs.begin(), p.coeffs.end() - 1);
    out.r = p;
    out.s = MatrixPoly::zero(n);
    return out;
  }

  // Match coefficients of z^k for k = p-1 down to q:
  //   C_{k-q} = A_{p-k} - sum_{j > k-q, i+j = k} B_i C_j,  C_{p-q} = I.
  MatrixList c(static_cast<std::size_t>(m) + 1, Matrix::Zero(n, n));
  c[static_cast<std::size_t>(m)] = Matrix::Identity(n, n);
  for (int k = pd - 1; k >= q_deg; --k) {
    Matrix acc = p.coeff(k);
    for (int j = k - q_deg + 1; j <= std::min(m, k); ++j)
      acc -= q.coeff(k - j) * c[static_cast<std::size_t>(j)];
    c[static_cast<std::size_t>(k - q_deg)] = acc;
  }

  out.r = MatrixPoly(n, c);
  c.pop_back();
  out.c = std::move(c);

  MatrixPoly full = mp_sub(mp_mul(q, out.r), p);
  MatrixList s_coeffs(full.coeffs.begin(), full.coeffs.begin() + q_deg);
  out.s = MatrixPoly(n, std::move(s_coeffs));
  return out;
}

MatrixList solve_E(const MatrixPoly& p, const MatrixPoly& q) {
  const int n = p.n;
  const int pd = p.degree();
  if (q.n != n) throw std::invalid_argument("solve_E: dimension mismatch");
  if (!p.is_monic()) throw std::invalid_argument("solve_E: P must be monic");
  if (q.degree() > pd - 1) throw std::invalid_argument("solve_E: Q must have degree <= p-1");

  // e[k] is the degree-k coefficient of E; match z^{p+k} for k = p-1..0:
  //   e_k = B_k - sum_{j>k} A_{j-k} e_j.
  MatrixList e(static_cast<std::size_t>(pd), Matrix::Zero(n, n));
  for (int k = pd - 1; k >= 0; --k) {
    Matrix acc = k <= q.degree() ? q.coeff(k) : Matrix::Zero(n, n);
    for (int j = k + 1; j <= pd - 1; ++j)
      acc -= p.coeff(pd - (j - k)) * e[static_cast<std::size_t>(j)];
    e[static_cast<std::size_t>(k)] = acc;
  }
  // Return E_1..E_p (leading-term-first): E_i = e[p-i].
  MatrixList out(static_cast<std::size_t>(pd));
  for (int i = 1; i <= pd; ++i) out[static_cast<std::size_t>(i - 1)] = e[static_cast<std::size_t>(pd - i)];
  return out;
}

MatrixList solve_F(const MatrixPoly& q, const MatrixPoly& s, int q_deg) {
  const int n = q.n;
  if (q_deg < 1) throw std::invalid_argument("solve_F: requires q >= 1 (f vanishes when q = 0)");
  if (s.n != n) throw std::invalid_argument("solve_F: dimension mismatch");
  if (q.degree() < q_deg || q.coeff(q_deg) != Matrix::Identity(n, n))
    throw std::invalid_argument("solve_F: degree-q coefficient of Q must be identity");
  if (s.degree() > q_deg - 1 && [&] {
        for (int k = q_deg; k <= s.degree(); ++k)
          if (max_abs(s.coeff(k)) != 0.0) return true;
        return false;
      }())
    throw std::invalid_argument("solve_F: S must have degree <= q-1");

  // f[k] is the degree-k coefficient of F; match z^{q+k} for k = q-1..0:
  //   f_k = S_k - sum_{j>k} B_{q+k-j} f_j.
  MatrixList f(static_cast<std::size_t>(q_deg), Matrix::Zero(n, n));
  for (int k = q_deg - 1; k >= 0; --k) {
    Matrix acc = k <= s.degree() ? s.coeff(k) : Matrix::Zero(n, n);
    for (int j = k + 1; j <= q_deg - 1; ++j)
      acc -= q.coeff(q_deg + k - j) * f[static_cast<std::size_t>(j)];
    f[static_cast<std::size_t>(k)] = acc;
  }
  // Return F_1..F_q: F_i = f[q-i].
  MatrixList out(static_cast<std::size_t>(q_deg));
  for (int i = 1; i <= q_deg; ++i) out[static_cast<std::size_t>(i - 1)] = f[static_cast<std::size_t>(q_deg - i)];
  return out;
}

Matrix companion(const MatrixList& descending_coeffs) {
  const int m = static_cast<int>(descending_coeffs.size());
  if (m == 0) throw std::invalid_argument("companion: empty coefficient list");
  const int n = static_cast<int>(descending_coeffs[0].rows());
  for (const Matrix& a : descending_coeffs)
    if (a.rows() != n || a.cols() != n)
      throw std::invalid_argument("companion: coefficient dimension mismatch");
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(m) * n, static_cast<Eigen::Index>(m) * n);
  for (int i = 0; i + 1 < m; ++i)
    out.block(static_cast<Eigen::Index>(i) * n, static_cast<Eigen::Index>(i + 1) * n, n, n) =
        Matrix::Identity(n, n);
  // Last block row (-A_m, -A_{m-1}, ..., -A_1).
  for (int j = 0; j < m; ++j)
    out.block(static_cast<Eigen::Index>(m - 1) * n, static_cast<Eigen::Index>(j) * n, n, n) =
        -descending_coeffs[static_cast<std::size_t>(m - 1 - j)];
  return out;
}

Matrix companion(const MatrixPoly& p) {
  if (!p.is_monic()) throw std::invalid_argument("companion: polynomial must be monic");
  if (p.degree() < 1) throw std::invalid_argument("companion: degree must be >= 1");
  MatrixList desc;
  desc.reserve(static_cast<std::size_t>(p.degree()));
  for (int i = 1; i <= p.degree(); ++i) desc.push_back(p.coeff(p.degree() - i));
  return companion(desc);
}

} // namespace carma
