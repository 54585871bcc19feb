#include "carma/model.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "carma/errors.hpp"

namespace carma {

Matrix matrix_exp(const Matrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("matrix_exp: square matrix required");
  if (!m.allFinite()) throw std::invalid_argument("matrix_exp: non-finite entries");
  Matrix out = m.exp();
  if (!out.allFinite())
    throw NumericalError("matrix_exp: overflow (norm too extreme for double range)");
  return out;
}

MatrixPoly build_p_poly(int n, const MatrixList& a_coeffs) {
  const int p = static_cast<int>(a_coeffs.size());
  if (p < 1) throw std::invalid_argument("build_p_poly: need p >= 1");
  MatrixList asc(static_cast<std::size_t>(p) + 1);
  for (int i = 1; i <= p; ++i) asc[static_cast<std::size_t>(p - i)] = a_coeffs[static_cast<std::size_t>(i - 1)];
  asc[static_cast<std::size_t>(p)] = Matrix::Identity(n, n);
  return MatrixPoly(n, std::move(asc));
}

MatrixPoly build_q_poly(int n, int q, const MatrixList& b_coeffs) {
  if (q < 0) throw std::invalid_argument("build_q_poly: q must be >= 0");
  if (static_cast<int>(b_coeffs.size()) != q)
    throw std::invalid_argument("build_q_poly: expected exactly q coefficients B_0..B_{q-1}");
  MatrixList asc(static_cast<std::size_t>(q) + 1);
  for (int j = 0; j < q; ++j) asc[static_cast<std::size_t>(j)] = b_coeffs[static_cast<std::size_t>(j)];
  asc[static_cast<std::size_t>(q)] = Matrix::Identity(n, n);
  return MatrixPoly(n, std::move(asc));
}

namespace {

// (e_1^m (x) I_n)^T: selects the first block row.
Matrix first_block_row_selector(int m, int n) {
  Matrix s = Matrix::Zero(n, static_cast<Eigen::Index>(m) * n);
  s.leftCols(n) = Matrix::Identity(n, n);
  return s;
}

double spectral_abscissa_of(const HalfPlaneReport& r) { return r.max_real_part; }

} // namespace

CarmaModel::CarmaModel(int n, int p, int q, MatrixList a_coeffs, MatrixList b_coeffs,
                       double halfplane_tol)
    : n_(n), p_(p), q_(q),
      p_poly_(build_p_poly(n, a_coeffs)),
      q_poly_(build_q_poly(n, q, b_coeffs)),
      a_comp_(companion(p_poly_)) {
  if (q_ < 0 || q_ >= p_) throw std::invalid_argument("CarmaModel: requires 0 <= q < p");

  p_report_ = halfplane_check(p_poly_, halfplane_tol);
  if (!p_report_.pass)
    throw HypothesisError("CarmaModel: det P(z) vanishes on the closed right half-plane "
                          "(causality assumption violated)");
  if (q_ >= 1) {
    q_report_ = halfplane_check(q_poly_, halfplane_tol);
    if (!q_report_.pass)
      throw HypothesisError("CarmaModel: det Q(z) vanishes on the closed right half-plane "
                            "(invertibility assumption violated)");
  } else {
    q_report_.pass = true;
    q_report_.margin = std::numeric_limits<double>::infinity();
    q_report_.max_real_part = -std::numeric_limits<double>::infinity();
  }

  LongDivision div = long_divide(p_poly_, q_poly_, q_);
  c_ = div.c;
  r_ = div.r;
  s_ = div.s;
  e_ = solve_E(p_poly_, q_poly_);
  e_stack_ = Matrix::Zero(static_cast<Eigen::Index>(p_) * n_, n_);
  for (int i = 0; i < p_; ++i)
    e_stack_.block(static_cast<Eigen::Index>(i) * n_, 0, n_, n_) = e_[static_cast<std::size_t>(i)];

  if (q_ >= 1) {
    f_ = solve_F(q_poly_, s_, q_);
    MatrixList q_desc;
    for (int i = 1; i <= q_; ++i) q_desc.push_back(q_poly_.coeff(q_ - i));
    b_comp_ = companion(q_desc);
    f_stack_ = Matrix::Zero(static_cast<Eigen::Index>(q_) * n_, n_);
    for (int i = 0; i < q_; ++i)
      f_stack_.block(static_cast<Eigen::Index>(i) * n_, 0, n_, n_) = f_[static_cast<std::size_t>(i)];
  }

  // Prediction loads: sum_{k=j}^{p-q} A^{k-j} E C_k with C_{p-q} = I.
  const int m = order();
  gtilde_j_loads_.resize(static_cast<std::size_t>(m));
  for (int j = 1; j <= m; ++j) {
    Matrix acc = Matrix::Zero(a_comp_.rows(), n_);
    Matrix a_pow = Matrix::Identity(a_comp_.rows(), a_comp_.cols());
    for (int k = j; k <= m; ++k) {
      const Matrix ck = (k == m) ? Matrix::Identity(n_, n_) : c_[static_cast<std::size_t>(k)];
      acc += a_pow * e_stack_ * ck;
      a_pow = a_comp_ * a_pow;
    }
    gtilde_j_loads_[static_cast<std::size_t>(j - 1)] = acc;
  }

  // Decay certificate: eps = 0.9 * spectral margin, C from the grid maximum
  // of |kernel(t)| e^{eps t} over [0, 4/eps].
  double margin = -spectral_abscissa_of(p_report_);
  if (q_ >= 1) margin = std::min(margin, -spectral_abscissa_of(q_report_));
  decay_rate_ = 0.9 * margin;
  const double horizon = 4.0 / decay_rate_;
  const int probes = 512;
  double c = 0.0;
  const std::vector<Matrix> g_samples = sample_gtilde(horizon / probes, probes + 1);
  for (int i = 0; i <= probes; ++i) {
    const double t = horizon * i / probes;
    c = std::max(c, max_abs(g_samples[static_cast<std::size_t>(i)]) * std::exp(decay_rate_ * t));
  }
  if (q_ >= 1) {
    const std::vector<Matrix> f_samples = sample_f(horizon / probes, probes + 1);
    for (int i = 0; i <= probes; ++i) {
      const double t = horizon * i / probes;
      c = std::max(c, max_abs(f_samples[static_cast<std::size_t>(i)]) * std::exp(decay_rate_ * t));
    }
  }
  decay_constant_ = std::max(c, 1e-12);
}

const Matrix& CarmaModel::b_companion() const {
  if (q_ < 1) throw std::logic_error("CarmaModel: no Q companion when q = 0");
  return b_comp_;
}

const Matrix& CarmaModel::f_stack() const {
  if (q_ < 1) throw std::logic_error("CarmaModel: no F stack when q = 0");
  return f_stack_;
}

Matrix CarmaModel::gtilde(double t) const {
  if (t < 0.0) return Matrix::Zero(n_, n_);
  return first_block_row_selector(p_, n_) * matrix_exp(a_comp_ * t) * e_stack_;
}

Matrix CarmaModel::f_kernel(double t) const {
  if (t < 0.0 || q_ == 0) return Matrix::Zero(n_, n_);
  return first_block_row_selector(q_, n_) * matrix_exp(b_comp_ * t) * f_stack_;
}

Matrix CarmaModel::gtilde_j(int j, double t) const {
  if (j < 1 || j > order()) throw std::invalid_argument("gtilde_j: j out of range 1..p-q");
  if (t < 0.0) throw std::invalid_argument("gtilde_j: t must be >= 0");
  return first_block_row_selector(p_, n_) * matrix_exp(a_comp_ * t) *
         gtilde_j_loads_[static_cast<std::size_t>(j - 1)];
}

namespace {

std::vector<Matrix> sample_exponential_kernel(const Matrix& gen, const Matrix& load, int n,
                                              int blocks, double dt, int count, double offset) {
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(count));
  const Matrix sel = first_block_row_selector(blocks, n);
  const Matrix step = matrix_exp(gen * dt);
  Matrix state = load;
  if (offset != 0.0) state = matrix_exp(gen * offset) * load;
  for (int k = 0; k < count; ++k) {
    out.push_back(sel * state);
    state = step * state;
  }
  return out;
}

} // namespace

std::vector<Matrix> CarmaModel::sample_gtilde(double dt, int count, double offset) const {
  return sample_exponential_kernel(a_comp_, e_stack_, n_, p_, dt, count, offset);
}

std::vector<Matrix> CarmaModel::sample_f(double dt, int count, double offset) const {
  if (q_ == 0) return std::vector<Matrix>(static_cast<std::size_t>(count), Matrix::Zero(n_, n_));
  return sample_exponential_kernel(b_comp_, f_stack_, n_, q_, dt, count, offset);
}

std::vector<Matrix> CarmaModel::sample_gtilde_j(int j, double dt, int count, double offset) const {
  if (j < 1 || j > order()) throw std::invalid_argument("sample_gtilde_j: j out of range");
  return sample_exponential_kernel(a_comp_, gtilde_j_loads_[static_cast<std::size_t>(j - 1)],
                                   n_, p_, dt, count, offset);
}

double CarmaModel::truncation_horizon(double tol, double grid_step) const {
  if (tol <= 0.0) throw std::invalid_argument("truncation_horizon: tol must be positive");
  if (grid_step <= 0.0) throw std::invalid_argument("truncation_horizon: grid step must be positive");
  // Analytic guess from the certificate, then locate the last grid point at
  // which either kernel still reaches tol.  The certificate makes values
  // beyond log(C/tol)/eps stay below tol, so scanning to that point (with
  // slack) is enough.
  const double t0 = std::max(0.0, std::log(decay_constant_ / tol) / decay_rate_);
  const double t_hi = std::max({t0 * 1.25 + grid_step, 4.0 / decay_rate_, 4.0 * grid_step});
  const int count = static_cast<int>(std::ceil(t_hi / grid_step)) + 1;
  const std::vector<Matrix> g = sample_gtilde(grid_step, count);
  const std::vector<Matrix> f = sample_f(grid_step, count);
  int last_bad = 0;
  for (int k = 0; k < count; ++k) {
    const double v = std::max(max_abs(g[static_cast<std::size_t>(k)]),
                              max_abs(f[static_cast<std::size_t>(k)]));
    if (v >= tol) last_bad = k;
  }
  return grid_step * (last_bad + 1);
}

HigherOrderSdde CarmaModel::to_higher_order_sdde() const {
  HigherOrderSdde sys;
  sys.n = n_;
  const int m = order();
  sys.varpi.resize(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    DelayMeasure& w = sys.varpi[static_cast<std::size_t>(j)];
    w.n = n_;
    w.atoms.push_back({0.0, -c_[static_cast<std::size_t>(j)]});
  }
  if (q_ >= 1) sys.varpi[0].exp_density = f_density();
  return sys;
}

ExpFamilyDensity CarmaModel::f_density() const {
  if (q_ < 1) throw std::logic_error("CarmaModel: f vanishes when q = 0");
  ExpFamilyDensity d;
  d.h = first_block_row_selector(q_, n_);
  d.m = b_comp_;
  d.k = f_stack_;
  return d;
}

namespace {

void print_matrix_list(std::ostringstream& os, const char* name, const MatrixList& list,
                       int base_index) {
  for (std::size_t i = 0; i < list.size(); ++i) {
    os << "  " << name << base_index + static_cast<int>(i) << " =";
    const Matrix& m = list[i];
    if (m.size() == 1) {
      os << " " << m(0, 0) << "\n";
    } else {
      os << "\n";
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        os << "    ";
        for (Eigen::Index c = 0; c < m.cols(); ++c) os << m(r, c) << (c + 1 < m.cols() ? " " : "");
        os << "\n";
      }
    }
  }
}

} // namespace

std::string CarmaModel::summary() const {
  std::ostringstream os;
  os.precision(12);
  os << "CARMA(" << p_ << "," << q_ << ") model, dimension n = " << n_ << "\n";
  MatrixList a;
  for (int i = 1; i <= p_; ++i) a.push_back(p_poly_.coeff(p_ - i));
  print_matrix_list(os, "A_", a, 1);
  if (q_ >= 1) {
    MatrixList b;
    for (int j = 0; j < q_; ++j) b.push_back(q_poly_.coeff(j));
    print_matrix_list(os, "B_", b, 0);
  }
  print_matrix_list(os, "C_", c_, 0);
  print_matrix_list(os, "E_", e_, 1);
  if (!f_.empty()) print_matrix_list(os, "F_", f_, 1);
  os << "  eig(A companion):";
  for (const Complex& l : p_report_.eigenvalues) os << " (" << l.real() << (l.imag() < 0 ? "" : "+") << l.imag() << "i)";
  os << "\n";
  if (q_ >= 1) {
    os << "  eig(B companion):";
    for (const Complex& l : q_report_.eigenvalues) os << " (" << l.real() << (l.imag() < 0 ? "" : "+") << l.imag() << "i)";
    os << "\n";
  }
  os << "  decay: |kernels| <= " << decay_constant_ << " * exp(-" << decay_rate_ << " t)\n";
  return os.str();
}

} // namespace carma
