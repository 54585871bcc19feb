#include "carma/engine.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "carma/errors.hpp"
#include "carma/fft.hpp"
#include "carma/numeric.hpp"
#include "carma/rng.hpp"

namespace carma {

namespace {

Matrix central_difference(const Matrix& values, double dt) {
  const Eigen::Index rows = values.rows();
  Matrix out = Matrix::Constant(rows, values.cols(), std::numeric_limits<double>::quiet_NaN());
  for (Eigen::Index k = 1; k + 1 < rows; ++k)
    out.row(k) = (values.row(k + 1) - values.row(k - 1)) / (2.0 * dt);
  return out;
}

// x[j] (row vectors) -> sum_j kernel[j] * x[k-j] per output k, done as n^2
// scalar convolutions.
Matrix kernel_convolve(const std::vector<Matrix>& kernel, const Matrix& x) {
  const int n = static_cast<int>(x.cols());
  const int rows = static_cast<int>(x.rows());
  const int taps = static_cast<int>(kernel.size());
  Matrix out = Matrix::Zero(rows + taps - 1, n);
  std::vector<double> kv(static_cast<std::size_t>(taps));
  std::vector<double> xv(static_cast<std::size_t>(rows));
  for (int i = 0; i < n; ++i) {
    for (int a = 0; a < n; ++a) {
      for (int j = 0; j < taps; ++j) kv[static_cast<std::size_t>(j)] = kernel[static_cast<std::size_t>(j)](i, a);
      for (int k = 0; k < rows; ++k) xv[static_cast<std::size_t>(k)] = x(k, a);
      const std::vector<double> conv = convolve(kv, xv);
      for (int k = 0; k < static_cast<int>(conv.size()); ++k)
        out(k, i) += conv[static_cast<std::size_t>(k)];
    }
  }
  return out;
}

} // namespace

double derivative_consistency(const SampledPath& path) {
  double worst = 0.0;
  const Matrix* below = &path.values;
  for (const Matrix& stack : path.derivatives) {
    const Matrix fd = central_difference(*below, path.dt);
    for (Eigen::Index k = 1; k + 1 < fd.rows(); ++k)
      worst = std::max(worst, (fd.row(k) - stack.row(k)).cwiseAbs().maxCoeff());
    below = &stack;
  }
  return worst;
}

SampledKernel carma_ma_kernel(const CarmaModel& model, double dt, double tol) {
  const double horizon = model.truncation_horizon(tol, dt);
  const int count = static_cast<int>(std::ceil(horizon / dt)) + 1;
  SampledKernel kernel;
  kernel.dt = dt;
  kernel.offset = 0.5 * dt;
  kernel.values = model.sample_gtilde(dt, count, 0.5 * dt);
  kernel.atom_at_zero = Matrix::Zero(model.n(), model.n());
  return kernel;
}

SampledKernel carma_grid_kernel(const CarmaModel& model, double dt, double tol) {
  const double horizon = model.truncation_horizon(tol, dt);
  const int count = static_cast<int>(std::ceil(horizon / dt)) + 1;
  SampledKernel kernel;
  kernel.dt = dt;
  kernel.offset = 0.0;
  kernel.values = model.sample_gtilde(dt, count);
  kernel.atom_at_zero = model.order() == 1
                            ? Matrix(Matrix::Identity(model.n(), model.n()))
                            : Matrix(Matrix::Zero(model.n(), model.n()));
  return kernel;
}

SampledPath simulate_ma(const SampledKernel& kernel, const DriverPath& driver, double burn_in) {
  const int n = driver.dim();
  if (kernel.dim() != n) throw std::invalid_argument("simulate_ma: dimension mismatch");
  if (std::abs(kernel.dt - driver.dt) > 1e-12 * driver.dt)
    throw std::invalid_argument("simulate_ma: kernel and driver must share the grid step");

  // Midpoint values: either sampled there directly or averaged from on-grid
  // samples (second-order accurate).
  std::vector<Matrix> mid;
  if (std::abs(kernel.offset - 0.5 * kernel.dt) < 1e-12) {
    mid = kernel.values;
  } else if (kernel.offset == 0.0) {
    mid.reserve(kernel.values.size());
    for (std::size_t j = 0; j + 1 < kernel.values.size(); ++j)
      mid.push_back(0.5 * (kernel.values[j] + kernel.values[j + 1]));
    if (mid.empty()) throw std::invalid_argument("simulate_ma: kernel too short");
  } else {
    throw std::invalid_argument("simulate_ma: unsupported kernel offset");
  }

  const int taps = static_cast<int>(mid.size());
  const int steps = driver.steps();
  const int burn_steps = static_cast<int>(std::llround(burn_in / driver.dt));
  if (burn_steps < taps)
    throw std::invalid_argument("simulate_ma: burn-in shorter than the kernel support "
                                "(insufficient driver history)");
  if (burn_steps > steps) throw std::invalid_argument("simulate_ma: driver shorter than burn-in");

  // X at grid point k uses steps k-1-j, lag (j + 1/2) dt.
  const Matrix conv = kernel_convolve(mid, driver.increments);
  SampledPath path;
  path.t0 = driver.t0 + driver.dt * burn_steps;
  path.dt = driver.dt;
  const int out_count = steps - burn_steps + 1;
  path.values = Matrix::Zero(out_count, n);
  for (int k = 0; k < out_count; ++k) {
    const int grid_index = burn_steps + k;
    if (grid_index >= 1) path.values.row(k) = conv.row(grid_index - 1);
  }
  return path;
}

namespace {

struct VanLoanResult {
  Matrix transition; // e^{A dt}
  Matrix step_cov;   // int_0^dt e^{Au} W e^{A^T u} du
};

// Van Loan block-exponential for the exact step covariance.
VanLoanResult van_loan(const Matrix& a, const Matrix& w, double dt) {
  const Eigen::Index n = a.rows();
  Matrix block = Matrix::Zero(2 * n, 2 * n);
  block.topLeftCorner(n, n) = -a;
  block.topRightCorner(n, n) = w;
  block.bottomRightCorner(n, n) = a.transpose();
  const Matrix e = matrix_exp(block * dt);
  VanLoanResult out;
  out.transition = e.bottomRightCorner(n, n).transpose();
  out.step_cov = out.transition * e.topRightCorner(n, n);
  out.step_cov = 0.5 * (out.step_cov + out.step_cov.transpose());
  return out;
}

// int_0^dt e^{Au} du via the augmented exponential [[A, I], [0, 0]].
Matrix transition_integral(const Matrix& a, double dt) {
  const Eigen::Index n = a.rows();
  Matrix block = Matrix::Zero(2 * n, 2 * n);
  block.topLeftCorner(n, n) = a;
  block.topRightCorner(n, n) = Matrix::Identity(n, n);
  return matrix_exp(block * dt).topRightCorner(n, n);
}

// PSD square root tolerant of the tiny negative eigenvalues the O(dt^2)
// conditional covariance develops in floating point.
Matrix psd_sqrt(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  if (solver.info() != Eigen::Success)
    throw NumericalError("simulate_statespace: covariance eigendecomposition failed");
  Vector ev = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return solver.eigenvectors() * ev.asDiagonal() * solver.eigenvectors().transpose();
}

} // namespace

SampledPath simulate_statespace(const CarmaModel& model, const DriverSpec& spec,
                                const DriverPath& driver, double burn_in,
                                const StateSpaceOptions& options) {
  const auto* brownian = std::get_if<BrownianSpec>(&spec.law);
  if (!brownian) throw std::invalid_argument("simulate_statespace: requires a Brownian driver");
  const int n = model.n();
  if (driver.dim() != n || spec.n != n)
    throw std::invalid_argument("simulate_statespace: dimension mismatch");
  const double dt = driver.dt;
  const int steps = driver.steps();
  const int burn_steps = static_cast<int>(std::llround(burn_in / dt));
  if (burn_steps > steps) throw std::invalid_argument("simulate_statespace: driver shorter than burn-in");

  const Matrix& a = model.a_companion();
  const Matrix& e_stack = model.e_stack();
  const Eigen::Index np = a.rows();
  const Matrix transition = matrix_exp(a * dt);

  Matrix corr = brownian->correlation.size() == 0 ? Matrix::Identity(n, n) : brownian->correlation;
  const Matrix sigma = brownian->volatility.asDiagonal() * corr * brownian->volatility.asDiagonal();
  const Vector mean_step = transition_integral(a, dt) * (e_stack * brownian->drift);

  Matrix coupled_load;         // increment_coupled: E dZ
  Matrix exact_load;           // exact_law: L (dZ - mu dt)
  Matrix residual_sqrt;        // exact_law: chol-like factor of V
  if (options.coupling == NoiseCoupling::increment_coupled) {
    coupled_load = e_stack;
  } else {
    const VanLoanResult vl = van_loan(a, e_stack * sigma * e_stack.transpose(), dt);
    const Matrix d_int = transition_integral(a, dt);
    exact_load = d_int * e_stack / dt;
    const Matrix v = vl.step_cov - exact_load * (sigma * dt) * exact_load.transpose();
    residual_sqrt = psd_sqrt(v);
  }

  std::mt19937_64 aux = make_stream(driver.seed, 1); // distinct from gen_levy's stream 0
  std::normal_distribution<double> normal(0.0, 1.0);

  Vector state = options.initial_state ? *options.initial_state : Vector(Vector::Zero(np));
  if (state.size() != np) throw std::invalid_argument("simulate_statespace: initial state size");

  const int out_count = steps - burn_steps + 1;
  SampledPath path;
  path.t0 = driver.t0 + dt * burn_steps;
  path.dt = dt;
  path.values = Matrix::Zero(out_count, n);
  const int stacks = model.order() - 1;
  path.derivatives.assign(static_cast<std::size_t>(stacks), Matrix::Zero(out_count, n));

  const Vector drift_step = brownian->drift * dt;
  Vector zeta(np);
  auto emit = [&](int out_row) {
    path.values.row(out_row) = state.head(n).transpose();
    for (int j = 1; j <= stacks; ++j)
      path.derivatives[static_cast<std::size_t>(j - 1)].row(out_row) =
          state.segment(static_cast<Eigen::Index>(j) * n, n).transpose();
  };

  if (burn_steps == 0) emit(0);
  for (int k = 0; k < steps; ++k) {
    const Vector dz = driver.increments.row(k).transpose();
    Vector xi;
    if (options.coupling == NoiseCoupling::increment_coupled) {
      xi = coupled_load * dz;
    } else {
      for (Eigen::Index i = 0; i < np; ++i) zeta[i] = normal(aux);
      xi = mean_step + exact_load * (dz - drift_step) + residual_sqrt * zeta;
    }
    state = transition * state + xi;
    const int grid_index = k + 1;
    if (grid_index >= burn_steps) emit(grid_index - burn_steps);
  }
  return path;
}

namespace {

// Derivative stacks X^{(1)}..X^{(m-1)}: stored stacks when available,
// otherwise iterated central differences (demand-driven, NaN at the rims).
std::vector<Matrix> derivative_stacks(const SampledPath& path, int order_minus_one,
                                      double amplification_bound) {
  std::vector<Matrix> stacks;
  if (static_cast<int>(path.derivatives.size()) >= order_minus_one) {
    stacks.assign(path.derivatives.begin(), path.derivatives.begin() + order_minus_one);
    return stacks;
  }
  if (order_minus_one >= 1) {
    const double amplification = std::pow(1.0 / path.dt, order_minus_one);
    if (amplification > amplification_bound)
      throw NumericalError("recover_noise: finite differencing would amplify noise beyond "
                           "the configured bound; provide derivative stacks");
  }
  Matrix below = path.values;
  for (int j = 1; j <= order_minus_one; ++j) {
    Matrix d = central_difference(below, path.dt);
    stacks.push_back(d);
    below = std::move(d);
  }
  return stacks;
}

} // namespace

RecoveredNoise recover_noise(const CarmaModel& model, const SampledPath& path,
                             const RecoverOptions& options) {
  const int n = model.n();
  if (path.dim() != n) throw std::invalid_argument("recover_noise: dimension mismatch");
  const int m = model.order();
  const double dt = path.dt;
  const int k_count = path.steps();

  const double horizon = model.truncation_horizon(options.truncation_tol, dt);
  const int f_taps = model.q() >= 1 ? static_cast<int>(std::ceil(horizon / dt)) + 1 : 0;
  if (k_count < std::max(f_taps, 2 * m + 2))
    throw std::invalid_argument("recover_noise: path too short for the delay horizon");

  const bool stacks_stored = static_cast<int>(path.derivatives.size()) >= m - 1;
  const std::vector<Matrix> stacks =
      derivative_stacks(path, m - 1, options.noise_amplification_bound);
  const Matrix& top = m == 1 ? path.values : stacks.back();

  // Delay convolution (f * X)(t_k) by trapezoid over the sampled kernel.
  Matrix delay = Matrix::Zero(k_count, n);
  if (f_taps > 0) {
    std::vector<Matrix> f_w = model.sample_f(dt, f_taps);
    for (int j = 0; j < f_taps; ++j) f_w[static_cast<std::size_t>(j)] *= trapezoid_weight(j, f_taps);
    const Matrix conv = kernel_convolve(f_w, path.values);
    delay = conv.topRows(k_count) * dt;
  }

  // Rows at which every ingredient is defined.
  const int fd_margin = stacks_stored ? 0 : (m - 1);
  const int first_valid = std::max(f_taps > 0 ? f_taps - 1 : 0, fd_margin);
  const int last_valid = k_count - 2 - fd_margin;
  if (last_valid < first_valid)
    throw std::invalid_argument("recover_noise: path too short for derivatives and delay history");

  RecoveredNoise out;
  out.first_valid = first_valid;
  out.last_valid = last_valid;
  out.path.t0 = path.t0;
  out.path.dt = dt;
  out.path.seed = 0;
  out.path.increments =
      Matrix::Constant(k_count - 1, n, std::numeric_limits<double>::quiet_NaN());

  for (int k = first_valid; k <= last_valid; ++k) {
    Vector dz = (top.row(k + 1) - top.row(k)).transpose();
    for (int j = 0; j < m; ++j) {
      const Matrix& xj = j == 0 ? path.values : stacks[static_cast<std::size_t>(j - 1)];
      dz += model.c_coeffs()[static_cast<std::size_t>(j)] * xj.row(k).transpose() * dt;
    }
    dz -= delay.row(k).transpose() * dt;
    out.path.increments.row(k) = dz.transpose();
  }
  return out;
}

namespace {

// One-sided derivative estimates at the last sample (second order).
Vector right_edge_derivative(const Matrix& values, double dt, int order) {
  const Eigen::Index k = values.rows() - 1;
  if (order == 1)
    return (3.0 * values.row(k) - 4.0 * values.row(k - 1) + values.row(k - 2)).transpose() /
           (2.0 * dt);
  if (order == 2)
    return (2.0 * values.row(k) - 5.0 * values.row(k - 1) + 4.0 * values.row(k - 2) -
            values.row(k - 3)).transpose() / (dt * dt);
  throw NumericalError("predict: derivatives of order >= 3 need stored stacks");
}

} // namespace

PredictionResult predict(const CarmaModel& model, const SampledPath& history,
                         int horizon_steps, const PredictOptions& options) {
  const int n = model.n();
  if (history.dim() != n) throw std::invalid_argument("predict: dimension mismatch");
  if (horizon_steps < 0) throw std::invalid_argument("predict: bad horizon");
  const double dt = history.dt;
  const int m = model.order();
  const int k_hist = history.steps();
  const double s = history.end_time();

  const double horizon_f = model.q() >= 1 ? model.truncation_horizon(options.truncation_tol, dt) : 0.0;
  const int l_taps = model.q() >= 1 ? static_cast<int>(std::ceil(horizon_f / dt)) + 1 : 0;
  if (k_hist < std::max(l_taps, m + 3))
    throw std::invalid_argument("predict: insufficient history for the delay horizon");

  // Derivatives at s: stored stacks if available, one-sided differences
  // otherwise.
  std::vector<Vector> x_s(static_cast<std::size_t>(m));
  x_s[0] = history.values.row(k_hist - 1).transpose();
  for (int j = 1; j < m; ++j) {
    if (static_cast<int>(history.derivatives.size()) >= j)
      x_s[static_cast<std::size_t>(j)] =
          history.derivatives[static_cast<std::size_t>(j - 1)].row(k_hist - 1).transpose();
    else
      x_s[static_cast<std::size_t>(j)] = right_edge_derivative(history.values, dt, j);
  }

  const int rows = horizon_steps + 1;
  PredictionResult out;
  out.s = s;
  out.dt = dt;
  out.values = Matrix::Zero(rows, n);
  out.state_term = Matrix::Zero(rows, n);
  out.memory_term = Matrix::Zero(rows, n);
  out.noise_term = Matrix::Zero(rows, n);

  // State term: sum_j g~_j(t-s) X_s^{(j-1)}.
  for (int j = 1; j <= m; ++j) {
    const std::vector<Matrix> gj = model.sample_gtilde_j(j, dt, rows);
    for (int k = 0; k < rows; ++k)
      out.state_term.row(k) +=
          (gj[static_cast<std::size_t>(k)] * x_s[static_cast<std::size_t>(j - 1)]).transpose();
  }

  // Zhat on the horizon grid.
  Matrix zhat = Matrix::Zero(rows, n);
  if (options.zhat) {
    if (options.zhat->rows() != rows || options.zhat->cols() != n)
      throw std::invalid_argument("predict: zhat grid mismatch");
    zhat = *options.zhat;
  } else if (options.mean_rate.size() == n) {
    for (int k = 0; k < rows; ++k) zhat.row(k) = (dt * k) * options.mean_rate.transpose();
  } else if (options.mean_rate.size() != 0) {
    throw std::invalid_argument("predict: mean_rate dimension mismatch");
  }

  // Memory term: Phi(u) = int f(u-v) X_v dv over the truncated history,
  // then int_s^t g~(t-u) Phi(u) du; both by trapezoid on the shared grid.
  std::vector<Vector> phi(static_cast<std::size_t>(rows), Vector::Zero(n));
  if (l_taps > 0) {
    const int v_nodes = l_taps; // v = s - l dt, l = 0..l_taps-1
    const std::vector<Matrix> f_samples = model.sample_f(dt, rows + v_nodes);
    for (int i = 0; i < rows; ++i) {
      Vector acc = Vector::Zero(n);
      for (int l = 0; l < v_nodes; ++l) {
        const int hist_row = k_hist - 1 - l;
        acc += trapezoid_weight(l, v_nodes) *
               (f_samples[static_cast<std::size_t>(i + l)] *
                history.values.row(hist_row).transpose());
      }
      phi[static_cast<std::size_t>(i)] = acc * dt;
    }
    const std::vector<Matrix> g_samples = model.sample_gtilde(dt, rows);
    for (int k = 1; k < rows; ++k) {
      Vector acc = Vector::Zero(n);
      for (int i = 0; i <= k; ++i)
        acc += trapezoid_weight(i, k + 1) *
               (g_samples[static_cast<std::size_t>(k - i)] * phi[static_cast<std::size_t>(i)]);
      out.memory_term.row(k) = (acc * dt).transpose();
    }
  }

  // Noise term: 1_{p=q+1} Zhat_t plus the density part of the g~ measure,
  // (e_1 (x) I)^T e^{A(t-u)} A E, integrated against Zhat.
  {
    Matrix load = model.a_companion() * model.e_stack();
    std::vector<Matrix> m3(static_cast<std::size_t>(rows));
    const Matrix sel_step = matrix_exp(model.a_companion() * dt);
    Matrix cur = load;
    for (int k = 0; k < rows; ++k) {
      m3[static_cast<std::size_t>(k)] = cur.topRows(n);
      cur = sel_step * cur;
    }
    const bool atom = model.order() == 1; // p = q+1
    for (int k = 0; k < rows; ++k) {
      Vector acc = Vector::Zero(n);
      for (int i = 1; i <= k; ++i) // zhat row 0 vanishes
        acc += trapezoid_weight(i, k + 1) *
               (m3[static_cast<std::size_t>(k - i)] * zhat.row(i).transpose());
      Vector term = acc * dt;
      if (atom) term += zhat.row(k).transpose();
      out.noise_term.row(k) = term.transpose();
    }
  }

  out.values = out.state_term + out.memory_term + out.noise_term;
  return out;
}

PredictionResult predict_msdde(const DelayMeasure& eta, const SampledKernel& g,
                               const SampledPath& history, const Matrix& zhat,
                               int horizon_steps) {
  const int n = eta.n;
  if (history.dim() != n) throw std::invalid_argument("predict_msdde: dimension mismatch");
  if (g.dim() != n) throw std::invalid_argument("predict_msdde: kernel dimension mismatch");
  if (g.offset != 0.0) throw std::invalid_argument("predict_msdde: kernel must be on-grid");
  const double dt = history.dt;
  if (std::abs(g.dt - dt) > 1e-12 * dt)
    throw std::invalid_argument("predict_msdde: kernel and history grids differ");
  const int rows = horizon_steps + 1;
  if (zhat.rows() != rows || zhat.cols() != n)
    throw std::invalid_argument("predict_msdde: zhat grid mismatch");

  const int k_hist = history.steps();
  const double s = history.end_time();

  // Delay support needed from history: atoms plus the density tail.
  double support = 0.0;
  for (const auto& atom : eta.atoms) support = std::max(support, atom.location);
  int density_taps = 0;
  if (eta.sampled_density) {
    density_taps = static_cast<int>(eta.sampled_density->values.size());
  } else if (eta.exp_density) {
    const double rate = eta.exp_density->decay_rate();
    const double c = eta.exp_density->decay_constant();
    density_taps = static_cast<int>(std::ceil(std::log(std::max(c, 1.0) / 1e-8) / rate / dt)) + 1;
  }
  const double need = std::max(support, dt * density_taps) ;
  if (dt * (k_hist - 1) < need)
    throw std::invalid_argument("predict_msdde: insufficient history for the delay support");

  PredictionResult out;
  out.s = s;
  out.dt = dt;
  out.state_term = Matrix::Zero(rows, n);
  out.memory_term = Matrix::Zero(rows, n);
  out.noise_term = Matrix::Zero(rows, n);

  const Vector x_s = history.values.row(k_hist - 1).transpose();
  for (int k = 0; k < rows; ++k)
    out.state_term.row(k) = (g.at_lag(dt * k) * x_s).transpose();

  // q(u) = eta * {1_{(-inf,s]} X}(u) for u = s + i dt: atoms at locations
  // >= u - s (right limit at u = s, so the atom at zero never enters), plus
  // the density integrated over [u-s, inf) against history.
  std::vector<Vector> q(static_cast<std::size_t>(rows), Vector::Zero(n));
  std::vector<Matrix> rho;
  if (eta.has_density()) rho = eta.density_samples(dt, rows + density_taps);
  for (int i = 0; i < rows; ++i) {
    Vector acc = Vector::Zero(n);
    for (const auto& atom : eta.atoms) {
      if (atom.location <= 0.0 || atom.location < dt * i - 1e-12) continue;
      const double v_time = s + dt * i - atom.location; // <= s by the guard
      const double pos = (v_time - history.t0) / dt;
      const auto row = static_cast<Eigen::Index>(std::llround(pos));
      if (row < 0) continue; // before recorded history: treated as decayed
      if (std::abs(pos - static_cast<double>(row)) > 1e-9)
        throw std::invalid_argument("predict_msdde: atom locations must be grid-aligned");
      acc += atom.weight * history.values.row(row).transpose();
    }
    if (eta.has_density()) {
      // v = (i + l) dt, l = 0..density_taps-1; X at s - l dt.
      Vector dens = Vector::Zero(n);
      for (int l = 0; l < density_taps; ++l) {
        const int hist_row = k_hist - 1 - l;
        if (hist_row < 0) break;
        dens += trapezoid_weight(l, density_taps) *
                (rho[static_cast<std::size_t>(i + l)] * history.values.row(hist_row).transpose());
      }
      acc += dens * dt;
    }
    q[static_cast<std::size_t>(i)] = acc;
  }
  for (int k = 1; k < rows; ++k) {
    Vector acc = Vector::Zero(n);
    for (int i = 0; i <= k; ++i)
      acc += trapezoid_weight(i, k + 1) * (g.at_lag(dt * (k - i)) * q[static_cast<std::size_t>(i)]);
    out.memory_term.row(k) = (acc * dt).transpose();
  }

  // Noise term: identity atom of g(du) applied exactly, density g*eta by
  // trapezoid.
  const std::vector<Matrix> gamma = convolve_kernel_measure(g.truncated(dt * rows), eta);
  for (int k = 0; k < rows; ++k) {
    Vector acc = zhat.row(k).transpose(); // I delta_0 part
    Vector integ = Vector::Zero(n);
    for (int i = 1; i <= k; ++i)
      integ += trapezoid_weight(i, k + 1) *
               (gamma[static_cast<std::size_t>(k - i)] * zhat.row(i).transpose());
    out.noise_term.row(k) = (acc + integ * dt).transpose();
  }

  out.values = out.state_term + out.memory_term + out.noise_term;
  return out;
}

SampledPath stack_nested_history(const SampledPath& path, int order) {
  if (order < 1) throw std::invalid_argument("stack_nested_history: order must be >= 1");
  if (static_cast<int>(path.derivatives.size()) < order - 1)
    throw std::invalid_argument("stack_nested_history: missing derivative stacks");
  SampledPath out;
  out.t0 = path.t0;
  out.dt = path.dt;
  const int n = path.dim();
  out.values = Matrix::Zero(path.steps(), static_cast<Eigen::Index>(order) * n);
  out.values.leftCols(n) = path.values;
  for (int j = 1; j < order; ++j)
    out.values.middleCols(static_cast<Eigen::Index>(j) * n, n) =
        path.derivatives[static_cast<std::size_t>(j - 1)];
  return out;
}

} // namespace carma
