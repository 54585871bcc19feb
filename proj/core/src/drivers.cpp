#include "carma/drivers.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <random>
#include <stdexcept>

#include "carma/errors.hpp"
#include "carma/fft.hpp"
#include "carma/rng.hpp"

namespace carma {

namespace {

Matrix brownian_covariance(const BrownianSpec& b, int n) {
  Matrix corr = b.correlation.size() == 0 ? Matrix::Identity(n, n) : b.correlation;
  return b.volatility.asDiagonal() * corr * b.volatility.asDiagonal();
}

Matrix brownian_cholesky(const BrownianSpec& b, int n) {
  const Matrix cov = brownian_covariance(b, n);
  if (cov.isZero()) return Matrix::Zero(n, n);
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("driver: brownian covariance is not positive definite");
  return llt.matrixL();
}

void check_size(const Vector& v, int n, const char* what) {
  if (static_cast<int>(v.size()) != n)
    throw std::invalid_argument(std::string("driver: ") + what + " must have one entry per coordinate");
}

} // namespace

Vector DriverSpec::mean_rate() const {
  Vector out = Vector::Zero(n);
  if (const auto* b = std::get_if<BrownianSpec>(&law)) {
    out = b->drift;
  } else if (const auto* cp = std::get_if<CompoundPoissonSpec>(&law)) {
    out = cp->rate.cwiseProduct(cp->jump_mean);
  }
  // Gamma-difference and fractional drivers are centered.
  return out;
}

void DriverSpec::validate() const {
  if (n < 1) throw std::invalid_argument("driver: dimension must be >= 1");
  if (const auto* b = std::get_if<BrownianSpec>(&law)) {
    check_size(b->drift, n, "drift");
    check_size(b->volatility, n, "volatility");
    if ((b->volatility.array() < 0.0).any())
      throw std::invalid_argument("driver: volatility must be >= 0");
    if (b->correlation.size() != 0 &&
        (b->correlation.rows() != n || b->correlation.cols() != n))
      throw std::invalid_argument("driver: correlation must be n x n");
    brownian_cholesky(*b, n);
  } else if (const auto* cp = std::get_if<CompoundPoissonSpec>(&law)) {
    check_size(cp->rate, n, "rate");
    check_size(cp->jump_mean, n, "jump_mean");
    check_size(cp->jump_sd, n, "jump_sd");
    if ((cp->rate.array() < 0.0).any()) throw std::invalid_argument("driver: rate must be >= 0");
    if ((cp->jump_sd.array() < 0.0).any())
      throw std::invalid_argument("driver: jump_sd must be >= 0");
  } else if (const auto* g = std::get_if<GammaDifferenceSpec>(&law)) {
    check_size(g->shape, n, "shape");
    check_size(g->scale, n, "scale");
    if ((g->shape.array() <= 0.0).any() || (g->scale.array() <= 0.0).any())
      throw std::invalid_argument("driver: gamma shape and scale must be > 0");
  } else if (const auto* f = std::get_if<FractionalSpec>(&law)) {
    check_size(f->beta, n, "beta");
    if ((f->beta.array() <= 0.0).any() || (f->beta.array() >= 0.5).any())
      throw std::invalid_argument("driver: beta must lie in (0, 1/2)");
    check_size(f->base.drift, n, "base drift");
    if (!f->base.drift.isZero())
      throw std::invalid_argument("driver: fractional base must have zero mean");
    check_size(f->base.volatility, n, "base volatility");
    brownian_cholesky(f->base, n);
  }
}

DriverPath gen_levy(const DriverSpec& spec, double t0, double dt, int steps,
                    std::uint64_t seed) {
  spec.validate();
  if (spec.is_fractional())
    throw std::invalid_argument("gen_levy: fractional drivers go through gen_fractional");
  if (dt <= 0.0 || steps < 1) throw std::invalid_argument("gen_levy: bad grid");

  DriverPath path;
  path.t0 = t0;
  path.dt = dt;
  path.seed = seed;
  path.increments = Matrix::Zero(steps, spec.n);
  std::mt19937_64 rng = make_stream(seed, 0);

  if (const auto* b = std::get_if<BrownianSpec>(&spec.law)) {
    const Matrix chol = brownian_cholesky(*b, spec.n);
    const Vector drift_step = b->drift * dt;
    std::normal_distribution<double> normal(0.0, 1.0);
    const double sqrt_dt = std::sqrt(dt);
    Vector z(spec.n);
    for (int k = 0; k < steps; ++k) {
      for (int j = 0; j < spec.n; ++j) z[j] = normal(rng);
      path.increments.row(k) = (drift_step + sqrt_dt * (chol * z)).transpose();
    }
  } else if (const auto* cp = std::get_if<CompoundPoissonSpec>(&spec.law)) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int k = 0; k < steps; ++k) {
      for (int j = 0; j < spec.n; ++j) {
        const double lam = cp->rate[j] * dt;
        double sum = 0.0;
        if (lam > 0.0) {
          std::poisson_distribution<long> poisson(lam);
          const long count = poisson(rng);
          for (long i = 0; i < count; ++i)
            sum += cp->jump_mean[j] + cp->jump_sd[j] * normal(rng);
        }
        path.increments(k, j) = sum;
      }
    }
  } else if (const auto* g = std::get_if<GammaDifferenceSpec>(&spec.law)) {
    for (int k = 0; k < steps; ++k) {
      for (int j = 0; j < spec.n; ++j) {
        std::gamma_distribution<double> gamma(g->shape[j] * dt, g->scale[j]);
        const double up = gamma(rng);
        const double down = gamma(rng);
        path.increments(k, j) = up - down;
      }
    }
  }
  if (!path.increments.allFinite()) throw NumericalError("gen_levy: non-finite increment");
  return path;
}

std::vector<double> frac_integrate(const std::vector<double>& samples, double dt, double beta) {
  if (beta <= 0.0 || beta >= 1.0)
    throw std::invalid_argument("frac_integrate: beta must lie in (0, 1)");
  if (dt <= 0.0) throw std::invalid_argument("frac_integrate: dt must be positive");
  const std::size_t m = samples.size();
  if (m == 0) return {};
  // Cell weights ((k+1)dt)^beta - (k dt)^beta over Gamma(1+beta).
  const double norm = std::tgamma(1.0 + beta);
  std::vector<double> w(m);
  double prev = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double next = std::pow(dt * static_cast<double>(k + 1), beta);
    w[k] = (next - prev) / norm;
    prev = next;
  }
  // out[j] = sum_k w_k f_{j+k}: correlate by convolving with the reversal.
  std::vector<double> rev(samples.rbegin(), samples.rend());
  const std::vector<double> conv = convolve(w, rev);
  std::vector<double> out(m);
  for (std::size_t j = 0; j < m; ++j) out[j] = conv[m - 1 - j];
  return out;
}

namespace {

// Cell-averaged weights of the fractional increment kernel
// (t+dt-u)_+^beta - (t-u)_+^beta: second difference of x^{1+beta}.
std::vector<double> fractional_weights(double dt, double beta, int count) {
  std::vector<double> w(static_cast<std::size_t>(count));
  const double norm = std::tgamma(2.0 + beta);
  const double scale = std::pow(dt, beta);
  auto pw = [&](int j) { return j <= 0 ? 0.0 : std::pow(static_cast<double>(j), 1.0 + beta); };
  for (int j = 0; j < count; ++j)
    w[static_cast<std::size_t>(j)] = scale * (pw(j + 1) - 2.0 * pw(j) + pw(j - 1)) / norm;
  return w;
}

// Relative sigma loss from dropping lags >= count, using the asymptotic
// tail w_j ~ dt^beta beta(1+beta) j^{beta-1} / Gamma(2+beta).
double tail_sigma_deficit(const std::vector<double>& w, double dt, double beta) {
  double kept = 0.0;
  for (double x : w) kept += x * x;
  const double j0 = static_cast<double>(w.size());
  const double c = std::pow(dt, beta) * beta * (1.0 + beta) / std::tgamma(2.0 + beta);
  const double tail = c * c * std::pow(j0, 2.0 * beta - 1.0) / (1.0 - 2.0 * beta);
  return 1.0 - std::sqrt(kept / (kept + tail));
}

} // namespace

DriverPath gen_fractional(const DriverSpec& spec, double t0, double dt, int steps,
                          std::uint64_t seed, FractionalDiagnostics* diag) {
  spec.validate();
  const auto* frac = std::get_if<FractionalSpec>(&spec.law);
  if (!frac) throw std::invalid_argument("gen_fractional: spec is not fractional");
  if (dt <= 0.0 || steps < 1) throw std::invalid_argument("gen_fractional: bad grid");

  const double beta_max = frac->beta.maxCoeff();
  constexpr int kCellCap = 1 << 22;
  int ext = std::max(64 * steps, 64);
  // Extend history until the dropped tail is < 1% of the increment sigma.
  while (ext + steps < kCellCap) {
    const std::vector<double> probe = fractional_weights(dt, beta_max, ext + steps);
    if (tail_sigma_deficit(probe, dt, beta_max) < 0.01) break;
    ext *= 2;
  }
  const int total = ext + steps;

  DriverSpec base_spec;
  base_spec.n = spec.n;
  base_spec.law = frac->base;
  const DriverPath base = gen_levy(base_spec, t0 - dt * ext, dt, total, seed);

  DriverPath path;
  path.t0 = t0;
  path.dt = dt;
  path.seed = seed;
  path.increments = Matrix::Zero(steps, spec.n);
  double worst_deficit = 0.0;
  for (int j = 0; j < spec.n; ++j) {
    const std::vector<double> w = fractional_weights(dt, frac->beta[j], total);
    worst_deficit = std::max(worst_deficit, tail_sigma_deficit(w, dt, frac->beta[j]));
    std::vector<double> dl(static_cast<std::size_t>(total));
    for (int k = 0; k < total; ++k) dl[static_cast<std::size_t>(k)] = base.increments(k, j);
    const std::vector<double> conv = convolve(w, dl);
    for (int k = 0; k < steps; ++k)
      path.increments(k, j) = conv[static_cast<std::size_t>(ext + k)];
  }
  if (diag) {
    diag->history_steps = ext;
    diag->sigma_deficit = worst_deficit;
  }
  if (!path.increments.allFinite()) throw NumericalError("gen_fractional: non-finite increment");
  return path;
}

DriverPath generate_driver(const DriverSpec& spec, double t0, double dt, int steps,
                           std::uint64_t seed) {
  return spec.is_fractional() ? gen_fractional(spec, t0, dt, steps, seed)
                              : gen_levy(spec, t0, dt, steps, seed);
}

} // namespace carma
