#include "carma/msdde_kernel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

#include "carma/errors.hpp"
#include "carma/fft.hpp"
#include "carma/matexp.hpp"
#include "carma/numeric.hpp"

namespace carma {

Matrix SampledKernel::at_lag(double t) const {
  const int n = dim();
  if (values.empty() || t < offset - 1e-12 || t > support() + 1e-12) return Matrix::Zero(n, n);
  const double pos = (t - offset) / dt;
  const auto k = static_cast<Eigen::Index>(std::floor(pos));
  if (k < 0) return values.front();
  if (k + 1 >= count()) return values.back();
  const double w = pos - static_cast<double>(k);
  if (w < 1e-12) return values[static_cast<std::size_t>(k)];
  return (1.0 - w) * values[static_cast<std::size_t>(k)] +
         w * values[static_cast<std::size_t>(k) + 1];
}

SampledKernel SampledKernel::truncated(double horizon) const {
  SampledKernel out;
  out.dt = dt;
  out.offset = offset;
  out.atom_at_zero = atom_at_zero;
  const int keep = std::min<int>(count(), static_cast<int>(std::floor((horizon - offset) / dt)) + 1);
  out.values.assign(values.begin(), values.begin() + std::max(keep, 1));
  return out;
}

namespace {

// Reference generator for the spectrum-tail subtraction.  The atom of eta
// at zero is the natural choice when it decays fast enough for e^{Wt} to be
// negligible at the far end of the FFT window; otherwise fall back to a
// scalar rate.
Matrix reference_generator(const DelayMeasure& eta, double window) {
  const Matrix w0 = eta.weight_at_zero();
  Eigen::EigenSolver<Matrix> solver(w0, /*computeEigenvectors=*/false);
  if (solver.info() == Eigen::Success) {
    double abscissa = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i)
      abscissa = std::max(abscissa, solver.eigenvalues()[i].real());
    if (abscissa < -std::max(12.0 / window, 1e-3)) return w0;
  }
  const double lambda = std::max({1.0, 16.0 / window, eta.total_variation_bound() / eta.n});
  return -lambda * Matrix::Identity(eta.n, eta.n);
}

// L[density](i y_k) for all k (wrapped FFT order) when the sampled density
// shares the kernel grid; closed forms and small grids go through
// DelayMeasure::laplace directly.
std::vector<CMatrix> density_spectrum_fft(const SampledDensity& d, int fft_size) {
  const int n = static_cast<int>(d.values.front().rows());
  const int j_count = static_cast<int>(d.values.size());
  std::vector<CMatrix> out(static_cast<std::size_t>(fft_size), CMatrix::Zero(n, n));
  Dft dft(fft_size, +1); // sign +1: sum_j x_j e^{+2 pi i k j / N}
  std::vector<Complex> buf(static_cast<std::size_t>(fft_size));
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      std::fill(buf.begin(), buf.end(), Complex(0.0, 0.0));
      for (int j = 0; j < j_count; ++j)
        buf[static_cast<std::size_t>(j)] =
            trapezoid_weight(j, j_count) * d.values[static_cast<std::size_t>(j)](r, c);
      dft.run(buf);
      for (int k = 0; k < fft_size; ++k)
        out[static_cast<std::size_t>(k)](r, c) = d.dt * buf[static_cast<std::size_t>(k)];
    }
  }
  return out;
}

} // namespace

KernelFftResult kernel_fft(const DelayMeasure& eta, double dt, int fft_size) {
  if (dt <= 0.0) throw std::invalid_argument("kernel_fft: dt must be positive");
  if (fft_size < 8 || (fft_size & (fft_size - 1)) != 0)
    throw std::invalid_argument("kernel_fft: fft_size must be a power of two >= 8");
  const int n = eta.n;
  const int half = fft_size / 2;
  const double window = dt * fft_size;
  const double dy = 2.0 * M_PI / window;

  KernelFftResult result;
  result.fft_size = fft_size;
  result.reference_generator = reference_generator(eta, window);
  const Matrix& ref_w = result.reference_generator;

  // Sampled densities on the kernel grid get their spectra from one FFT;
  // anything else is evaluated per frequency (closed form for exp-family).
  std::vector<CMatrix> sampled_spec;
  bool use_sampled_fft = false;
  if (eta.sampled_density) {
    if (static_cast<int>(eta.sampled_density->values.size()) >= fft_size)
      throw std::invalid_argument("kernel_fft: density support exceeds the FFT window");
    if (std::abs(eta.sampled_density->dt - dt) > 1e-12 * dt)
      throw std::invalid_argument("kernel_fft: sampled density must share the kernel grid step");
    sampled_spec = density_spectrum_fft(*eta.sampled_density, fft_size);
    use_sampled_fft = true;
  }

  const CMatrix eye = CMatrix::Identity(n, n);
  std::vector<CMatrix> residual_spec(static_cast<std::size_t>(fft_size));
  for (int idx = 0; idx < fft_size; ++idx) {
    const int k = idx < half ? idx : idx - fft_size;
    const double y = dy * k;
    const Complex iy(0.0, y);
    CMatrix h = -iy * eye;
    for (const DelayMeasure::Atom& a : eta.atoms)
      h -= std::exp(iy * a.location) * a.weight.cast<Complex>();
    if (use_sampled_fft)
      h -= sampled_spec[static_cast<std::size_t>(idx)];
    if (eta.exp_density) h -= eta.exp_density->laplace(iy);

    Eigen::PartialPivLU<CMatrix> lu(h);
    const Complex det = lu.determinant();
    const double scale = std::pow(1.0 + std::abs(y), n);
    if (!std::isfinite(std::abs(det)) || std::abs(det) < 1e-12 * scale)
      throw NumericalError("kernel_fft: h(iy) singular at grid frequency y = " + std::to_string(y));
    CMatrix h_inv = lu.solve(eye);

    CMatrix href = -iy * eye - ref_w.cast<Complex>();
    residual_spec[static_cast<std::size_t>(idx)] = h_inv - href.partialPivLu().solve(eye);
  }

  // Entrywise inverse transform: g(l dt) = (1/(N dt)) sum_k H_k e^{-2 pi i k l / N}.
  result.residual_ring.assign(static_cast<std::size_t>(fft_size), Matrix::Zero(n, n));
  {
    Dft dft(fft_size, -1);
    std::vector<Complex> buf(static_cast<std::size_t>(fft_size));
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        for (int idx = 0; idx < fft_size; ++idx)
          buf[static_cast<std::size_t>(idx)] = residual_spec[static_cast<std::size_t>(idx)](r, c);
        dft.run(buf);
        for (int idx = 0; idx < fft_size; ++idx)
          result.residual_ring[static_cast<std::size_t>(idx)](r, c) =
              buf[static_cast<std::size_t>(idx)].real() / window;
      }
    }
  }

  // Diagnostics over the negative-time half of the ring.
  double neg_mass = 0.0, pos_mass = 0.0, neg_max = 0.0;
  for (int idx = half + 1; idx < fft_size; ++idx) {
    const double v = max_abs(result.residual_ring[static_cast<std::size_t>(idx)]);
    neg_max = std::max(neg_max, v);
    neg_mass += v;
  }

  SampledKernel kernel;
  kernel.dt = dt;
  kernel.offset = 0.0;
  kernel.atom_at_zero = Matrix::Zero(n, n);
  kernel.values.reserve(static_cast<std::size_t>(half) + 1);
  const Matrix step = matrix_exp(ref_w * dt);
  Matrix ref_val = Matrix::Identity(n, n);
  for (int l = 0; l <= half; ++l) {
    kernel.values.push_back(result.residual_ring[static_cast<std::size_t>(l)] + ref_val);
    pos_mass += max_abs(kernel.values.back());
    ref_val = step * ref_val;
  }
  result.neg_time_max = neg_max;
  result.neg_time_mass_ratio = pos_mass > 0.0 ? neg_mass / pos_mass : 0.0;
  result.kernel = std::move(kernel);
  return result;
}

CMatrix kernel_spectrum(const KernelFftResult& result, int k) {
  const int fft_size = result.fft_size;
  if (k < -fft_size / 2 || k >= fft_size / 2)
    throw std::invalid_argument("kernel_spectrum: frequency index out of range");
  const double dt = result.kernel.dt;
  const double y = 2.0 * M_PI * k / (dt * fft_size);
  const int n = result.kernel.dim();
  CMatrix acc = CMatrix::Zero(n, n);
  for (int l = 0; l < fft_size; ++l) {
    const double ph = 2.0 * M_PI * static_cast<double>(k) * l / fft_size;
    acc += Complex(std::cos(ph), std::sin(ph)) *
           result.residual_ring[static_cast<std::size_t>(l)].cast<Complex>();
  }
  acc *= dt;
  CMatrix href = Complex(0.0, -y) * CMatrix::Identity(n, n) -
                 result.reference_generator.cast<Complex>();
  return acc + href.partialPivLu().solve(CMatrix::Identity(n, n));
}

std::vector<Matrix> convolve_kernel_measure(const SampledKernel& g, const DelayMeasure& eta) {
  const int n = g.dim();
  const int count = g.count();
  if (g.offset != 0.0)
    throw std::invalid_argument("convolve_kernel_measure: kernel must be sampled on-grid");
  std::vector<Matrix> out(static_cast<std::size_t>(count), Matrix::Zero(n, n));

  // Atom part: g(t - t_a) W_a, interpolated off-grid.
  for (const DelayMeasure::Atom& a : eta.atoms) {
    const double cells = a.location / g.dt;
    const auto shift = static_cast<long>(std::llround(cells));
    const bool on_grid = std::abs(cells - static_cast<double>(shift)) < 1e-9;
    for (int l = 0; l < count; ++l) {
      if (on_grid) {
        const long j = l - shift;
        if (j >= 0 && j < count)
          out[static_cast<std::size_t>(l)] += g.values[static_cast<std::size_t>(j)] * a.weight;
      } else {
        out[static_cast<std::size_t>(l)] += g.at_lag(g.dt * l - a.location) * a.weight;
      }
    }
  }

  if (!eta.has_density()) return out;

  // Density part by trapezoid on the shared grid, via scalar convolutions:
  // out_ik(l) += dt * sum_j w_j g_ia((l-j) dt) rho_ak(j dt).
  const std::vector<Matrix> rho = eta.density_samples(g.dt, count);
  const int j_count = static_cast<int>(rho.size());
  std::vector<double> ga(static_cast<std::size_t>(count));
  std::vector<double> rk(static_cast<std::size_t>(j_count));
  for (int i = 0; i < n; ++i) {
    for (int a = 0; a < n; ++a) {
      for (int l = 0; l < count; ++l) ga[static_cast<std::size_t>(l)] = g.values[static_cast<std::size_t>(l)](i, a);
      for (int k = 0; k < n; ++k) {
        for (int j = 0; j < j_count; ++j)
          rk[static_cast<std::size_t>(j)] =
              trapezoid_weight(j, j_count) * rho[static_cast<std::size_t>(j)](a, k);
        const std::vector<double> conv = convolve(ga, rk);
        for (int l = 0; l < count; ++l)
          out[static_cast<std::size_t>(l)](i, k) += g.dt * conv[static_cast<std::size_t>(l)];
      }
    }
  }
  return out;
}

KernelMeasureResidual kernel_measure_residual(const SampledKernel& g, const DelayMeasure& eta) {
  const int n = g.dim();
  const std::vector<Matrix> conv = convolve_kernel_measure(g, eta);
  const std::vector<Matrix> cumulative = cumulative_trapezoid(conv, g.dt);
  KernelMeasureResidual out;
  const Matrix eye = Matrix::Identity(n, n);
  for (int l = 0; l < g.count(); ++l) {
    const Matrix resid = g.values[static_cast<std::size_t>(l)] - eye - cumulative[static_cast<std::size_t>(l)];
    out.eq_residual = std::max(out.eq_residual, max_abs(resid));
  }
  out.sum_residual = max_abs(Matrix(cumulative.back() + eye));
  return out;
}

} // namespace carma
