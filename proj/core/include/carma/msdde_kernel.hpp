#pragma once

#include <vector>

#include "carma/delay.hpp"
#include "carma/types.hpp"

namespace carma {

/// Matrix kernel sampled at t = offset + k*dt.  offset is 0 for on-grid
/// samples and dt/2 for midpoint-sampled kernels used by the moving-average
/// engine.  atom_at_zero carries the point mass of the associated kernel
/// measure (identity block for CARMA g~ with p = q+1, zero otherwise);
/// sample values never smear it.
struct SampledKernel {
  double dt = 0.0;
  double offset = 0.0;
  std::vector<Matrix> values;
  Matrix atom_at_zero;

  int dim() const { return values.empty() ? 0 : static_cast<int>(values.front().rows()); }
  int count() const { return static_cast<int>(values.size()); }
  double support() const { return offset + dt * (values.empty() ? 0 : count() - 1); }

  /// Sample value at lag t: exact at grid points, linear in between, zero
  /// outside [0, support].
  Matrix at_lag(double t) const;

  /// Copy truncated to lags <= horizon.
  SampledKernel truncated(double horizon) const;
};

struct KernelFftResult {
  SampledKernel kernel;              // g on t = 0..(fft_size/2)*dt
  Matrix reference_generator;        // W of the subtracted resolvent reference
  std::vector<Matrix> residual_ring; // inverse transform of the residual, full ring
  double neg_time_max = 0.0;         // causality diagnostic: max |g| at t < 0
  double neg_time_mass_ratio = 0.0;  // sum|g| on t<0 over sum|g| on t>=0
  int fft_size = 0;
};

/// Solution kernel g characterized by F[g](y) = h(iy)^{-1}, computed by
/// sampling the spectrum on the FFT grid y_k = 2*pi*k/(N*dt),
/// k = -N/2..N/2-1, and inverting the discrete transform entrywise.
///
/// The O(1/y) tail of h(iy)^{-1} (responsible for the unit jump of g at 0)
/// is removed before the FFT by subtracting the resolvent of a reference
/// generator W — the measure's weight at zero when that matrix decays,
/// otherwise -lambda*I — and adding e^{Wt} back exactly on the grid.  The
/// residual spectrum decays at least like 1/y^2, so the inversion is free
/// of midpoint averaging at the jump and of Gibbs ringing.
///
/// Values at negative times are windowed out of the returned kernel and
/// reported as a causality diagnostic.  Throws NumericalError when h(iy_k)
/// is singular at a grid frequency.
KernelFftResult kernel_fft(const DelayMeasure& eta, double dt, int fft_size);

/// Forward transform consistent with kernel_fft's inversion; reproduces
/// h(iy_k)^{-1} exactly up to roundoff when fed kernel_fft output.
CMatrix kernel_spectrum(const KernelFftResult& result, int k);

struct KernelMeasureResidual {
  double eq_residual = 0.0;  // max_t |g(t) - 1_{t>=0} I - int_{-inf}^t g*eta du|
  double sum_residual = 0.0; // |int g*eta du + I|
};

/// Quadrature check of the kernel-measure identities: the Stieltjes density
/// of g(du) is g*eta, it integrates the step of g, and its total integral
/// is -I.  Both residuals are truncation- and quadrature-limited.
KernelMeasureResidual kernel_measure_residual(const SampledKernel& g, const DelayMeasure& eta);

/// Convolution (g * eta)(t) on g's sample grid (atoms exactly, density by
/// trapezoid), needed for the identities above and the generic predictor.
std::vector<Matrix> convolve_kernel_measure(const SampledKernel& g, const DelayMeasure& eta);

} // namespace carma
