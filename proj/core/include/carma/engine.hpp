#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "carma/drivers.hpp"
#include "carma/model.hpp"
#include "carma/msdde_kernel.hpp"

namespace carma {

/// Uniformly sampled n-dimensional path.  derivatives[j-1] holds the j-th
/// derivative on the same grid when the producer can supply it exactly
/// (the state-space simulator can, up to order p-q-1).
struct SampledPath {
  double t0 = 0.0;
  double dt = 0.0;
  Matrix values; // steps x n
  std::vector<Matrix> derivatives;

  int steps() const { return static_cast<int>(values.rows()); }
  int dim() const { return static_cast<int>(values.cols()); }
  double end_time() const { return t0 + dt * (steps() - 1); }
  double time(int k) const { return t0 + dt * k; }
};

/// Max deviation between stored derivative stacks and central differences
/// of the level below; O(dt^2) for consistent producers.
double derivative_consistency(const SampledPath& path);

/// Midpoint-sampled moving-average kernel of a CARMA model, cut at the
/// model's truncation horizon for the given tolerance.
SampledKernel carma_ma_kernel(const CarmaModel& model, double dt, double tol = 1e-8);

/// On-grid g~ samples of a CARMA model as a SampledKernel (atom set for
/// p = q+1), for the generic MSDDE predictor.
SampledKernel carma_grid_kernel(const CarmaModel& model, double dt, double tol = 1e-8);

/// X(t) = sum over driver steps of kernel(t - u_mid) dZ, the midpoint
/// Riemann-Stieltjes discretization of the moving average.  The first
/// output time is t0 + burn_in; the kernel support must fit inside the
/// burn-in window.
SampledPath simulate_ma(const SampledKernel& kernel, const DriverPath& driver, double burn_in);

/// How the state-space recursion consumes driver increments.
enum class NoiseCoupling {
  /// Exact transition law: xi_k = D E mu + L (dZ_k - mu dt) + chol(V) zeta_k
  /// with V = Q_dt - L Sigma dt L^T, so cov(xi) is the Van Loan integral
  /// exactly; zeta comes from a stream derived from the driver seed.
  exact_law,
  /// xi_k = E dZ_k: a pure function of the shared increments, used for
  /// pathwise cross-route comparisons against simulate_ma.
  increment_coupled,
};

struct StateSpaceOptions {
  NoiseCoupling coupling = NoiseCoupling::exact_law;
  std::optional<Vector> initial_state; // np-dim; zero + burn-in when absent
};

/// Exact discrete transition s_{k+1} = e^{A dt} s_k + xi_k of the CARMA
/// state-space representation, Brownian drivers only.  The step-noise
/// covariance int_0^dt e^{Au} E Sigma E^T e^{A^T u} du comes from an
/// augmented-matrix exponential.  Derivative stacks up to order p-q-1 are
/// filled from the state blocks.
SampledPath simulate_statespace(const CarmaModel& model, const DriverSpec& spec,
                                const DriverPath& driver, double burn_in,
                                const StateSpaceOptions& options = {});

struct RecoveredNoise {
  DriverPath path;     // estimated increments on the path grid (steps-1 rows)
  int first_valid = 0; // rows before this lack delay history or derivatives
  int last_valid = 0;  // inclusive
};

struct RecoverOptions {
  double truncation_tol = 1e-8;
  /// Reject finite differencing when dt^{-(m-1)} exceeds this.
  double noise_amplification_bound = 1e6;
};

/// Inverts the delay representation: per step,
///   dZ_k = dX^{(m-1)}_k + sum_j C_j X^{(j)}_k dt - (f * X)(t_k) dt,
/// with the delay convolution truncated at the model horizon.  Derivatives
/// come from the path's stacks or central differences; the warm-up region
/// is marked invalid, never zero-filled.
RecoveredNoise recover_noise(const CarmaModel& model, const SampledPath& path,
                             const RecoverOptions& options = {});

struct PredictionResult {
  double s = 0.0;  // conditioning time
  double dt = 0.0; // horizon grid step
  Matrix values;   // (horizon_steps+1) x dim, row 0 at t = s
  Matrix state_term;
  Matrix memory_term;
  Matrix noise_term;

  int steps() const { return static_cast<int>(values.rows()); }
  double time(int k) const { return s + dt * k; }
};

struct PredictOptions {
  double truncation_tol = 1e-8;
  /// E[Z_1]; the Levy predictor input Zhat_u = (u-s) mean_rate.
  Vector mean_rate;
  /// Explicit Zhat samples on the horizon grid (rows 0..horizon_steps,
  /// row 0 at t = s); overrides mean_rate when set.  This is the entry
  /// point for non-Levy noises whose conditional mean is supplied by the
  /// caller.
  std::optional<Matrix> zhat;
};

/// Conditional mean E[X_t | X_u, u <= s] for t on s + dt*(0..horizon_steps),
/// with s the last history time.  Component breakdown:
///   state_term  = sum_j g~_j(t-s) X_s^{(j-1)},
///   memory_term = int_{-inf}^s int_s^t g~(t-u) f(u-v) du X_v dv,
///   noise_term  = g~ * {Zhat 1_{(s,inf)}}(t).
PredictionResult predict(const CarmaModel& model, const SampledPath& history,
                         int horizon_steps, const PredictOptions& options);

/// First-order MSDDE predictor
///   g(t-s) X_s + int_s^t g(t-u) eta*{1_{(-inf,s]} X}(u) du + g*{1 Zhat}(t),
/// with the g(du) convolution applying the identity atom exactly and the
/// density part g*eta by quadrature.  zhat rows follow the horizon grid.
PredictionResult predict_msdde(const DelayMeasure& eta, const SampledKernel& g,
                               const SampledPath& history, const Matrix& zhat,
                               int horizon_steps);

/// History stacked with its derivative blocks, the state of the nested
/// first-order system (dimension m*n).
SampledPath stack_nested_history(const SampledPath& path, int order);

} // namespace carma
