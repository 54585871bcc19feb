#pragma once

#include <functional>
#include <vector>

#include "carma/types.hpp"

namespace carma {

/// Trapezoid weight for node i of an m-point uniform grid (1/2 at the ends).
inline double trapezoid_weight(int i, int m) {
  return (i == 0 || i == m - 1) ? 0.5 : 1.0;
}

/// Trapezoid integral of matrix samples on a uniform grid with step dt.
Matrix trapezoid(const std::vector<Matrix>& samples, double dt);

/// Running trapezoid integral; out[k] = integral over [t0, t0 + k*dt].
std::vector<Matrix> cumulative_trapezoid(const std::vector<Matrix>& samples, double dt);

/// Fourier transform F[f](y) = \int e^{iyt} f(t) dt of matrix samples on
/// t = k*dt, k = 0..m-1, by trapezoid with Euler-Maclaurin end corrections
/// (endpoint derivatives from 4th-order one-sided stencils).  Accurate to
/// O(dt^4) in the oscillatory regime, which plain trapezoid is not.
CMatrix fourier_quadrature(const std::vector<Matrix>& samples, double dt, double y);

/// Runs fn(i) for i in [0, count) on a small thread pool.  Results must be
/// written to disjoint slots so the reduction order stays deterministic.
void parallel_for(int count, const std::function<void(int)>& fn);

} // namespace carma
