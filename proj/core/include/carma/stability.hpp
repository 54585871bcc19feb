#pragma once

#include <vector>

#include "carma/delay.hpp"
#include "carma/matpoly.hpp"

namespace carma {

/// Location report for the zeros of det P(z), computed from the companion
/// spectrum.  pass holds iff every eigenvalue satisfies Re < -tolerance,
/// which is equivalent to det P(z) != 0 on the closed right half-plane.
struct HalfPlaneReport {
  std::vector<Complex> eigenvalues;
  double max_real_part = 0.0;
  double margin = 0.0; // distance of the spectrum to the imaginary axis
  bool pass = false;
};

constexpr double kHalfPlaneTolerance = 1e-9;

/// Companion-eigenvalue test of the half-plane condition for a monic P.
/// Throws NumericalError if the eigensolver does not converge; a silent
/// pass is never produced.
HalfPlaneReport halfplane_check(const MatrixPoly& p, double tolerance = kHalfPlaneTolerance);

struct CharScan {
  double min_abs_det = 0.0;
  double argmin = 0.0;
};

/// min over the grid of |det h(iy)| and its minimizer.  A large minimum is
/// evidence (not proof) that the solvability condition holds; the caller
/// interprets the value against its own tolerance.
CharScan msdde_char_scan(const DelayMeasure& eta, const std::vector<double>& y_grid);

/// Default symmetric scan grid: points on [-Y, Y] with Y = 50 * scale,
/// where scale is a heuristic spectral scale of the measure.
std::vector<double> default_scan_grid(const DelayMeasure& eta, int points = 4096);

} // namespace carma
