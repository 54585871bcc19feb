#include "carma/stability.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

#include "carma/errors.hpp"

namespace carma {

HalfPlaneReport halfplane_check(const MatrixPoly& p, double tolerance) {
  if (!p.is_monic()) throw std::invalid_argument("halfplane_check: P must be monic");
  HalfPlaneReport report;
  if (p.degree() == 0) {
    // Constant identity polynomial: no zeros at all.
    report.max_real_part = -std::numeric_limits<double>::infinity();
    report.margin = std::numeric_limits<double>::infinity();
    report.pass = true;
    return report;
  }
  const Matrix comp = companion(p);
  Eigen::EigenSolver<Matrix> solver(comp, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw NumericalError("halfplane_check: eigensolver failed to converge");
  const auto& ev = solver.eigenvalues();
  report.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  report.max_real_part = -std::numeric_limits<double>::infinity();
  for (const Complex& l : report.eigenvalues)
    report.max_real_part = std::max(report.max_real_part, l.real());
  report.margin = -report.max_real_part;
  report.pass = report.max_real_part < -tolerance;
  return report;
}

CharScan msdde_char_scan(const DelayMeasure& eta, const std::vector<double>& y_grid) {
  if (y_grid.empty()) throw std::invalid_argument("msdde_char_scan: empty grid");
  const double lo = *std::min_element(y_grid.begin(), y_grid.end());
  const double hi = *std::max_element(y_grid.begin(), y_grid.end());
  if (std::abs(lo + hi) > 1e-9 * std::max(1.0, std::abs(hi)))
    throw std::invalid_argument("msdde_char_scan: grid must be symmetric about 0");

  CharScan scan;
  scan.min_abs_det = std::numeric_limits<double>::infinity();
  for (double y : y_grid) {
    const double v = std::abs(eval_h(eta, Complex(0.0, y)).determinant());
    if (v < scan.min_abs_det) {
      scan.min_abs_det = v;
      scan.argmin = y;
    }
  }
  return scan;
}

std::vector<double> default_scan_grid(const DelayMeasure& eta, int points) {
  if (points < 2) throw std::invalid_argument("default_scan_grid: need at least 2 points");
  // Heuristic spectral scale: total variation per dimension, at least 1.
  const double scale = std::max(1.0, eta.total_variation_bound() / eta.n);
  const double half_width = 50.0 * scale;
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i)
    grid[static_cast<std::size_t>(i)] =
        -half_width + 2.0 * half_width * i / (points - 1);
  return grid;
}

} // namespace carma
