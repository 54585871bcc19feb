#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace carma {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

using MatrixList = std::vector<Matrix>;

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }
inline double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

} // namespace carma
