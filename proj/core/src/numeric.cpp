#include "carma/numeric.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace carma {

Matrix trapezoid(const std::vector<Matrix>& samples, double dt) {
  if (samples.empty()) throw std::invalid_argument("trapezoid: no samples");
  Matrix acc = Matrix::Zero(samples[0].rows(), samples[0].cols());
  const int m = static_cast<int>(samples.size());
  if (m == 1) return acc;
  for (int i = 0; i < m; ++i) acc += trapezoid_weight(i, m) * samples[i];
  return acc * dt;
}

std::vector<Matrix> cumulative_trapezoid(const std::vector<Matrix>& samples, double dt) {
  std::vector<Matrix> out(samples.size());
  if (samples.empty()) return out;
  out[0] = Matrix::Zero(samples[0].rows(), samples[0].cols());
  for (std::size_t k = 1; k < samples.size(); ++k)
    out[k] = out[k - 1] + 0.5 * dt * (samples[k - 1] + samples[k]);
  return out;
}

namespace {

// 4th-order one-sided derivative at the first of five samples.
Matrix edge_derivative(const std::vector<Matrix>& s, int i0, int stride, double dt) {
  return (-25.0 * s[i0] + 48.0 * s[i0 + stride] - 36.0 * s[i0 + 2 * stride] +
          16.0 * s[i0 + 3 * stride] - 3.0 * s[i0 + 4 * stride]) /
         (12.0 * dt * stride);
}

} // namespace

CMatrix fourier_quadrature(const std::vector<Matrix>& samples, double dt, double y) {
  const int m = static_cast<int>(samples.size());
  if (m < 5) throw std::invalid_argument("fourier_quadrature: need at least 5 samples");
  const auto rows = samples[0].rows();
  const auto cols = samples[0].cols();
  CMatrix acc = CMatrix::Zero(rows, cols);
  for (int k = 0; k < m; ++k) {
    const double ph = y * dt * k;
    acc += (trapezoid_weight(k, m) * Complex(std::cos(ph), std::sin(ph))) * samples[k];
  }
  acc *= dt;
  // Euler-Maclaurin end correction: -(dt^2/12) [d/dt (e^{iyt} f)]_0^T.
  const Complex iy(0.0, y);
  const Matrix d0 = edge_derivative(samples, 0, 1, dt);
  const Matrix dT = -edge_derivative(samples, m - 1, -1, dt);
  const double phT = y * dt * (m - 1);
  const Complex eT(std::cos(phT), std::sin(phT));
  CMatrix boundary = eT * (iy * samples[m - 1].cast<Complex>() + dT.cast<Complex>()) -
                     (iy * samples[0].cast<Complex>() + d0.cast<Complex>());
  acc -= (dt * dt / 12.0) * boundary;
  return acc;
}

void parallel_for(int count, const std::function<void(int)>& fn) {
  if (count <= 0) return;
  unsigned hw = std::thread::hardware_concurrency();
  int workers = static_cast<int>(hw == 0 ? 1 : hw);
  if (workers > count) workers = count;
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr first_error;
  std::mutex err_mutex;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < count; i += workers) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

} // namespace carma
