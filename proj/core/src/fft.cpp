#include "carma/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>
#include <stdexcept>

namespace carma {

namespace {
// FFTW planning is not thread-safe; execution of distinct plans is.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}
} // namespace

Dft::Dft(int n, int sign) : n_(n) {
  if (n <= 0) throw std::invalid_argument("Dft: size must be positive");
  buf_ = reinterpret_cast<std::complex<double>*>(fftw_alloc_complex(static_cast<size_t>(n)));
  std::lock_guard<std::mutex> lock(plan_mutex());
  plan_ = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(buf_),
                           reinterpret_cast<fftw_complex*>(buf_),
                           sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
  if (!plan_) throw std::runtime_error("Dft: fftw plan creation failed");
}

Dft::~Dft() {
  std::lock_guard<std::mutex> lock(plan_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_));
  fftw_free(buf_);
}

void Dft::run(std::vector<std::complex<double>>& inout) const {
  if (static_cast<int>(inout.size()) != n_)
    throw std::invalid_argument("Dft::run: size mismatch");
  std::memcpy(buf_, inout.data(), sizeof(std::complex<double>) * inout.size());
  fftw_execute(static_cast<fftw_plan>(plan_));
  std::memcpy(inout.data(), buf_, sizeof(std::complex<double>) * inout.size());
}

std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) return {};
  const std::size_t out_n = a.size() + b.size() - 1;
  // Direct form below ~2^20 multiply-adds; FFT otherwise.
  if (a.size() * b.size() <= (1u << 20)) {
    std::vector<double> out(out_n, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
  }
  std::size_t n = 1;
  while (n < out_n) n <<= 1;
  Dft fwd(static_cast<int>(n), -1), inv(static_cast<int>(n), +1);
  std::vector<std::complex<double>> fa(n), fb(n);
  for (std::size_t i = 0; i < a.size(); ++i) fa[i] = a[i];
  for (std::size_t i = 0; i < b.size(); ++i) fb[i] = b[i];
  fwd.run(fa);
  fwd.run(fb);
  for (std::size_t i = 0; i < n; ++i) fa[i] *= fb[i];
  inv.run(fa);
  std::vector<double> out(out_n);
  for (std::size_t i = 0; i < out_n; ++i) out[i] = fa[i].real() / static_cast<double>(n);
  return out;
}

} // namespace carma
