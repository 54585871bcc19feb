#pragma once

#include <complex>
#include <vector>

namespace carma {

/// Complex-to-complex DFT of length n.  Sign -1 computes
/// X_k = sum_l x_l e^{-2*pi*i*k*l/n}, sign +1 the conjugate transform.
/// No normalization is applied.  Owns an FFTW plan; plan creation is
/// serialized internally, execution is thread-safe per instance.
class Dft {
 public:
  Dft(int n, int sign);
  ~Dft();
  Dft(const Dft&) = delete;
  Dft& operator=(const Dft&) = delete;

  int size() const { return n_; }
  void run(std::vector<std::complex<double>>& inout) const;

 private:
  int n_;
  void* plan_;
  std::complex<double>* buf_;
};

/// Linear convolution out[k] = sum_j a[j] * b[k-j] (sizes |a|+|b|-1),
/// FFT-backed for large inputs, direct otherwise.
std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b);

} // namespace carma
