#pragma once

#include <complex>

namespace bardina::fft {

/// Analysis transform: collocation samples -> Fourier coefficients, with the
/// 1/n^3 normalization so coefficients match u(x) = sum u_hat(K) e^{2pi i K.x/L}.
void forward(const std::complex<double>* phys, std::complex<double>* coef, int n);

/// Synthesis transform: Fourier coefficients -> collocation samples (no scaling).
void backward(const std::complex<double>* coef, std::complex<double>* phys, int n);

/// Transform threads in use (>= 1). Capped by the BARDINA_THREADS environment
/// variable, read once at first use; defaults to 1 for reproducibility.
int transform_threads();

} // namespace bardina::fft
