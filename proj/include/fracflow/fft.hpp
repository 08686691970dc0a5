#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace fracflow::fft {

/// Normalized half spectrum of periodic samples on a uniform grid:
/// c_k = (1/M) sum_j f_j exp(-i k theta_j), k = 0..M/2.
std::vector<std::complex<double>> forward(std::span<const double> samples);

/// Samples of c_0 + 2 sum_{0<k<M/2} Re(c_k e^{ik theta}) + Re(c_{M/2}) cos(M theta / 2)
/// on the M-point grid. Inverse of forward().
std::vector<double> inverse(std::span<const std::complex<double>> half_spectrum, std::size_t m);

}  // namespace fracflow::fft
