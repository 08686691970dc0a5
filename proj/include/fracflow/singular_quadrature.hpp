#pragma once

#include <cstddef>
#include <memory>
#include <vector>

namespace fracflow {

/// Fourier coefficients c_k = f.p. int_0^{2pi} |2 sin(phi/2)|^{-p} cos(k phi) dphi,
/// k = 0..kmax. For p < 1 the integral is ordinary; for larger non-integer p
/// it is the Hadamard finite part (analytic continuation in p).
std::vector<double> periodic_kernel_coefficients(double p, std::size_t kmax);

/// Product-integration weights on the M-point periodic grid:
///   f.p. int_0^{2pi} |2 sin((theta - theta_i)/2)|^{-p} g(theta) dtheta
///     ~= sum_j W[(j - i) mod M] g(theta_j),
/// exact for trigonometric polynomials of degree < M/2. Cached per (M, p).
std::shared_ptr<const std::vector<double>> periodic_singular_weights(std::size_t m, double p);

/// Product-integration weights on a uniform grid of n nodes with unit spacing:
///   f.p. int_{0}^{n-1} |t - i|^{-p} g(t) dt ~= sum_j W[i*n + j] g(j).
/// Piecewise cubic interpolation of g away from t = i, a centred quartic on
/// the two intervals touching i. Multiply by h^{1-p} for spacing h. Cached per (n, p).
std::shared_ptr<const std::vector<double>> graph_singular_weights(std::size_t n, double p);

}  // namespace fracflow
