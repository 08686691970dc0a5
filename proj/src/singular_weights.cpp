#include "fracflow/singular_quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstring>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <utility>

#include <boost/math/quadrature/gauss.hpp>

#include "fracflow/fft.hpp"

namespace fracflow {
namespace {

using Key = std::pair<std::size_t, std::uint64_t>;

Key make_key(std::size_t n, double p) {
  std::uint64_t bits;
  std::memcpy(&bits, &p, sizeof bits);
  return {n, bits};
}

// Coefficients of the Lagrange basis through `nodes` in the monomial basis:
// basis_l(t) = sum_m coeff[m][l] t^m.
template <std::size_t K>
std::array<std::array<double, K>, K> lagrange_monomials(const std::array<double, K>& nodes) {
  // Invert the Vandermonde matrix V[l][m] = nodes[l]^m by Gauss-Jordan.
  std::array<std::array<double, 2 * K>, K> a{};
  for (std::size_t l = 0; l < K; ++l) {
    double v = 1.0;
    for (std::size_t m = 0; m < K; ++m) {
      a[l][m] = v;
      v *= nodes[l];
    }
    a[l][K + l] = 1.0;
  }
  for (std::size_t c = 0; c < K; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < K; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    const double d = a[c][c];
    for (auto& x : a[c]) x /= d;
    for (std::size_t r = 0; r < K; ++r) {
      if (r == c) continue;
      const double f = a[r][c];
      for (std::size_t q = 0; q < 2 * K; ++q) a[r][q] -= f * a[c][q];
    }
  }
  // V^{-1}[m][l] gives the m-th monomial coefficient of basis l.
  std::array<std::array<double, K>, K> out{};
  for (std::size_t m = 0; m < K; ++m)
    for (std::size_t l = 0; l < K; ++l) out[m][l] = a[m][K + l];
  return out;
}

template <std::size_t K>
double lagrange_basis(const std::array<double, K>& nodes, std::size_t l, double t) {
  double v = 1.0;
  for (std::size_t q = 0; q < K; ++q)
    if (q != l) v *= (t - nodes[q]) / (nodes[l] - nodes[q]);
  return v;
}

std::vector<double> build_graph_weights(std::size_t n, double p) {
  if (n < 5) throw std::invalid_argument("graph weights need at least 5 nodes");
  std::vector<double> w(n * n, 0.0);

  // 8-point Gauss-Legendre on [0, 1]
  using GL = boost::math::quadrature::gauss<double, 8>;
  std::vector<std::pair<double, double>> gl;
  for (std::size_t q = 0; q < GL::abscissa().size(); ++q) {
    const double x = GL::abscissa()[q], wt = GL::weights()[q];
    gl.emplace_back(0.5 + 0.5 * x, 0.5 * wt);
    if (x != 0.0) gl.emplace_back(0.5 - 0.5 * x, 0.5 * wt);
  }

  for (std::size_t i = 0; i < n; ++i) {
    double* row = w.data() + i * n;
    const auto ii = static_cast<std::ptrdiff_t>(i);
    const auto nn = static_cast<std::ptrdiff_t>(n);

    // Intervals touching the singular node: quartic through a 5-node window,
    // integrated against |t|^{-p} in closed form (finite part where needed).
    {
      const std::ptrdiff_t w0 = std::clamp<std::ptrdiff_t>(ii - 2, 0, nn - 5);
      std::array<double, 5> nodes{};
      for (std::size_t l = 0; l < 5; ++l) nodes[l] = static_cast<double>(w0 + static_cast<std::ptrdiff_t>(l) - ii);
      const auto coeff = lagrange_monomials(nodes);
      const bool has_left = i >= 1;
      const bool has_right = i + 1 < n;
      for (std::size_t m = 0; m < 5; ++m) {
        const double base = 1.0 / (static_cast<double>(m) + 1.0 - p);
        double mu = 0.0;
        if (has_right) mu += base;
        if (has_left) mu += (m % 2 == 0 ? 1.0 : -1.0) * base;
        for (std::size_t l = 0; l < 5; ++l) row[w0 + static_cast<std::ptrdiff_t>(l)] += coeff[m][l] * mu;
      }
    }

    // Remaining intervals [k, k+1]: cubic through a 4-node stencil.
    for (std::ptrdiff_t k = 0; k + 1 < nn; ++k) {
      if (k == ii || k == ii - 1) continue;
      const std::ptrdiff_t s0 = std::clamp<std::ptrdiff_t>(k - 1, 0, nn - 4);
      std::array<double, 4> nodes{};
      for (std::size_t l = 0; l < 4; ++l) nodes[l] = static_cast<double>(s0 + static_cast<std::ptrdiff_t>(l) - k);
      const double offset = static_cast<double>(k - ii);
      std::array<double, 4> acc{};
      for (const auto& [t, wt] : gl) {
        const double kern = wt * std::pow(std::abs(t + offset), -p);
        for (std::size_t l = 0; l < 4; ++l) acc[l] += kern * lagrange_basis(nodes, l, t);
      }
      for (std::size_t l = 0; l < 4; ++l) row[s0 + static_cast<std::ptrdiff_t>(l)] += acc[l];
    }
  }
  return w;
}

std::vector<double> build_periodic_weights(std::size_t m, double p) {
  const auto c = periodic_kernel_coefficients(p, m / 2);
  std::vector<std::complex<double>> half(c.begin(), c.end());
  auto w = fft::inverse(half, m);
  for (double& x : w) x /= static_cast<double>(m);
  return w;
}

template <class Builder>
std::shared_ptr<const std::vector<double>> cached(std::map<Key, std::shared_ptr<const std::vector<double>>>& cache,
                                                  std::mutex& mu, std::size_t n, double p, Builder build) {
  const Key key = make_key(n, p);
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto built = std::make_shared<const std::vector<double>>(build(n, p));
  std::lock_guard lock(mu);
  return cache.emplace(key, std::move(built)).first->second;
}

}  // namespace

std::vector<double> periodic_kernel_coefficients(double p, std::size_t kmax) {
  if (!(p > 0.0) || std::abs(p - std::round(p)) < 1e-12) {
    throw std::invalid_argument("kernel exponent must be positive and non-integer");
  }
  std::vector<double> c(kmax + 1);
  // c_k = 2 Gamma(1-p) sin(pi p/2) Gamma(k + p/2) / Gamma(k + 1 - p/2)
  const double front = 2.0 * std::tgamma(1.0 - p) * std::sin(0.5 * std::numbers::pi * p);
  double ratio = std::tgamma(0.5 * p) / std::tgamma(1.0 - 0.5 * p);
  for (std::size_t k = 0; k <= kmax; ++k) {
    c[k] = front * ratio;
    const double kk = static_cast<double>(k);
    ratio *= (kk + 0.5 * p) / (kk + 1.0 - 0.5 * p);
  }
  return c;
}

std::shared_ptr<const std::vector<double>> periodic_singular_weights(std::size_t m, double p) {
  static std::map<Key, std::shared_ptr<const std::vector<double>>> cache;
  static std::mutex mu;
  return cached(cache, mu, m, p, build_periodic_weights);
}

std::shared_ptr<const std::vector<double>> graph_singular_weights(std::size_t n, double p) {
  static std::map<Key, std::shared_ptr<const std::vector<double>>> cache;
  static std::mutex mu;
  return cached(cache, mu, n, p, build_graph_weights);
}

}  // namespace fracflow
