#include <algorithm>
#include <cmath>
#include <exception>
#include <string>
#include <thread>

#include "detail.hpp"
#include "fracflow/curvature.hpp"
#include "fracflow/errors.hpp"
#include "fracflow/singular_quadrature.hpp"

namespace fracflow {

void QuadratureSpec::validate() const {
  if (cylinder_radius < 0.0 || !std::isfinite(cylinder_radius))
    throw std::invalid_argument("cylinder_radius must be >= 0 (0 = automatic)");
  if (graded_exponent != 0.0 && !(graded_exponent >= 1.0))
    throw std::invalid_argument("graded_exponent must be >= 1 (0 = automatic)");
  if (near_panels < 1 || far_panels < 1) throw std::invalid_argument("panel counts must be >= 1");
  if (max_depth < 1) throw std::invalid_argument("max_depth must be >= 1");
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw std::invalid_argument("tolerances must be positive");
  if (!(spectral_tail_tol > 0.0)) throw std::invalid_argument("spectral_tail_tol must be positive");
}

CurvatureField CurvatureField::from_values(std::vector<double> values) {
  CurvatureField f;
  f.values = std::move(values);
  if (!f.values.empty()) {
    const auto [lo, hi] = std::minmax_element(f.values.begin(), f.values.end());
    f.min = *lo;
    f.max = *hi;
  }
  return f;
}

namespace {

void check_resolution(const RadialCurve& curve, double tol, std::size_t at) {
  const auto c = curve.spectrum();
  const std::size_t m = curve.size();
  double total = std::abs(c[0]);
  double tail = 0.0;
  for (std::size_t k = 1; k <= m / 2; ++k) {
    const double w = static_cast<double>(k * k) * std::abs(c[k]);
    total += w;
    if (8 * k > 3 * m) tail += w;
  }
  if (tail > tol * total) {
    throw NonConvergent("radial samples are under-resolved (spectral tail fraction " +
                            std::to_string(tail / total) + ")",
                        at);
  }
}

double radial_value(const detail::RadialFrame& fr, const std::vector<double>& w, std::size_t i, double s) {
  const std::size_t m = fr.x.size();
  double acc = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t j = (i + k) % m;
    double g;
    if (k == 0) {
      g = 0.5 * cross(fr.dx[i], fr.ddx[i]) * std::pow(fr.speed[i], -2.0 - s);
    } else {
      const double sf = detail::chord_factor(k, m);
      const Vec2 d = fr.x[j] - fr.x[i];
      const double dd = dot(d, d) / sf;
      g = dot(d, fr.n[j]) / sf * std::pow(dd, -1.0 - 0.5 * s);
    }
    acc += w[k] * g;
  }
  return 2.0 * (1.0 - s) * acc;
}

double radial_gradient(const detail::RadialFrame& fr, const std::vector<double>& w, std::size_t i, double s) {
  const std::size_t m = fr.x.size();
  const Vec2 tau = (1.0 / fr.speed[i]) * fr.dx[i];
  double acc = 0.0;
  for (std::size_t k = 1; k < m; ++k) {
    const std::size_t j = (i + k) % m;
    const double sf = detail::chord_factor(k, m);
    const Vec2 d = fr.x[j] - fr.x[i];
    acc += w[k] * dot(tau, fr.n[j]) * std::pow(dot(d, d) / sf, -1.0 - 0.5 * s);
  }
  return 2.0 * s * (1.0 - s) * acc;
}

struct GraphData {
  std::vector<double> u, du, d2u;
  double h, half_width, left_slope, right_slope;

  explicit GraphData(const GraphCurve& g)
      : u(g.heights().begin(), g.heights().end()),
        du(g.size()),
        d2u(g.size()),
        h(g.spacing()),
        half_width(g.half_width()),
        left_slope(g.left_slope()),
        right_slope(g.right_slope()) {
    for (std::size_t j = 0; j < g.size(); ++j) {
      du[j] = g.slope(g.x(j));
      d2u[j] = g.second_derivative(g.x(j));
    }
  }
  double x(std::size_t j) const { return -half_width + h * static_cast<double>(j); }
};

// int_{d0}^inf (d^2 + (c + m d)^2)^{-p/2} dd
double line_tail(double c, double m, double d0, double p) {
  const double q = 1.0 + m * m;
  const double beta = c * m / q;
  const double a = std::abs(c) / q;
  const double lower = d0 + beta;
  if (a == 0.0 && lower <= 0.0) return 0.0;
  double v;
  if (lower >= 0.0) {
    v = detail::kernel_tail(a, lower, p);
  } else {
    const double whole = detail::kernel_tail(a, 0.0, p);
    v = whole + (whole - detail::kernel_tail(a, -lower, p));
  }
  return std::pow(q, -0.5 * p) * v;
}

// Offsets of the straight far-field pieces relative to node i:
// right: u - u_i = c_r + m_r d for d > L - x_i; left: u - u_i = c_l - m_l e for e = -d > L + x_i.
struct Tails {
  double c_right, c_left;
};

Tails graph_tails(const GraphData& gd, std::size_t i) {
  const double xi = gd.x(i);
  const double L = gd.half_width;
  return {gd.u.back() - gd.u[i] + gd.right_slope * (xi - L), gd.u.front() - gd.u[i] + gd.left_slope * (L + xi)};
}

double graph_value(const GraphData& gd, const std::vector<double>& w, std::size_t i, double s) {
  const std::size_t n = gd.u.size();
  const double* row = w.data() + i * n;
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double g;
    if (j == i) {
      g = -0.5 * gd.d2u[i] * std::pow(1.0 + gd.du[i] * gd.du[i], -1.0 - 0.5 * s);
    } else {
      const double d = (static_cast<double>(j) - static_cast<double>(i)) * gd.h;
      const double dv = gd.u[j] - gd.u[i];
      const double q = dv / d;
      g = (dv - d * gd.du[j]) / (d * d) * std::pow(1.0 + q * q, -1.0 - 0.5 * s);
    }
    acc += row[j] * g;
  }
  acc *= std::pow(gd.h, 1.0 - s);
  const double xi = gd.x(i), L = gd.half_width, p = 2.0 + s;
  const Tails t = graph_tails(gd, i);
  if (t.c_right != 0.0) acc += t.c_right * line_tail(t.c_right, gd.right_slope, L - xi, p);
  if (t.c_left != 0.0) acc += t.c_left * line_tail(t.c_left, -gd.left_slope, L + xi, p);
  return 2.0 * (1.0 - s) * acc;
}

double graph_gradient(const GraphData& gd, const std::vector<double>& w, std::size_t i, double s) {
  const std::size_t n = gd.u.size();
  const double* row = w.data() + i * n;
  const double sp = std::sqrt(1.0 + gd.du[i] * gd.du[i]);
  const double tx = 1.0 / sp, ty = gd.du[i] / sp;
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (j == i) continue;
    const double d = (static_cast<double>(j) - static_cast<double>(i)) * gd.h;
    const double q = (gd.u[j] - gd.u[i]) / d;
    acc += row[j] * (ty - tx * gd.du[j]) * std::pow(1.0 + q * q, -1.0 - 0.5 * s);
  }
  acc *= std::pow(gd.h, -1.0 - s);
  const double xi = gd.x(i), L = gd.half_width, p = 2.0 + s;
  const Tails t = graph_tails(gd, i);
  acc += (ty - tx * gd.right_slope) * line_tail(t.c_right, gd.right_slope, L - xi, p);
  acc += (ty - tx * gd.left_slope) * line_tail(t.c_left, -gd.left_slope, L + xi, p);
  return 2.0 * s * (1.0 - s) * acc;
}

void check_finite(double v, std::size_t at) {
  if (!std::isfinite(v)) throw NonConvergent("boundary quadrature produced a non-finite value", at);
}

template <class Fn>
void parallel_for(std::size_t n, unsigned workers, Fn fn) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n)));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

double hs_boundary(const Shape& shape, std::size_t at, FractionalOrder s, const QuadratureSpec& q) {
  if (at >= node_count(shape)) throw std::out_of_range("node index out of range");
  const double sv = s.value();
  double v;
  if (const auto* r = std::get_if<RadialCurve>(&shape)) {
    check_resolution(*r, q.spectral_tail_tol, at);
    const detail::RadialFrame fr(*r);
    v = radial_value(fr, *periodic_singular_weights(r->size(), sv), at, sv);
  } else {
    const auto& g = std::get<GraphCurve>(shape);
    const GraphData gd(g);
    v = graph_value(gd, *graph_singular_weights(g.size(), sv), at, sv);
  }
  check_finite(v, at);
  return v;
}

CurvatureField hs_field(const Shape& shape, FractionalOrder s, const QuadratureSpec& q, unsigned workers) {
  const double sv = s.value();
  const std::size_t n = node_count(shape);
  std::vector<double> values(n);
  if (const auto* r = std::get_if<RadialCurve>(&shape)) {
    check_resolution(*r, q.spectral_tail_tol, 0);
    const detail::RadialFrame fr(*r);
    const auto w = periodic_singular_weights(n, sv);
    parallel_for(n, workers, [&](std::size_t i) { values[i] = radial_value(fr, *w, i, sv); });
  } else {
    const GraphData gd(std::get<GraphCurve>(shape));
    const auto w = graph_singular_weights(n, sv);
    parallel_for(n, workers, [&](std::size_t i) { values[i] = graph_value(gd, *w, i, sv); });
  }
  for (std::size_t i = 0; i < n; ++i) check_finite(values[i], i);
  return CurvatureField::from_values(std::move(values));
}

std::vector<double> tangential_gradient_field(const RadialCurve& curve, FractionalOrder s) {
  const double sv = s.value();
  const detail::RadialFrame fr(curve);
  const auto w = periodic_singular_weights(curve.size(), 2.0 + sv);
  std::vector<double> out(curve.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = radial_gradient(fr, *w, i, sv);
  return out;
}

namespace detail {

double divergence_gradient(const Shape& shape, std::size_t at, double s) {
  if (const auto* r = std::get_if<RadialCurve>(&shape)) {
    const RadialFrame fr(*r);
    return radial_gradient(fr, *periodic_singular_weights(r->size(), 2.0 + s), at, s);
  }
  const auto& g = std::get<GraphCurve>(shape);
  const GraphData gd(g);
  return graph_gradient(gd, *graph_singular_weights(g.size(), 2.0 + s), at, s);
}

}  // namespace detail

double f5_rhs(const RadialCurve& curve, const CurvatureField& field, std::size_t at, FractionalOrder s) {
  const double sv = s.value();
  const std::size_t m = curve.size();
  if (field.values.size() != m) throw std::invalid_argument("field does not match curve");
  if (at >= m) throw std::out_of_range("node index out of range");
  const detail::RadialFrame fr(curve);
  const auto& w = *periodic_singular_weights(m, 2.0 + sv);
  const auto& h = field.values;
  const Vec2 nu_i = (1.0 / fr.speed[at]) * fr.n[at];
  double diff = 0.0, bend = 0.0;
  for (std::size_t k = 1; k < m; ++k) {
    const std::size_t j = (at + k) % m;
    const Vec2 d = fr.x[j] - fr.x[at];
    const double kern = fr.speed[j] * std::pow(dot(d, d) / detail::chord_factor(k, m), -1.0 - 0.5 * sv);
    const Vec2 dn = (1.0 / fr.speed[j]) * fr.n[j] - nu_i;
    diff += w[k] * (h[j] - h[at]) * kern;
    bend += w[k] * 0.5 * dot(dn, dn) * kern;
  }
  return 2.0 * sv * (1.0 - sv) * (diff + h[at] * bend);
}

F5Sides f5_residual(const FieldSample& before, const FieldSample& now, const FieldSample& after, std::size_t at,
                    FractionalOrder s) {
  const double h1 = now.time - before.time, h2 = after.time - now.time;
  if (!(h1 > 0.0) || !(h2 > 0.0)) throw std::invalid_argument("f5_residual needs increasing sample times");
  // Three-point derivative at `now`, second order on uneven spacing.
  const double wb = -h2 / (h1 * (h1 + h2)), wn = (h2 - h1) / (h1 * h2), wa = h1 / (h2 * (h1 + h2));
  auto ddt = [&](double b, double n, double a) { return wb * b + wn * n + wa * a; };
  const std::size_t m = now.shape.size();
  if (before.shape.size() != m || after.shape.size() != m) throw std::invalid_argument("sample sizes differ");
  const double sv = s.value();
  const detail::RadialFrame fr(now.shape);
  // Nodes travel along fixed rays; remove the tangential part of that motion.
  const double fdot = ddt(before.shape.samples()[at], now.shape.samples()[at], after.shape.samples()[at]);
  const double t = now.shape.theta(at);
  const Vec2 vel = fdot * Vec2{std::cos(t), std::sin(t)};
  const Vec2 tau = (1.0 / fr.speed[at]) * fr.dx[at];
  const double grad = radial_gradient(fr, *periodic_singular_weights(m, 2.0 + sv), at, sv);
  F5Sides out;
  out.lhs = ddt(before.field.values[at], now.field.values[at], after.field.values[at]) - dot(vel, tau) * grad;
  out.rhs = f5_rhs(now.shape, now.field, at, s);
  return out;
}

}  // namespace fracflow
