#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/tools/roots.hpp>

#include "detail.hpp"
#include "fracflow/curvature.hpp"
#include "fracflow/errors.hpp"

namespace fracflow {
namespace detail {
double divergence_gradient(const Shape& shape, std::size_t at, double s);
}  // namespace detail

namespace {

constexpr double kPi = std::numbers::pi;

struct Kernel {
  double p;       // |y - x|^{-p}
  int m;          // 0: plain kernel, 1: extra factor (y - x).tau
  double factor;  // constant in front
};

// (cos x - 1, sin x - x) without cancellation
std::pair<double, double> rotation_remainder(double x) {
  const double h = std::sin(0.5 * x);
  double smx;
  if (std::abs(x) < 0.5) {
    const double x2 = x * x;
    double term = -x * x2 / 6.0;
    smx = term;
    for (int k = 1; k < 10; ++k) {
      term *= -x2 / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
      smx += term;
    }
  } else {
    smx = std::sin(x) - x;
  }
  return {-2.0 * h * h, smx};
}

// The curve seen from one node: X(t + delta) - X(t) = delta X'(t) + P(delta).
class LocalCurve {
 public:
  virtual ~LocalCurve() = default;
  virtual void remainder(double delta, Vec2& p, Vec2& dx) const = 0;

  Vec2 x, tau, nu;
  double speed = 1.0;     // |X'(t)|
  double step = 0.0;      // walking increment of the parameter
  double reach = 0.0;     // no exit beyond this parameter offset means failure
  double max_speed = 1.0;

  // tangent and normal coordinates of X(t + delta) - X(t)
  std::pair<double, double> az(double delta) const {
    Vec2 p, dx;
    remainder(delta, p, dx);
    return {delta * speed + dot(p, tau), dot(p, nu)};
  }
};

class RadialLocal final : public LocalCurve {
 public:
  RadialLocal(const RadialCurve& c, std::size_t i) : m_(c.size()), t_(c.theta(i)), f_(c.samples()[i]) {
    const auto spec = c.spectrum();
    b_.resize(spec.size());
    df_ = 0.0;
    for (std::size_t k = 0; k < spec.size(); ++k) {
      const double w = (k == 0 || 2 * k == m_) ? 1.0 : 2.0;
      b_[k] = w * spec[k] * std::polar(1.0, static_cast<double>(k) * t_);
      df_ -= static_cast<double>(k) * b_[k].imag();
    }
    if (m_ % 2 == 0) df_ += static_cast<double>(m_ / 2) * b_[m_ / 2].imag();  // Nyquist mode carries no slope
    const Vec2 w{std::cos(t_), std::sin(t_)};
    const Vec2 dx = df_ * w + f_ * perp(w);
    x = c.center() + f_ * w;
    speed = norm(dx);
    tau = (1.0 / speed) * dx;
    nu = {tau.y, -tau.x};
    step = 0.25 * c.spacing();
    reach = kPi;
    const auto d1 = spectral_derivative(c, 1);
    max_speed = 0.0;
    for (std::size_t j = 0; j < m_; ++j) max_speed = std::max(max_speed, std::hypot(c.samples()[j], d1[j]));
  }

  void remainder(double delta, Vec2& p, Vec2& dx) const override {
    double rem = 0.0, fd = f_, dfd = 0.0;
    const std::size_t top = b_.size() - 1;
    for (std::size_t k = 1; k <= top; ++k) {
      const double kk = static_cast<double>(k);
      const auto [cm1, smx] = rotation_remainder(kk * delta);
      const std::complex<double> e(cm1, smx);
      const double sn = smx + kk * delta;
      rem += (b_[k] * e).real();
      const std::complex<double> full(cm1 + 1.0, sn);
      if (2 * k == m_) {
        // Nyquist term: real cosine mode only
        dfd -= kk * b_[k].real() * sn;
      } else {
        dfd += (std::complex<double>(0.0, kk) * b_[k] * full).real();
      }
    }
    const auto [cd, sd] = rotation_remainder(delta);
    const Vec2 w{std::cos(t_), std::sin(t_)};
    const Vec2 wp = perp(w);
    const Vec2 wd{std::cos(t_ + delta), std::sin(t_ + delta)};
    fd = f_ + delta * df_ + rem;
    p = rem * wd + f_ * (cd * w + sd * wp) + delta * df_ * (cd * w + (sd + delta) * wp);
    dx = dfd * wd + fd * perp(wd);
  }

 private:
  std::size_t m_;
  double t_, f_, df_;
  std::vector<std::complex<double>> b_;
};

class GraphLocal final : public LocalCurve {
 public:
  GraphLocal(const GraphCurve& g, std::size_t j) : g_(g), j_(j), xj_(g.x(j)) {
    u1_ = g.slope(xj_);
    u2_ = g.second_derivative(xj_);
    const double h = g.spacing();
    u3r_ = j + 1 < g.size() ? (g.second_derivative(g.x(j + 1)) - u2_) / h : 0.0;
    u3l_ = j > 0 ? (u2_ - g.second_derivative(g.x(j - 1))) / h : 0.0;
    x = {xj_, g.heights()[j]};
    speed = std::sqrt(1.0 + u1_ * u1_);
    tau = {1.0 / speed, u1_ / speed};
    nu = {-u1_ / speed, 1.0 / speed};
    step = 0.25 * h;
    reach = 1e6;
    max_speed = 1.0;
    for (std::size_t k = 0; k < g.size(); ++k) max_speed = std::max(max_speed, std::hypot(1.0, g.slope(g.x(k))));
  }

  void remainder(double d, Vec2& p, Vec2& dx) const override {
    const double h = g_.spacing();
    double r;
    const bool right = d >= 0.0;
    const bool edge = (right && j_ + 1 == g_.size()) || (!right && j_ == 0);
    if (std::abs(d) <= h && !edge) {
      r = d * d * (0.5 * u2_ + d * (right ? u3r_ : u3l_) / 6.0);
    } else if (std::abs(d) <= h) {
      r = 0.0;
    } else {
      r = g_.height(xj_ + d) - x.y - u1_ * d;
    }
    p = {0.0, r};
    dx = {1.0, g_.slope(xj_ + d)};
  }

 private:
  const GraphCurve& g_;
  std::size_t j_;
  double xj_, u1_, u2_, u3r_, u3l_;
};

std::unique_ptr<LocalCurve> make_local(const Shape& shape, std::size_t at) {
  if (const auto* r = std::get_if<RadialCurve>(&shape)) return std::make_unique<RadialLocal>(*r, at);
  return std::make_unique<GraphLocal>(std::get<GraphCurve>(shape), at);
}

// Parameter offset at which the curve leaves the cylinder through the side a = dir * R.
double walk(const LocalCurve& lc, double radius, int dir) {
  const double step = std::min(lc.step, radius / (4.0 * lc.speed));
  double prev_d = 0.0, prev_a = 0.0;
  for (int k = 1;; ++k) {
    const double d = dir * step * k;
    if (std::abs(d) > lc.reach) throw CylinderTooLarge("curve does not leave the cylinder", radius);
    auto [a, z] = lc.az(d);
    a *= dir;
    if (std::abs(z) >= radius) throw CylinderTooLarge("curve leaves the cylinder through its top or bottom", radius);
    if (a <= prev_a) throw CylinderTooLarge("curve is not a graph over its tangent line", radius);
    if (a >= radius) {
      auto f = [&](double t) { return dir * lc.az(t).first - radius; };
      std::uintmax_t iters = 200;
      const double lo = std::min(prev_d, d), hi = std::max(prev_d, d);
      const auto r = boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(52), iters);
      const double root = 0.5 * (r.first + r.second);
      if (std::abs(lc.az(root).second) >= radius)
        throw CylinderTooLarge("curve leaves the cylinder through a corner", radius);
      return root;
    }
    prev_a = a;
    prev_d = d;
  }
}

// Rejects any other piece of the curve entering the cylinder.
void scan_rest(const LocalCurve& lc, double radius, double dneg, double dpos, bool periodic) {
  const double step = std::min(lc.step, radius / (4.0 * lc.max_speed));
  double lo, hi;
  if (periodic) {
    lo = dpos;
    hi = dneg + 2.0 * kPi;
  } else {
    lo = -2.0 * radius;
    hi = 2.0 * radius;
  }
  for (double d = lo; d <= hi; d += step) {
    if (!periodic && d > dneg && d < dpos) {
      d = dpos;
      continue;
    }
    const auto [a, z] = lc.az(d);
    if (std::abs(a) < radius && std::abs(z) < radius)
      throw CylinderTooLarge("curve re-enters the cylinder", radius);
  }
}

// int_h^0 (1 + w^2)^{-p/2} dw
double cap_integral(double h, double p) {
  if (h == 0.0) return 0.0;
  const double v = 0.5 * boost::math::beta(0.5, 0.5 * (p - 1.0), h * h / (1.0 + h * h));
  return h < 0.0 ? v : -v;
}

struct Accumulator {
  double value = 0.0;
  double error = 0.0;
};

// Gauss-Kronrod bisection that also stops on an absolute floor, so integrands
// that vanish up to rounding do not exhaust the depth budget.
template <class F>
double adaptive(F& f, double a, double b, int depth, double floor, double rel, double& err_out) {
  double err = 0.0, l1 = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0.0, &err, &l1);
  if (err <= std::max(floor, rel * l1) || depth <= 0) {
    err_out += err;
    return v;
  }
  const double mid = 0.5 * (a + b);
  return adaptive(f, a, mid, depth - 1, 0.5 * floor, rel, err_out) +
         adaptive(f, mid, b, depth - 1, 0.5 * floor, rel, err_out);
}

template <class F>
void integrate_panels(F f, double a, double b, int panels, const QuadratureSpec& q, Accumulator& acc) {
  for (int k = 0; k < panels; ++k) {
    const double lo = a + (b - a) * k / panels;
    const double hi = a + (b - a) * (k + 1) / panels;
    acc.value += adaptive(f, lo, hi, q.max_depth, 0.1 * q.abs_tol / panels, q.rel_tol, acc.error);
  }
}

double near_field(const LocalCurve& lc, double radius, double dneg, double dpos, double s, const QuadratureSpec& q,
                  double orient, const Kernel& ker, Accumulator& acc) {
  const double qexp = q.graded_exponent > 0.0 ? q.graded_exponent : 2.0 / (1.0 - s);
  auto height = [&](double rho, int dir, double bound) {
    auto f = [&](double t) {
      Vec2 p, dx;
      lc.remainder(t, p, dx);
      return std::make_pair(dir * (t * lc.speed + dot(p, lc.tau)) - rho, dir * dot(dx, lc.tau));
    };
    const double lo = std::min(0.0, bound), hi = std::max(0.0, bound);
    const double guess = std::clamp(dir * rho / lc.speed, lo, hi);
    const double t = boost::math::tools::newton_raphson_iterate(f, guess, lo, hi, 50);
    return orient * lc.az(t).second / rho;
  };
  auto integrand = [&](double t) {
    if (t <= 0.0) return 0.0;
    const double rho = radius * std::pow(t, qexp);
    if (!(rho > 0.0)) return 0.0;
    const double jac = qexp * radius * std::pow(t, qexp - 1.0);
    const double hp = height(rho, +1, dpos);
    const double hm = height(rho, -1, dneg);
    if (ker.m == 0) return jac * std::pow(rho, 1.0 - ker.p) * (cap_integral(hp, ker.p) + cap_integral(hm, ker.p));
    return jac * std::pow(rho, 2.0 - ker.p) * (cap_integral(hp, ker.p) - cap_integral(hm, ker.p));
  };
  Accumulator local;
  if (ker.m == 0) {
    integrate_panels(integrand, 0.0, 1.0, q.near_panels, q, local);
  } else {
    // The odd kernel leaves rounding noise of relative size eps/rho after the
    // +/- cancellation; below rho_c the integrand is c rho^{-s} + O(rho^{1-s}).
    const double rho_c = 1e-5 * radius;
    const double t_c = std::pow(rho_c / radius, 1.0 / qexp);
    integrate_panels(integrand, t_c, 1.0, q.near_panels, q, local);
    const double jac = qexp * radius * std::pow(t_c, qexp - 1.0);
    local.value += integrand(t_c) / jac * rho_c / (1.0 - s);
  }
  acc.error += 2.0 * local.error;
  return 2.0 * local.value;
}

// t-interval where the column/ray stays inside the cylinder: |alpha + beta t| < R for both axes.
std::pair<double, double> slab(double ea, double wa, double ez, double wz, double radius, double lo, double hi) {
  auto clip = [&](double e, double w) {
    if (std::abs(w) < 1e-300) {
      if (std::abs(e) >= radius) hi = lo - 1.0;
      return;
    }
    double t1 = (-radius - e) / w, t2 = (radius - e) / w;
    if (t1 > t2) std::swap(t1, t2);
    lo = std::max(lo, t1);
    hi = std::min(hi, t2);
  };
  clip(ea, wa);
  clip(ez, wz);
  return {lo, hi};
}

std::vector<std::pair<double, double>> subtract(double a, double b, std::pair<double, double> cut) {
  std::vector<std::pair<double, double>> out;
  if (cut.first >= cut.second || cut.second <= a || cut.first >= b) {
    if (b > a) out.emplace_back(a, b);
    return out;
  }
  if (cut.first > a) out.emplace_back(a, cut.first);
  if (cut.second < b) out.emplace_back(cut.second, b);
  return out;
}

void integrate_breakpoints(const std::function<double(double)>& f, std::vector<double> bps, const QuadratureSpec& q,
                           Accumulator& acc) {
  std::sort(bps.begin(), bps.end());
  for (std::size_t k = 0; k + 1 < bps.size(); ++k) {
    if (bps[k + 1] - bps[k] <= 1e-14 * (1.0 + std::abs(bps[k]))) continue;
    integrate_panels(f, bps[k], bps[k + 1], q.far_panels, q, acc);
  }
}

// int_{E \ C} kernel, polar coordinates about the curve centre
double far_field_radial(const RadialCurve& rc, const LocalCurve& lc, double radius, double dneg, double dpos,
                        std::size_t at, const Kernel& ker, const QuadratureSpec& q, Accumulator& acc) {
  const Vec2 c = rc.center();
  const Vec2 e = c - lc.x;
  const double ti = rc.theta(at);
  auto wrap = [&](double th) {
    double d = std::remainder(th - ti, 2.0 * kPi);
    return ti + d;
  };
  std::vector<double> bps{ti - kPi, ti + kPi, ti + dneg, ti + dpos};
  for (int sa : {-1, 1})
    for (int sz : {-1, 1}) {
      const Vec2 corner = lc.x + (sa * radius) * lc.tau + (sz * radius) * lc.nu;
      bps.push_back(wrap(std::atan2(corner.y - c.y, corner.x - c.x)));
    }
  const double ea = dot(e, lc.tau), ez = dot(e, lc.nu);
  auto ray = [&](double th) {
    const Vec2 w{std::cos(th), std::sin(th)};
    const double f = rc.evaluate(th).f;
    const double b = dot(e, w);
    const double a = std::abs(cross(e, w));
    const auto cut = slab(ea, dot(w, lc.tau), ez, dot(w, lc.nu), radius, 0.0, std::numeric_limits<double>::infinity());
    double c0 = -b, c1 = 1.0, c2 = 0.0;
    if (ker.m == 1) {
      const double beta = dot(w, lc.tau);
      const double alpha = ea - b * beta;
      c0 = -b * alpha;
      c1 = alpha - b * beta;
      c2 = beta;
    }
    double v = 0.0;
    for (const auto& [r1, r2] : subtract(0.0, f, cut)) v += detail::kernel_quadratic(a, r1 + b, r2 + b, ker.p, c0, c1, c2);
    return v;
  };
  Accumulator local;
  integrate_breakpoints(ray, bps, q, local);
  acc.error += 2.0 * local.error;
  double out = -2.0 * local.value;
  if (ker.m == 0) {
    const double p = ker.p;
    const double wedge = 0.5 * boost::math::beta(0.5, 0.5 * (p - 1.0), 0.5);
    out += 8.0 * std::pow(radius, 2.0 - p) / (p - 2.0) * wedge;
  }
  return out;
}

// int (chi_E - chi_T) kernel outside the cylinder, T the tangent half-plane; columns in x.
double far_field_graph(const GraphCurve& g, const LocalCurve& lc, double radius, double dneg, double dpos,
                       const Kernel& ker, const QuadratureSpec& q, Accumulator& acc) {
  const double xi = lc.x.x, ui = lc.x.y;
  const double slope = lc.tau.y / lc.tau.x;
  auto column = [&](double xx) {
    const double dx = xx - xi;
    const double tu = g.height(xx) - ui;
    const double tl = slope * dx;
    if (tu == tl) return 0.0;
    const double lo = std::min(tu, tl), hi = std::max(tu, tl);
    const double sgn = tu < tl ? 1.0 : -1.0;
    const auto cut = slab(lc.tau.x * dx, lc.tau.y, lc.nu.x * dx, lc.nu.y, radius, -std::numeric_limits<double>::infinity(),
                          std::numeric_limits<double>::infinity());
    const double c0 = ker.m == 0 ? 1.0 : lc.tau.x * dx;
    const double c1 = ker.m == 0 ? 0.0 : lc.tau.y;
    double v = 0.0;
    for (const auto& [t1, t2] : subtract(lo, hi, cut)) v += detail::kernel_quadratic(std::abs(dx), t1, t2, ker.p, c0, c1, 0.0);
    return 2.0 * sgn * v;
  };
  const double L = g.half_width();
  std::vector<double> bps{xi, xi + dneg, xi + dpos, xi - radius * lc.tau.x, xi + radius * lc.tau.x, -L, L};
  for (int sa : {-1, 1})
    for (int sz : {-1, 1}) bps.push_back(xi + sa * radius * lc.tau.x + sz * radius * lc.nu.x);
  Accumulator local;
  integrate_breakpoints(column, bps, q, local);
  const double left = *std::min_element(bps.begin(), bps.end());
  const double right = *std::max_element(bps.begin(), bps.end());
  const double scale = std::max(1.0, L);
  boost::math::quadrature::tanh_sinh<double> ts(10);
  for (int dir : {-1, 1}) {
    const double start = dir > 0 ? right : left;
    auto tail = [&](double w) {
      if (w < 1e-100) return 0.0;
      return scale * column(start + dir * scale * (1.0 - w) / w) / (w * w);
    };
    double err = 0.0, l1 = 0.0;
    local.value += ts.integrate(tail, 0.0, 1.0, q.rel_tol, &err, &l1);
    local.error += l1 < q.abs_tol ? 0.0 : err;
  }
  acc.error += local.error;
  return local.value;
}

double default_radius(const Shape& shape) {
  const auto k = local_curvature(shape);
  double kmax = 0.0;
  for (double v : k) kmax = std::max(kmax, std::abs(v));
  double diam;
  if (const auto* r = std::get_if<RadialCurve>(&shape)) {
    diam = 2.0 * r->max_radius();
  } else {
    diam = 2.0 * std::get<GraphCurve>(shape).half_width();
  }
  double radius = 0.1 * diam;
  if (kmax > 0.0) radius = std::min(radius, 0.2 / kmax);
  return radius;
}

double oracle_integral(const Shape& shape, std::size_t at, double s, const QuadratureSpec& q, Side side,
                       const Kernel& ker) {
  q.validate();
  if (at >= node_count(shape)) throw std::out_of_range("node index out of range");
  const auto lc = make_local(shape, at);
  const bool automatic = q.cylinder_radius == 0.0;
  double radius = automatic ? default_radius(shape) : q.cylinder_radius;
  const double orient = side == Side::set ? 1.0 : -1.0;
  const bool periodic = std::holds_alternative<RadialCurve>(shape);
  for (int attempt = 0;; ++attempt) {
    try {
      const double dpos = walk(*lc, radius, +1);
      const double dneg = walk(*lc, radius, -1);
      scan_rest(*lc, radius, dneg, dpos, periodic);
      Accumulator acc;
      const double near = near_field(*lc, radius, dneg, dpos, s, q, orient, ker, acc);
      const double far = periodic
                             ? far_field_radial(std::get<RadialCurve>(shape), *lc, radius, dneg, dpos, at, ker, q, acc)
                             : far_field_graph(std::get<GraphCurve>(shape), *lc, radius, dneg, dpos, ker, q, acc);
      const double value = ker.factor * (near + orient * far);
      const double err = ker.factor * acc.error;
      if (!std::isfinite(value) || err > 1e3 * std::max(q.abs_tol, q.rel_tol * std::abs(value)))
        throw NonConvergent("area quadrature missed its tolerance (estimate " + std::to_string(err) + ")", at);
      return value;
    } catch (const CylinderTooLarge&) {
      if (!automatic || attempt >= 6) throw;
      radius *= 0.5;
    }
  }
}

}  // namespace

double hs_oracle(const Shape& shape, std::size_t at, FractionalOrder s, const QuadratureSpec& q, Side side) {
  const double sv = s.value();
  return oracle_integral(shape, at, sv, q, side, {2.0 + sv, 0, s.normalization()});
}

TangentialGradient tangential_gradient_hs(const Shape& shape, std::size_t at, FractionalOrder s,
                                          const QuadratureSpec& q) {
  const double sv = s.value();
  TangentialGradient out;
  out.divergence_form = detail::divergence_gradient(shape, at, sv);
  out.direct_form = oracle_integral(shape, at, sv, q, Side::set, {4.0 + sv, 1, (2.0 + sv) * s.normalization()});
  out.vector = out.divergence_form * make_local(shape, at)->tau;
  return out;
}

double varpi(FractionalOrder s) {
  static std::mutex mu;
  static std::map<double, double> cache;
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find(s.value()); it != cache.end()) return it->second;
  }
  QuadratureSpec q;
  q.rel_tol = 1e-12;
  q.abs_tol = 1e-14;
  q.max_depth = 16;
  const double v = hs_oracle(RadialCurve::circle(64, 1.0), 0, s, q);
  std::lock_guard lock(mu);
  return cache.emplace(s.value(), v).first->second;
}

}  // namespace fracflow
