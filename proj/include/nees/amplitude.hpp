#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "nees/error.hpp"

namespace nees {
namespace detail {

// Adaptive Gauss-Kronrod (7-15 rule applied per panel, bisection on failure).
template <class F>
double integrate_panel(F& f, double a, double b, double tol, int depth, double& err) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  double e = 0.0, l1 = 0.0;
  const double r = GK::integrate(f, a, b, 0, 0.0, &e, &l1);
  e *= 0.5 * std::abs(b - a);
  // Below ~eps * l1 the estimate is rounding noise and bisection cannot help.
  if (e <= tol || e <= 64.0 * std::numeric_limits<double>::epsilon() * l1 || depth == 0) {
    err += e;
    return r;
  }
  const double mid = 0.5 * (a + b);
  return integrate_panel(f, a, mid, 0.5 * tol, depth - 1, err) +
         integrate_panel(f, mid, b, 0.5 * tol, depth - 1, err);
}

template <class F>
double integrate(F&& f, double a, double b, double rtol = 1e-15) {
  if (a == b) return 0.0;
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  double l1 = 0.0, e0 = 0.0;
  auto g = [&f](double t) { return f(t); };
  GK::integrate([&g](double t) { return std::abs(g(t)); }, a, b, 0, 0.0, &e0, &l1);
  const double coarse = std::abs(GK::integrate(g, a, b, 0, 0.0, &e0));
  const double tol =
      std::max(rtol * coarse, 8.0 * std::numeric_limits<double>::epsilon() * l1) + 1e-300;
  double err = 0.0;
  const double r = integrate_panel(g, a, b, tol, 30, err);
  if (!std::isfinite(r) || err > std::max(1e-9 * std::abs(r), 1e-13)) {
    std::ostringstream msg;
    msg << "quadrature did not converge on [" << a << ", " << b << "], error estimate " << err;
    throw numerical_error(msg.str(), b);
  }
  return r;
}

}  // namespace detail

// G(phi) = int_0^phi prod_k (1 - beta_k sin^2 t)^(-1/2) dt and its inverse.
// With every beta_k < 1 the integrand has period pi and G(phi + pi) =
// G(phi) + 2V with V = G(pi/2). With some beta_k = 1, G is defined on
// (-pi/2, pi/2) only and its inverse is bounded by pi/2.
class AmplitudeKernel {
 public:
  explicit AmplitudeKernel(std::vector<double> betas) : betas_(std::move(betas)) {
    periodic_ = true;
    for (double b : betas_) {
      detail::require(std::isfinite(b) && b <= 1.0, "amplitude parameters must be <= 1");
      if (b == 1.0) periodic_ = false;
    }
    if (periodic_)
      quarter_ = detail::integrate([this](double t) { return density(t); }, 0.0,
                                   std::numbers::pi / 2);
  }

  const std::vector<double>& betas() const noexcept { return betas_; }
  bool periodic() const noexcept { return periodic_; }

  double quarter_period() const {
    if (!periodic_) throw domain_error("parameter equal to 1: the period is infinite");
    return quarter_;
  }

  double density(double t) const {
    const double s = std::sin(t);
    double p = 1.0;
    for (double b : betas_) p *= 1.0 - b * s * s;
    return 1.0 / std::sqrt(p);
  }

  double integral(double phi, double from = 0.0) const {
    if (from != 0.0) return integral(phi) - integral(from);
    if (!periodic_) {
      detail::require(std::abs(phi) < std::numbers::pi / 2,
                      "amplitude must stay inside (-pi/2, pi/2) when a parameter equals 1");
      return detail::integrate([this](double t) { return density(t); }, 0.0, phi);
    }
    const double q = std::nearbyint(phi / std::numbers::pi);
    const double r = phi - q * std::numbers::pi;
    return 2.0 * q * quarter_ +
           detail::integrate([this](double t) { return density(t); }, 0.0, r);
  }

  // phi with integral(phi) = v, continuous and increasing in v.
  double inverse(double v) const {
    detail::require(std::isfinite(v), "amplitude inversion needs a finite argument");
    if (!periodic_) return solve(v);
    const double q = std::nearbyint(v / (2.0 * quarter_));
    const double r = v - 2.0 * quarter_ * q;
    return q * std::numbers::pi + solve(r);
  }

 private:
  // Newton on [-pi/2, pi/2] with incremental quadrature, bisection when a
  // step leaves the bracket.
  double solve(double r) const {
    double lo = -std::numbers::pi / 2, hi = std::numbers::pi / 2;
    if (periodic_) {
      if (r >= quarter_) return hi;
      if (r <= -quarter_) return lo;
    }
    double theta = periodic_ ? r * (std::numbers::pi / 2) / quarter_ : std::atan(r);
    double g = detail::integrate([this](double t) { return density(t); }, 0.0, theta);
    for (int it = 0; it < 200; ++it) {
      const double f = g - r;
      if (f > 0.0)
        hi = std::min(hi, theta);
      else if (f < 0.0)
        lo = std::max(lo, theta);
      else
        return theta;
      double next = theta - f / density(theta);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - theta) <= 4.0 * std::numeric_limits<double>::epsilon() *
                                        std::max(1.0, std::abs(theta)))
        return next;
      g += detail::integrate([this](double t) { return density(t); }, theta, next);
      theta = next;
    }
    throw numerical_error("amplitude inversion did not converge", r);
  }

  std::vector<double> betas_;
  bool periodic_ = true;
  double quarter_ = std::numeric_limits<double>::infinity();
};

}  // namespace nees
