#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "nees/amplitude.hpp"
#include "nees/ees.hpp"
#include "nees/mahler4.hpp"
#include "nees/ode.hpp"

namespace nees {

// Parameters of the 5-Mahler system with coefficients (1, -1, -m, -n, -p).
struct MahlerParams5 {
  double p = 0.0;
  double n = 0.0;
  double m = 0.0;

  // Outside the unit cube the functions are still defined but less studied.
  bool outside_unit_cube() const {
    return p < 0.0 || p > 1.0 || n < 0.0 || n > 1.0 || m < 0.0 || m > 1.0;
  }
};

struct Mahler5Values {
  double Sng = 0.0;
  double Cng = 1.0;
  double Dng = 1.0;
  double Fng = 1.0;
  double Hng = 1.0;
};

inline void validate(const MahlerParams5& q) {
  detail::require(std::isfinite(q.p) && std::isfinite(q.n) && std::isfinite(q.m),
                  "p, n, m must be finite");
  detail::require(q.p <= q.n && q.n <= q.m && q.m <= 1.0, "5-Mahler functions need p <= n <= m <= 1");
}

inline EESParams mahler5_system(const MahlerParams5& q) {
  return EESParams({1.0, -1.0, -q.m, -q.n, -q.p}, {0.0, 1.0, 1.0, 1.0, 1.0});
}

// Dense solution of the 5-Mahler system on [0, W]. Sng is odd and the other
// four are even, so negative arguments are served by symmetry. Steps are not
// clamped at W, so values do not depend on the span requested.
class Mahler5Evaluator {
 public:
  Mahler5Evaluator(const MahlerParams5& q, double span, IntegratorConfig cfg = default_config())
      : q_(q) {
    validate(q);
    detail::require(std::isfinite(span), "span must be finite");
    cfg.overshoot = true;
    sol_ = integrate_ees(mahler5_system(q), 0.0, std::max(std::abs(span), 1e-3), cfg);
  }

  static IntegratorConfig default_config() {
    IntegratorConfig cfg;
    cfg.rtol = 1e-13;
    cfg.atol = 1e-15;
    return cfg;
  }

  const MahlerParams5& params() const noexcept { return q_; }
  double span() const { return sol_.back(); }

  Mahler5Values operator()(double w) const {
    std::array<double, 5> y{};
    sol_.evaluate(std::abs(w), y);
    return {w < 0.0 ? -y[0] : y[0], y[1], y[2], y[3], y[4]};
  }

 private:
  MahlerParams5 q_;
  DenseSolution sol_;
};

inline Mahler5Values mahler5_eval(double w, const MahlerParams5& q) {
  return Mahler5Evaluator(q, w)(w);
}

// W(v*) = int_0^v* prod over (m, n, p) of (1 - beta sin^2 t)^(-1/2) dt.
inline AmplitudeKernel mahler5_kernel(const MahlerParams5& q) {
  validate(q);
  return AmplitudeKernel({q.m, q.n, q.p});
}

inline double Amg(double w, const MahlerParams5& q) { return mahler5_kernel(q).inverse(w); }

inline Mahler5Values mahler5_from_amplitude(double w, const MahlerParams5& q) {
  const double phi = Amg(w, q);
  const double s = std::sin(phi);
  const double s2 = s * s;
  return {s, std::cos(phi), std::sqrt(1.0 - q.m * s2), std::sqrt(1.0 - q.n * s2),
          std::sqrt(1.0 - q.p * s2)};
}

// Reduction of a 5-EES by w5: u_i = w_i / w5 solves a 4-EES in dv* = w5 dv,
// and v(v*) = int u5 dv* with u5^2 = 1 / w5^2 = (alpha1 - alpha5 u1^2) / C15.
struct Omega5Regularization {
  EESParams reduced;
  double alpha1 = 0.0;
  double alpha5 = 0.0;
  double c15 = 0.0;
  double n2 = 0.0;
  double sign = 1.0;  // sign of w5, constant along the orbit

  // dv / dv* as a function of u1.
  double u5(double u1) const {
    const double r = (alpha1 - alpha5 * u1 * u1) / c15;
    if (!(r > 0.0)) throw numerical_error("regularizing factor lost positivity");
    return sign * std::sqrt(r);
  }
};

inline Omega5Regularization regularize_omega5(const EESParams& params) {
  detail::require(params.dimension() == 5, "regularize_omega5 needs a five-dimensional system");
  const double w5 = params.ic()[4];
  detail::require(w5 != 0.0, "w5(0) must be nonzero");
  Omega5Regularization r;
  r.reduced = glashier_reduce(params, 4).system;
  r.alpha1 = params.alphas()[0];
  r.alpha5 = params.alphas()[4];
  r.c15 = r.alpha1 * w5 * w5 - r.alpha5 * params.ic()[0] * params.ic()[0];
  detail::require(r.c15 != 0.0, "C15 vanishes: the regularization degenerates");
  detail::require(r.alpha1 != 0.0, "alpha1 must be nonzero");
  detail::require(r.alpha1 / r.c15 > 0.0,
                  "alpha1 and C15 have incompatible signs for the square root");
  r.n2 = r.alpha5 / r.alpha1;
  r.sign = w5 > 0.0 ? 1.0 : -1.0;
  return r;
}

// Reduced trajectory in v* together with v(v*). State: u1..u4, v.
class Omega5Reconstruction {
 public:
  struct Point {
    double v = 0.0;
    std::array<double, 5> omega{};
  };

  Omega5Reconstruction(const Omega5Regularization& reg, double vstar_end,
                       const IntegratorConfig& cfg = Mahler5Evaluator::default_config())
      : reg_(reg) {
    const std::vector<double> alphas = reg_.reduced.alphas();
    auto rhs = [this, alphas](double, std::span<const double> y, std::span<double> dy) {
      ees_rhs(alphas, y.first(4), dy.first(4));
      dy[4] = reg_.u5(y[0]);
    };
    std::vector<double> y0 = reg_.reduced.ic();
    y0.push_back(0.0);
    sol_ = integrate_ode(rhs, 0.0, y0, vstar_end, cfg);
  }

  const DenseSolution& dense() const noexcept { return sol_; }

  Point at(double vstar) const {
    std::array<double, 5> y{};
    sol_.evaluate(vstar, y);
    return reconstruct(y);
  }

  Point node(std::size_t k) const {
    std::array<double, 5> y{};
    std::copy(sol_.state(k).begin(), sol_.state(k).end(), y.begin());
    return reconstruct(y);
  }

 private:
  Point reconstruct(const std::array<double, 5>& y) const {
    const double w5 = 1.0 / reg_.u5(y[0]);
    return {y[4], {y[0] * w5, y[1] * w5, y[2] * w5, y[3] * w5, w5}};
  }

  Omega5Regularization reg_;
  DenseSolution sol_;
};

// Incomplete Legendre integrals by quadrature.
inline double legendre_pi(double phi, double n, double m) {
  detail::require(std::isfinite(phi) && std::isfinite(n) && std::isfinite(m),
                  "arguments must be finite");
  detail::require(m < 1.0, "Legendre integrals need m < 1");
  const double reach = std::min(std::abs(phi), std::numbers::pi / 2);
  const double smax = std::sin(reach);
  detail::require(n * smax * smax < 1.0, "characteristic singularity 1 - n sin^2 = 0 is crossed");
  auto f = [n, m](double t) {
    const double s2 = std::sin(t) * std::sin(t);
    return 1.0 / ((1.0 - n * s2) * std::sqrt(1.0 - m * s2));
  };
  if (std::abs(phi) <= std::numbers::pi / 2) return detail::integrate(f, 0.0, phi);
  const double q = std::nearbyint(phi / std::numbers::pi);
  const double r = phi - q * std::numbers::pi;
  return 2.0 * q * detail::integrate(f, 0.0, std::numbers::pi / 2) + detail::integrate(f, 0.0, r);
}

inline double legendre_F(double phi, double m) { return legendre_pi(phi, 0.0, m); }

inline double legendre_E(double phi, double m) {
  detail::require(std::isfinite(phi) && std::isfinite(m) && m <= 1.0,
                  "E needs finite arguments and m <= 1");
  auto f = [m](double t) { return std::sqrt(1.0 - m * std::sin(t) * std::sin(t)); };
  const double q = std::nearbyint(phi / std::numbers::pi);
  const double r = phi - q * std::numbers::pi;
  return 2.0 * q * detail::integrate(f, 0.0, std::numbers::pi / 2) + detail::integrate(f, 0.0, r);
}

struct PnResult {
  Mahler5Values values;
  double vtilde = 0.0;            // argument of the 4-Mahler functions
  bool fukushima_domain = false;  // 0 < m < 1 and -sqrt(m) < n < m / (1 + sqrt(1 - m))
};

inline bool fukushima_domain(double n, double m) {
  return m > 0.0 && m < 1.0 && n > -std::sqrt(m) && n < m / (1.0 + std::sqrt(1.0 - m));
}

// p = n: with dv~ = Fng dw the system becomes the 4-Mahler system in v~, and
// w = int_0^v~ dt / fng(t). The last relation is inverted by Newton.
inline PnResult pn_case(double w, double n, double m) {
  const MahlerParams4 p4{m, n};
  validate(p4);
  validate(MahlerParams5{n, n, m});
  detail::require(std::isfinite(w), "argument must be finite");
  auto inv_fng = [&p4](double t) { return 1.0 / mahler4_direct(t, p4).fng; };
  double vt = w;
  double wt = detail::integrate(inv_fng, 0.0, vt);
  for (int it = 0; it < 100; ++it) {
    const double step = (wt - w) * mahler4_direct(vt, p4).fng;
    const double next = vt - step;
    if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(vt))) {
      vt = next;
      break;
    }
    wt += detail::integrate(inv_fng, vt, next);
    vt = next;
    if (it == 99) throw numerical_error("inversion of the p = n quadrature did not converge", w);
  }
  const Mahler4Values r = mahler4_direct(vt, p4);
  return {{r.sng, r.cng, r.dng, r.fng, r.fng}, vt, fukushima_domain(n, m)};
}

}  // namespace nees
