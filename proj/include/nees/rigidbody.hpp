#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "nees/amplitude.hpp"
#include "nees/elliptic.hpp"
#include "nees/mahler4.hpp"
#include "nees/mahler5.hpp"
#include "nees/ode.hpp"

namespace nees {

// Principal moments of inertia, A <= B <= C with C < A + B.
struct InertiaParams {
  double A = 1.0;
  double B = 1.0;
  double C = 1.0;

  double a1() const { return 1.0 / A; }
  double a2() const { return 1.0 / B; }
  double a3() const { return 1.0 / C; }
};

inline void validate(const InertiaParams& I) {
  detail::require(std::isfinite(I.A) && std::isfinite(I.B) && std::isfinite(I.C),
                  "moments of inertia must be finite");
  detail::require(I.A > 0.0, "moments of inertia must be positive");
  detail::require(I.A <= I.B && I.B <= I.C, "moments must be ordered A <= B <= C");
  detail::require(I.C <= I.A + I.B, "moments must satisfy C <= A + B");
}

struct AndoyerState {
  double lambda = 0.0;
  double mu = 0.0;
  double nu = 0.0;
  double Lambda = 0.0;
  double M = 1.0;
  double N = 0.0;
};

inline double rb_hamiltonian(const AndoyerState& x, const InertiaParams& I) {
  const double s = std::sin(x.nu), c = std::cos(x.nu);
  return 0.5 * (I.a1() * s * s + I.a2() * c * c) * (x.M * x.M - x.N * x.N) +
         0.5 * I.a3() * x.N * x.N;
}

struct RbRates {
  double nu_dot = 0.0;
  double N_dot = 0.0;
  double mu_dot = 0.0;
};

inline RbRates rb_rhs(const AndoyerState& x, const InertiaParams& I) {
  const double s = std::sin(x.nu), c = std::cos(x.nu);
  const double g = I.a1() * s * s + I.a2() * c * c;
  return {x.N * (I.a3() - g), (I.a2() - I.a1()) * (x.M * x.M - x.N * x.N) * s * c, x.M * g};
}

// Integrates (nu, N, mu); lambda, Lambda and M stay constant.
inline DenseSolution rb_integrate(const AndoyerState& x0, const InertiaParams& I, double t_end,
                                  const IntegratorConfig& cfg = {}) {
  validate(I);
  auto rhs = [&I, M = x0.M](double, std::span<const double> y, std::span<double> dy) {
    AndoyerState x;
    x.nu = y[0];
    x.N = y[1];
    x.M = M;
    const RbRates r = rb_rhs(x, I);
    dy[0] = r.nu_dot;
    dy[1] = r.N_dot;
    dy[2] = r.mu_dot;
  };
  const std::vector<double> y0{x0.nu, x0.N, x0.mu};
  return integrate_ode(rhs, 0.0, y0, t_end, cfg);
}

// Constants of the Jacobi-function solution in the circulation regime.
struct RBConstants {
  double M = 1.0;
  double h = 0.0;
  double d = 0.0;       // 2h / M^2
  double R = 0.0;       // amplitude of N
  double n_star = 0.0;  // C (B - A) / (A (C - B))
  double m = 0.0;       // parameter of the Jacobi functions
  double s = 0.0;       // frequency: argument s t
};

inline RBConstants rb_constants(const InertiaParams& I, double M, double h) {
  validate(I);
  detail::require(std::isfinite(M) && M > 0.0, "M must be positive");
  detail::require(std::isfinite(h), "h must be finite");
  detail::require(I.C != I.A, "C = A: spherical body has no elliptic solution");
  detail::require(I.C != I.B, "C = B: the constants are singular");
  RBConstants k;
  k.M = M;
  k.h = h;
  k.d = 2.0 * h / (M * M);
  const double oda = 1.0 - k.d * I.A;
  detail::require(oda != 0.0, "1 - dA = 0: the constants are singular");
  const double R2 = M * M * I.C * oda / (I.C - I.A);
  const double s2 = M * M * (I.C - I.B) * oda / (I.A * I.B * I.C);
  k.n_star = I.C * (I.B - I.A) / (I.A * (I.C - I.B));
  k.m = (I.B - I.A) * (k.d * I.C - 1.0) / ((I.C - I.B) * oda);
  if (!(R2 > 0.0 && s2 > 0.0 && k.m >= 0.0 && k.m < 1.0))
    throw domain_error(
        "only the circulation regime 1/C <= d < 1/B (0 <= m < 1) has a closed-form solution");
  k.R = std::sqrt(R2);
  k.s = std::sqrt(s2);
  return k;
}

struct RbSolution {
  double sin_nu = 1.0;
  double cos_nu = 0.0;
  double N = 0.0;
};

// t = 0 is the point nu = pi/2, N = R.
inline RbSolution rb_solution(double t, const RBConstants& k) {
  const JacobiTriple j = sncndn(k.s * t, k.m);
  const double r = std::sqrt(1.0 + k.n_star * j.sn * j.sn);
  return {j.cn / r, std::sqrt(1.0 + k.n_star) * j.sn / r, k.R * j.dn};
}

// nu(t), continuous in t.
inline double rb_nu(double t, const RBConstants& k) {
  const double phi = am(k.s * t, k.m);
  const double q = std::nearbyint(phi / std::numbers::pi);
  const double r = phi - q * std::numbers::pi;
  // tan(pi/2 - nu) = sqrt(1 + n*) tan(am)
  return std::numbers::pi / 2 - q * std::numbers::pi -
         std::atan2(std::sqrt(1.0 + k.n_star) * std::sin(r), std::cos(r));
}

// Time at which the solution passes through the given nu (nu decreases with t).
inline double rb_time_shift(double nu, const RBConstants& k) {
  const double sn = std::cos(nu) / std::sqrt(1.0 + k.n_star * std::sin(nu) * std::sin(nu));
  const double cn = std::sin(nu) * std::sqrt(1.0 + k.n_star * sn * sn);
  // Unwrap: nu = pi/2 - phi' with phi' continuous, so the amplitude follows.
  const double target = std::numbers::pi / 2 - nu;
  const double q = std::nearbyint(target / std::numbers::pi);
  double phi = std::atan2(sn, cn);
  phi += q * std::numbers::pi - std::nearbyint(phi / std::numbers::pi) * std::numbers::pi;
  return AmplitudeKernel({k.m}).integral(phi) / k.s;
}

// mu(t) = M int_0^t (a1 sin^2 nu + a2 cos^2 nu) dt by quadrature.
inline double rb_mu(double t, const RBConstants& k, const InertiaParams& I) {
  auto g = [&](double tau) {
    const RbSolution x = rb_solution(tau, k);
    return k.M * (I.a1() * x.sin_nu * x.sin_nu + I.a2() * x.cos_nu * x.cos_nu);
  };
  const double T = 2.0 * complete_K(k.m) / k.s;  // period of the integrand
  const double q = std::trunc(t / T);
  const double rest = t - q * T;
  return q * detail::integrate(g, 0.0, T) + detail::integrate(g, 0.0, rest);
}

// mu(t) as a linear function of t plus a third-kind integral:
// mu = M [a1 t - (a1 - a2)(1 + n*) (U - Pi(am U; -n*, m)) / (s n*)], U = s t.
inline double rb_mu_pi(double t, const RBConstants& k, const InertiaParams& I) {
  if (k.n_star == 0.0) return k.M * I.a1() * t;
  const double U = k.s * t;
  const double pi3 = legendre_pi(am(U, k.m), -k.n_star, k.m);
  return k.M * (I.a1() * t -
                (I.a1() - I.a2()) * (1.0 + k.n_star) * (U - pi3) / (k.s * k.n_star));
}

// Separated form: M sqrt(Omega) dt = d nu / sqrt((1 - n1 sin^2 nu)(1 - m1 sin^2 nu)).
struct RBAltConstants {
  double n1 = 0.0;
  double m1 = 0.0;
  double Omega = 0.0;
  double rate = 0.0;  // M sqrt(Omega)
};

inline RBAltConstants rb_alt_constants(const InertiaParams& I, double M, double h) {
  validate(I);
  detail::require(std::isfinite(M) && M > 0.0, "M must be positive");
  const double d = 2.0 * h / (M * M);
  detail::require(I.a3() != I.a2(), "a3 = a2 must be treated separately");
  detail::require(d != I.a2(), "d = a2 must be treated separately");
  RBAltConstants k;
  k.n1 = (I.a1() - I.a2()) / (d - I.a2());
  k.m1 = (I.a1() - I.a2()) / (I.a3() - I.a2());
  k.Omega = (d - I.a2()) * (I.a3() - I.a2());
  detail::require(k.Omega > 0.0, "separated form needs (d - a2)(a3 - a2) > 0");
  k.rate = M * std::sqrt(k.Omega);
  return k;
}

inline MahlerParams4 rb_alt_mahler(const RBAltConstants& k) {
  return {std::max(k.n1, k.m1), std::min(k.n1, k.m1)};
}

// nu(t) = amg(V - M sqrt(Omega) t), V the quarter period, so that nu(0) = pi/2.
inline double rb_nu_amg(double t, const RBAltConstants& k) {
  const AmplitudeKernel ker = mahler4_kernel(rb_alt_mahler(k));
  return ker.inverse(ker.quarter_period() - k.rate * t);
}

// cos nu = A2 sng(w), sin nu = A1 cng(w), N = A3 dng(w) / fng(w) with
// w = sigma t, sigma = M sqrt((a1 - d)(a1 - a3)), Mahler parameters
// m = (a1 - a2)/(a1 - d), n = (a1 - a2)/(a1 - a3). A1, A2, A3 are fitted
// from the classical solution at t = 0.
struct RbMahlerForm {
  MahlerParams4 params;
  double sigma = 0.0;
  double A1 = 0.0, A2 = 0.0, A3 = 0.0;
};

inline RbMahlerForm rb_mahler_form(const RBConstants& k, const InertiaParams& I) {
  RbMahlerForm f;
  const double a1 = I.a1(), a2 = I.a2(), a3 = I.a3();
  detail::require(a1 != k.d && a1 != a3, "Mahler form needs a1 != d and a1 != a3");
  f.params = {(a1 - a2) / (a1 - k.d), (a1 - a2) / (a1 - a3)};
  f.sigma = k.M * std::sqrt((a1 - k.d) * (a1 - a3));
  const RbSolution x0 = rb_solution(0.0, k);
  const Mahler4Values y0 = mahler4_direct(0.0, f.params);
  f.A1 = x0.sin_nu / y0.cng;
  f.A3 = x0.N * y0.fng / y0.dng;
  // sng(0) = 0: A2 from the slope, d cos nu / dt = -sin nu * nu_dot.
  AndoyerState s;
  s.nu = std::atan2(x0.sin_nu, x0.cos_nu);
  s.N = x0.N;
  s.M = k.M;
  f.A2 = -x0.sin_nu * rb_rhs(s, I).nu_dot / f.sigma;
  return f;
}

inline RbSolution rb_solution_mahler(double t, const RbMahlerForm& f) {
  const Mahler4Values y = mahler4_direct(f.sigma * t, f.params);
  return {f.A1 * y.cng, f.A2 * y.sng, f.A3 * y.dng / y.fng};
}

}  // namespace nees
