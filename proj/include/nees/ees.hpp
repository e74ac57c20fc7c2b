#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/Polynomials>

#include "nees/ees_system.hpp"
#include "nees/trajectory.hpp"

namespace nees {

// Coordinate subspace of equilibria: coordinates outside `free` are zero,
// those inside are arbitrary.
struct EquilibriumSet {
  std::vector<std::size_t> free;
};

// All coordinate subspaces with at most N-2 free coordinates. On each of them
// every product over N-1 coordinates contains a zero factor.
inline std::vector<EquilibriumSet> equilibria(const EESParams& p) {
  const std::size_t n = p.dimension();
  std::vector<EquilibriumSet> out;
  if (n < 2) return out;
  const std::size_t max_free = n - 2;
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k <= max_free; ++k) {
    idx.resize(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    for (;;) {
      out.push_back({idx});
      std::size_t i = k;
      while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return out;
}

// True when every first integral vanishes: the orbit is then the straight
// line through the origin spanned by the initial condition.
inline bool is_straight_line(const EESParams& p, double tol = 1e-14) {
  const FirstIntegralMatrix c = first_integrals(p);
  double w2 = 0.0, a = 0.0;
  for (std::size_t i = 0; i < p.dimension(); ++i) {
    w2 = std::max(w2, p.ic()[i] * p.ic()[i]);
    a = std::max(a, std::abs(p.alphas()[i]));
  }
  return c.max_abs() <= tol * std::max(1.0, a * w2);
}

// System for the direction w / |w|. Its coefficients c_i = alpha_i |w|^2 -
// (sum alpha) w_i^2 are conserved, and it evolves in v* with dv* = |w|^(N-4) dv.
struct NormalizedSystem {
  EESParams system;  // coefficients c_i, initial condition w(0) / |w(0)|
  double alpha_sum = 0.0;
  double initial_norm = 0.0;
  int exponent = 0;  // N - 4
  std::vector<double> alphas;
};

inline NormalizedSystem normalize(const EESParams& p) {
  double r2 = 0.0;
  for (double w : p.ic()) r2 += w * w;
  detail::require(r2 > 0.0, "normalization needs a nonzero initial condition");
  const double r = std::sqrt(r2);
  const double sa = p.alpha_sum();
  std::vector<double> c(p.dimension()), u(p.dimension());
  for (std::size_t i = 0; i < p.dimension(); ++i) {
    c[i] = p.alphas()[i] * r2 - sa * p.ic()[i] * p.ic()[i];
    u[i] = p.ic()[i] / r;
  }
  return {EESParams(c, u), sa, r, static_cast<int>(p.dimension()) - 4, p.alphas()};
}

// |w|^2 recovered from a point u of the normalized orbit, using the
// coordinate whose denominator alpha_i - (sum alpha) u_i^2 is largest.
inline double norm_squared_from_direction(const NormalizedSystem& ns, std::span<const double> u) {
  double best = 0.0, num = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double den = ns.alphas[i] - ns.alpha_sum * u[i] * u[i];
    if (std::abs(den) > std::abs(best)) {
      best = den;
      num = ns.system.alphas()[i];
    }
  }
  if (best == 0.0) return ns.initial_norm * ns.initial_norm;
  return num / best;
}

// Integrates the normalized system together with v(v*), dv/dv* = |w|^(4-N).
// State layout: u_1..u_N, v.
inline DenseSolution integrate_normalized(const NormalizedSystem& ns, double vstar_end,
                                          const IntegratorConfig& cfg = {}) {
  const std::size_t n = ns.system.dimension();
  auto rhs = [&ns, n](double, std::span<const double> y, std::span<double> dy) {
    ees_rhs(ns.system.alphas(), y.first(n), dy.first(n));
    const double r2 = norm_squared_from_direction(ns, y.first(n));
    dy[n] = std::pow(r2, -0.5 * ns.exponent);
  };
  std::vector<double> y0(ns.system.ic());
  y0.push_back(0.0);
  return integrate_ode(rhs, 0.0, y0, vstar_end, cfg);
}

// Reduction by the pivot coordinate j: u_i = w_i / w_j satisfies an
// (N-1)-EES with coefficients C_i^j = alpha_i w_j(0)^2 - alpha_j w_i(0)^2
// in the variable dv_j = w_j^(N-4) dv, which is v itself for N = 4.
struct GlashierReduction {
  EESParams system;
  std::size_t pivot = 0;
  std::vector<std::size_t> kept;  // parent index of each reduced coordinate
};

inline GlashierReduction glashier_reduce(const EESParams& p, std::size_t pivot) {
  detail::require(pivot < p.dimension(), "pivot index out of range");
  detail::require(p.dimension() >= 3, "reduction needs at least three coordinates");
  const double wj = p.ic()[pivot];
  detail::require(wj != 0.0, "pivot coordinate must be nonzero at v = 0");
  std::vector<double> a, u;
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < p.dimension(); ++i) {
    if (i == pivot) continue;
    a.push_back(p.alphas()[i] * wj * wj - p.alphas()[pivot] * p.ic()[i] * p.ic()[i]);
    u.push_back(p.ic()[i] / wj);
    kept.push_back(i);
  }
  return {EESParams(a, u), pivot, kept};
}

// u(v) = c w(c^(N-2) v) solves the same system with initial condition c w(0).
inline Trajectory scale_solution(const Trajectory& t, double c) {
  detail::require(c != 0.0 && std::isfinite(c), "scale factor must be finite and nonzero");
  const std::size_t n = t.params().dimension();
  std::vector<double> ic = t.params().ic();
  for (double& w : ic) w *= c;
  const double k = std::pow(c, static_cast<double>(n) - 2.0);
  return Trajectory(EESParams(t.params().alphas(), ic), t.dense(), t.arg_scale() * k,
                    t.value_scale() * c);
}

// Omega = sum w_i^2 satisfies (Omega')^2 = kappa prod (Omega - e_i) with
// e_i = c_i / alpha_i and kappa = 4 (sum alpha)^(2-N) prod alpha_i.
struct WeierstrassCoefficients {
  double kappa = 0.0;
  std::vector<double> roots;
};

inline WeierstrassCoefficients weierstrass_coefficients(const EESParams& p) {
  const double sa = p.alpha_sum();
  detail::require(sa != 0.0, "sum of alphas is zero: |w| is constant");
  const NormalizedSystem ns = normalize(p);
  WeierstrassCoefficients out;
  double prod = 1.0;
  for (std::size_t i = 0; i < p.dimension(); ++i) {
    detail::require(p.alphas()[i] != 0.0, "zero alpha: profile polynomial loses a root");
    prod *= p.alphas()[i];
    out.roots.push_back(ns.system.alphas()[i] / p.alphas()[i]);
  }
  out.kappa = 4.0 * std::pow(sa, 2.0 - static_cast<double>(p.dimension())) * prod;
  return out;
}

struct WeierstrassProfile {
  bool degenerate = false;  // sum alpha = 0, Omega constant
  double kappa = 0.0;       // fitted leading coefficient
  std::vector<std::complex<double>> roots;  // fitted e_i
  double shift = 0.0;                       // mean of the roots
  std::vector<std::complex<double>> centered;  // e_i - shift, summing to zero
  double residual = 0.0;  // max |fit - (Omega')^2| / max (Omega')^2
  std::size_t samples = 0;
};

// Fits (Omega')^2 against a degree-N polynomial in Omega along the trajectory
// and returns the leading coefficient and the roots.
inline WeierstrassProfile weierstrass_profile(const Trajectory& t, std::size_t samples = 400) {
  WeierstrassProfile out;
  const EESParams& p = t.params();
  const std::size_t n = p.dimension();
  const double sa = p.alpha_sum();
  double scale_a = 0.0;
  for (double a : p.alphas()) scale_a = std::max(scale_a, std::abs(a));
  if (std::abs(sa) <= 1e-14 * std::max(1.0, scale_a)) {
    out.degenerate = true;
    return out;
  }
  detail::require(samples > n + 1, "not enough samples for the profile fit");

  std::vector<double> om(samples), d2(samples), dw(n);
  const double v0 = t.v_start(), v1 = t.v_end();
  for (std::size_t k = 0; k < samples; ++k) {
    const double v = v0 + (v1 - v0) * static_cast<double>(k) / static_cast<double>(samples - 1);
    const std::vector<double> w = t.evaluate(v);
    ees_rhs(p.alphas(), w, dw);
    double o = 0.0, d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      o += w[i] * w[i];
      d += 2.0 * w[i] * dw[i];
    }
    om[k] = o;
    d2[k] = d * d;
  }
  const auto [lo_it, hi_it] = std::minmax_element(om.begin(), om.end());
  const double center = 0.5 * (*lo_it + *hi_it);
  const double half = 0.5 * (*hi_it - *lo_it);
  if (!(half > 1e-12 * std::max(1.0, std::abs(center)))) {
    out.degenerate = true;
    return out;
  }

  Eigen::MatrixXd vander(samples, n + 1);
  Eigen::VectorXd rhs(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    const double x = (om[k] - center) / half;
    double pw = 1.0;
    for (std::size_t j = 0; j <= n; ++j) {
      vander(k, j) = pw;
      pw *= x;
    }
    rhs(k) = d2[k];
  }
  const Eigen::VectorXd coef = vander.colPivHouseholderQr().solve(rhs);
  const Eigen::VectorXd fitted = vander * coef;
  const double peak = rhs.cwiseAbs().maxCoeff();
  out.residual = peak > 0.0 ? (fitted - rhs).cwiseAbs().maxCoeff() / peak : 0.0;
  out.samples = samples;
  out.kappa = coef(n) / std::pow(half, static_cast<double>(n));

  Eigen::PolynomialSolver<double, Eigen::Dynamic> solver;
  solver.compute(coef);
  for (Eigen::Index i = 0; i < solver.roots().size(); ++i)
    out.roots.push_back(center + half * solver.roots()(i));
  std::sort(out.roots.begin(), out.roots.end(),
            [](auto a, auto b) { return a.real() < b.real(); });
  std::complex<double> mean = 0.0;
  for (auto r : out.roots) mean += r;
  mean /= static_cast<double>(out.roots.size());
  out.shift = mean.real();
  for (auto r : out.roots) out.centered.push_back(r - out.shift);
  return out;
}

}  // namespace nees
