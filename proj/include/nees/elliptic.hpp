#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "nees/ees_system.hpp"
#include "nees/error.hpp"

namespace nees {

struct JacobiTriple {
  double sn = 0.0;
  double cn = 1.0;
  double dn = 1.0;
  double u = 0.0;
  double m = 0.0;
};

inline double agm(double a, double b) {
  for (int i = 0; i < 64 && std::abs(a - b) > 2.0 * std::numeric_limits<double>::epsilon() * a;
       ++i) {
    const double an = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = an;
  }
  return 0.5 * (a + b);
}

// Complete integral of the first kind K(m), m < 1.
inline double complete_K(double m) {
  detail::require(std::isfinite(m) && m < 1.0, "complete_K needs m < 1");
  if (m < 0.0) {
    const double mp = -m;
    return complete_K(mp / (1.0 + mp)) / std::sqrt(1.0 + mp);
  }
  return std::numbers::pi / (2.0 * agm(1.0, std::sqrt(1.0 - m)));
}

// sn(u; -m) = sqrt(mu1) sd(v; mu), cn = cd, dn = nd, with mu = m / (1 + m),
// mu1 = 1 / (1 + m), v = u / sqrt(mu1).
struct NegativeParameterMap {
  double mu = 0.0;
  double mu1 = 1.0;
  double arg_scale = 1.0;
};

inline NegativeParameterMap transform_negative(double m) {
  detail::require(std::isfinite(m) && m > 0.0, "transform_negative needs m > 0");
  return {m / (1.0 + m), 1.0 / (1.0 + m), std::sqrt(1.0 + m)};
}

namespace detail {

// Amplitude and dn for 0 <= m < 1 and |u| <= K by the descending AGM.
struct AmplitudeDn {
  double phi;
  double dn;
};

inline AmplitudeDn am_dn_agm(double u, double m) {
  if (m == 0.0) return {u, 1.0};
  constexpr int kMax = 40;
  std::array<double, kMax + 1> a{}, c{};
  a[0] = 1.0;
  double b = std::sqrt(1.0 - m);
  c[0] = std::sqrt(m);
  int n = 0;
  while (n < kMax && std::abs(c[n]) > std::numeric_limits<double>::epsilon() * a[n]) {
    a[n + 1] = 0.5 * (a[n] + b);
    c[n + 1] = c[n] * c[n] / (4.0 * a[n + 1]);
    b = std::sqrt(a[n] * b);
    ++n;
  }
  double phi = std::ldexp(a[n] * u, n);
  double prev = phi;
  for (int i = n; i > 0; --i) {
    prev = phi;
    phi = 0.5 * (phi + std::asin(c[i] / a[i] * std::sin(phi)));
  }
  const double dn = n > 0 ? std::cos(phi) / std::cos(prev - phi)
                          : std::sqrt(1.0 - m * std::sin(phi) * std::sin(phi));
  return {phi, dn};
}

// u = 2 K q + r with |r| <= K.
struct HalfPeriodReduction {
  double q;
  double r;
};

inline HalfPeriodReduction reduce_half_period(double u, double K) {
  const double q = std::nearbyint(u / (2.0 * K));
  return {q, u - 2.0 * K * q};
}

inline JacobiTriple sncndn_unit(double u, double m) {
  if (m == 0.0) return {std::sin(u), std::cos(u), 1.0, u, m};
  const double K = complete_K(m);
  const auto [q, r] = reduce_half_period(u, K);
  const auto [phi, dn] = am_dn_agm(r, m);
  const double sign = std::fmod(q, 2.0) == 0.0 ? 1.0 : -1.0;
  return {sign * std::sin(phi), sign * std::cos(phi), dn, u, m};
}

inline double am_unit(double u, double m) {
  if (m == 0.0) return u;
  const double K = complete_K(m);
  const auto [q, r] = reduce_half_period(u, K);
  return q * std::numbers::pi + am_dn_agm(r, m).phi;
}

}  // namespace detail

// Values at u of the functions with parameter -m (m > 0).
inline JacobiTriple apply(const NegativeParameterMap& t, double u) {
  const JacobiTriple j = detail::sncndn_unit(u * t.arg_scale, t.mu);
  return {std::sqrt(t.mu1) * j.sn / j.dn, j.cn / j.dn, 1.0 / j.dn, u, -t.mu / t.mu1};
}

// Jacobi amplitude, continuous and increasing in u. Requires m < 1.
inline double am(double u, double m) {
  detail::require(std::isfinite(u), "am needs a finite argument");
  detail::require(std::isfinite(m) && m < 1.0, "am needs m < 1");
  if (m >= 0.0) return detail::am_unit(u, m);
  const NegativeParameterMap t = transform_negative(-m);
  const double phi = detail::am_unit(u * t.arg_scale, t.mu);
  const double r = std::nearbyint(phi / std::numbers::pi);
  const double rest = phi - r * std::numbers::pi;
  return r * std::numbers::pi + std::atan2(std::sqrt(t.mu1) * std::sin(rest), std::cos(rest));
}

// sn, cn, dn for m < 1 (negative parameters included).
inline JacobiTriple sncndn(double u, double m) {
  detail::require(std::isfinite(u), "sncndn needs a finite argument");
  detail::require(std::isfinite(m) && m < 1.0, "sncndn needs m < 1");
  if (m >= 0.0) return detail::sncndn_unit(u, m);
  return apply(transform_negative(-m), u);
}

// Reciprocal parameter: sn(u; m) = sn(sqrt(m) u; 1/m) / sqrt(m), cn and dn
// exchanged. Requires m >= 1; m = 1 gives tanh and sech.
inline JacobiTriple transform_reciprocal(double u, double m) {
  detail::require(std::isfinite(m) && m >= 1.0, "transform_reciprocal needs m >= 1");
  if (m == 1.0) {
    const double s = 1.0 / std::cosh(u);
    return {std::tanh(u), s, s, u, m};
  }
  const double k = std::sqrt(m);
  const JacobiTriple j = detail::sncndn_unit(k * u, 1.0 / m);
  return {j.sn / k, j.dn, j.cn, u, m};
}

// sn, cn, dn for any real parameter.
inline JacobiTriple sncndn_any(double u, double m) {
  if (m < 1.0) return sncndn(u, m);
  return transform_reciprocal(u, m);
}

// One descending Landen step: values at (u, m) from values at (v, mu),
// mu = ((1 - k')/(1 + k'))^2, v = u / (1 + sqrt(mu)).
struct LandenStep {
  double mu = 0.0;
  double v = 0.0;
  JacobiTriple value;
  double dn_from_double = 1.0;  // dn(u; m) = (sqrt(mu) cn(2v; mu) + dn(2v; mu)) / (1 + sqrt(mu))
};

inline LandenStep landen_descend(double u, double m) {
  detail::require(std::isfinite(m) && m >= 0.0 && m < 1.0, "landen_descend needs 0 <= m < 1");
  const double kp = std::sqrt(1.0 - m);
  const double rmu = m / ((1.0 + kp) * (1.0 + kp));
  LandenStep out;
  out.mu = rmu * rmu;
  out.v = u / (1.0 + rmu);
  const JacobiTriple j = sncndn(out.v, out.mu);
  const double den = 1.0 + rmu * j.sn * j.sn;
  out.value = {(1.0 + rmu) * j.sn / den, j.cn * j.dn / den, (1.0 - rmu * j.sn * j.sn) / den, u, m};
  const JacobiTriple j2 = sncndn(2.0 * out.v, out.mu);
  out.dn_from_double = (rmu * j2.cn + j2.dn) / (1.0 + rmu);
  return out;
}

// Addition theorem applied to known values at u and w.
inline JacobiTriple jacobi_add(const JacobiTriple& a, const JacobiTriple& b, double m) {
  const double den = 1.0 - m * a.sn * a.sn * b.sn * b.sn;
  if (den == 0.0) throw domain_error("addition formula denominator vanishes");
  return {(a.sn * b.cn * b.dn + b.sn * a.cn * a.dn) / den,
          (a.cn * b.cn - a.sn * b.sn * a.dn * b.dn) / den,
          (a.dn * b.dn - m * a.sn * b.sn * a.cn * b.cn) / den, a.u + b.u, m};
}

inline JacobiTriple jacobi_add(double u, double w, double m) {
  return jacobi_add(sncndn(u, m), sncndn(w, m), m);
}

// Three-dimensional systems satisfied by ratios of theta functions.
enum class ThetaFixture { bounded1, bounded2, unbounded1, unbounded2 };

inline ThetaFixture parse_theta_fixture(const std::string& tag) {
  if (tag == "bounded-1") return ThetaFixture::bounded1;
  if (tag == "bounded-2") return ThetaFixture::bounded2;
  if (tag == "unbounded-1") return ThetaFixture::unbounded1;
  if (tag == "unbounded-2") return ThetaFixture::unbounded2;
  throw domain_error("unknown theta fixture tag: " + tag);
}

inline EESParams theta_ratio_fixture(ThetaFixture tag, double k) {
  detail::require(std::isfinite(k) && k > 0.0 && k < 1.0, "theta fixtures need 0 < k < 1");
  const double kp = std::sqrt((1.0 - k) * (1.0 + k));
  switch (tag) {
    case ThetaFixture::bounded1:
      return EESParams({kp, -1.0, -k}, {0.0, std::sqrt(k / kp), 1.0 / std::sqrt(kp)});
    case ThetaFixture::bounded2:
      return EESParams({1.0, -kp, k}, {0.0, std::sqrt(k), std::sqrt(kp)});
    case ThetaFixture::unbounded1:
      return EESParams({k, kp, 1.0}, {0.0, 1.0 / std::sqrt(k), std::sqrt(kp / k)});
    case ThetaFixture::unbounded2: {
      const double r = std::sqrt((kp + 1.0) / k);
      return EESParams({-k, -1.0, -kp}, {1.0, r, r});
    }
  }
  throw domain_error("unknown theta fixture tag");
}

// Factor of the reparametrization d tau = sqrt(2K/pi) dv used with the
// theta-ratio systems.
inline double theta_time_factor(double k) {
  return std::sqrt(2.0 * complete_K(k * k) / std::numbers::pi);
}

}  // namespace nees
