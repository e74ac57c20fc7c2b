#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "nees/amplitude.hpp"
#include "nees/ees_system.hpp"
#include "nees/elliptic.hpp"
#include "nees/error.hpp"
#include "nees/trajectory.hpp"

namespace nees {

// Parameters of the 4-Mahler system with coefficients (1, -1, -m, -n).
struct MahlerParams4 {
  double m = 0.0;
  double n = 0.0;
};

struct Mahler4Values {
  double sng = 0.0;
  double cng = 1.0;
  double dng = 1.0;
  double fng = 1.0;
};

// Accepted domain n <= m < 1; allow_m_one admits m = 1 (with n < 1).
inline void validate(const MahlerParams4& p, bool allow_m_one = false) {
  detail::require(std::isfinite(p.m) && std::isfinite(p.n), "m and n must be finite");
  detail::require(p.n <= p.m, "4-Mahler functions need n <= m");
  if (allow_m_one)
    detail::require(p.m <= 1.0, "4-Mahler functions need m <= 1");
  else
    detail::require(p.m < 1.0, "4-Mahler functions need m < 1");
}

inline EESParams mahler4_system(const MahlerParams4& p) {
  return EESParams({1.0, -1.0, -p.m, -p.n}, {0.0, 1.0, 1.0, 1.0});
}

// sng = A sn(a v | m1) / sqrt(1 - n1 sn^2), cng, dng likewise, fng = 1 / sqrt(.).
struct ReductionConstants {
  double a = 1.0;
  double A = 1.0;
  double n1 = 0.0;
  double m1 = 0.0;
};

inline ReductionConstants reduction_constants(const MahlerParams4& p) {
  detail::require(std::isfinite(p.n) && p.n < 1.0, "Jacobi form needs n < 1");
  const double a = std::sqrt(1.0 - p.n);
  return {a, 1.0 / a, p.n / (p.n - 1.0), (p.m - p.n) / (1.0 - p.n)};
}

inline Mahler4Values mahler4_from_jacobi(const JacobiTriple& j, const ReductionConstants& c) {
  const double den = 1.0 - c.n1 * j.sn * j.sn;
  if (!(den > 0.0)) throw domain_error("denominator 1 - n1 sn^2 is not positive");
  const double r = std::sqrt(den);
  return {c.A * j.sn / r, j.cn / r, j.dn / r, 1.0 / r};
}

inline Mahler4Values mahler4_closed(double v, const MahlerParams4& p) {
  validate(p, true);
  const ReductionConstants c = reduction_constants(p);
  return mahler4_from_jacobi(sncndn_any(c.a * v, c.m1), c);
}

// Constants for the initial condition (0, w2, w3, w4).
struct GeneralIvpConstants {
  double a = 1.0;
  double A = 1.0;
  double n1 = 0.0;
  double m1 = 0.0;
};

inline GeneralIvpConstants general_ivp_constants(double w2, double w3, double w4,
                                                 const MahlerParams4& p) {
  detail::require(std::isfinite(w2) && std::isfinite(w3) && std::isfinite(w4),
                  "initial condition must be finite");
  detail::require(w2 != 0.0 && w3 != 0.0 && w4 != 0.0,
                  "initial values of w2, w3, w4 must be nonzero");
  const double rad = w4 * w4 - p.n * w2 * w2;
  detail::require(rad > 0.0, "need w4(0)^2 - n w2(0)^2 > 0");
  const double sr = std::sqrt(rad);
  const double den = p.n * w2 * w2 - w4 * w4;
  return {w3 * sr, w2 * w4 / sr, p.n * w2 * w2 / den,
          w2 * w2 * (p.n * w3 * w3 - p.m * w4 * w4) / (w3 * w3 * den)};
}

// Solution (w1, w2, w3, w4) of the Mahler system with w(0) = (0, w2, w3, w4).
inline std::array<double, 4> general_ivp_solution(double v, double w2, double w3, double w4,
                                                  const MahlerParams4& p) {
  const GeneralIvpConstants c = general_ivp_constants(w2, w3, w4, p);
  const JacobiTriple j = sncndn_any(c.a * v, c.m1);
  const double den = 1.0 - c.n1 * j.sn * j.sn;
  if (!(den > 0.0)) throw domain_error("denominator 1 - n1 sn^2 is not positive");
  const double r = std::sqrt(den);
  return {c.A * j.sn / r, w2 * j.cn / r, w3 * j.dn / r, w4 / r};
}

// Maclaurin coefficients from the differential system by Cauchy products.
struct Mahler4Series {
  std::vector<double> s, c, d, f;
};

inline Mahler4Series mahler4_series(const MahlerParams4& p, int order) {
  detail::require(order >= 0, "series order must be nonnegative");
  const std::size_t K = static_cast<std::size_t>(order) + 1;
  Mahler4Series out{std::vector<double>(K, 0.0), std::vector<double>(K, 0.0),
                    std::vector<double>(K, 0.0), std::vector<double>(K, 0.0)};
  auto& s = out.s;
  auto& c = out.c;
  auto& d = out.d;
  auto& f = out.f;
  c[0] = d[0] = f[0] = 1.0;
  std::vector<double> df(K), cf(K), cd(K);
  for (std::size_t k = 0; k + 1 < K; ++k) {
    df[k] = cf[k] = cd[k] = 0.0;
    for (std::size_t i = 0; i <= k; ++i) {
      df[k] += d[i] * f[k - i];
      cf[k] += c[i] * f[k - i];
      cd[k] += c[i] * d[k - i];
    }
    double cdf = 0.0, sdf = 0.0, scf = 0.0, scd = 0.0;
    for (std::size_t i = 0; i <= k; ++i) {
      cdf += c[i] * df[k - i];
      sdf += s[i] * df[k - i];
      scf += s[i] * cf[k - i];
      scd += s[i] * cd[k - i];
    }
    const double inv = 1.0 / static_cast<double>(k + 1);
    s[k + 1] = cdf * inv;
    c[k + 1] = -sdf * inv;
    d[k + 1] = -p.m * scf * inv;
    f[k + 1] = -p.n * scd * inv;
  }
  return out;
}

namespace detail {

inline double horner(const std::vector<double>& a, double v) {
  double r = 0.0;
  for (std::size_t k = a.size(); k-- > 0;) r = r * v + a[k];
  return r;
}

constexpr int kMaclaurinOrder = 16;

}  // namespace detail

// Truncated expansions with the closed-form coefficients. `order` is the
// highest power kept (1..7): sng keeps odd powers, the others even powers.
inline Mahler4Values mahler4_taylor(double v, const MahlerParams4& p, int order) {
  detail::require(order >= 1 && order <= 7, "Taylor order must be between 1 and 7");
  const double m = p.m, n = p.n;
  const double v2 = v * v, v3 = v2 * v, v4 = v2 * v2, v5 = v4 * v, v6 = v4 * v2, v7 = v6 * v;
  Mahler4Values r{v, 1.0, 1.0, 1.0};
  if (order >= 2) {
    r.cng -= v2 / 2.0;
    r.dng -= m / 2.0 * v2;
    r.fng -= n / 2.0 * v2;
  }
  if (order >= 3) r.sng -= (1.0 + m + n) / 6.0 * v3;
  if (order >= 4) {
    r.cng += (1.0 + 4.0 * m + 4.0 * n) / 24.0 * v4;
    r.dng += m * (4.0 + m + 4.0 * n) / 24.0 * v4;
    r.fng += n * (4.0 + n + 4.0 * m) / 24.0 * v4;
  }
  if (order >= 5)
    r.sng += (1.0 + 14.0 * (m + n + m * n) + m * m + n * n) / 120.0 * v5;
  if (order >= 6) {
    r.cng -= (1.0 + 44.0 * (m + n) + 16.0 * m * m + 104.0 * m * n + 16.0 * n * n) / 720.0 * v6;
    r.dng -= m * (16.0 + 44.0 * m + m * m + 104.0 * n + 44.0 * m * n + 16.0 * n * n) / 720.0 * v6;
    r.fng -= n * (16.0 + 44.0 * n + n * n + 104.0 * m + 44.0 * m * n + 16.0 * m * m) / 720.0 * v6;
  }
  if (order >= 7)
    r.sng -= (1.0 + 135.0 * (m + n) + 135.0 * (m * m + n * n) + 762.0 * m * n +
              135.0 * (m * m * n + m * n * n) + m * m * m + n * n * n) /
             5040.0 * v7;
  return r;
}

// Addition theorem. Sign +1 gives the values at x + y, -1 at x - y.
inline Mahler4Values mahler4_add(const Mahler4Values& x, const Mahler4Values& y,
                                 const ReductionConstants& k, int sign = 1) {
  const double e = sign >= 0 ? 1.0 : -1.0;
  const double sx = x.sng / k.A, sy = y.sng / k.A;
  const double P = sx * y.cng * y.dng * x.fng + e * sy * x.cng * x.dng * y.fng;
  // F_x^2 F_y^2 - m1 sx^2 sy^2 written without cancellation.
  const double Q = x.cng * x.cng * y.fng * y.fng + sx * sx * y.dng * y.dng;
  const double R2 = Q * Q - k.n1 * P * P;
  if (!(R2 > 0.0)) throw domain_error("addition formula denominator vanishes");
  const double R = std::sqrt(R2);
  return {k.A * P / R, (x.cng * y.cng * x.fng * y.fng - e * sx * sy * x.dng * y.dng) / R,
          (x.dng * y.dng * x.fng * y.fng - e * k.m1 * sx * sy * x.cng * y.cng) / R, Q / R};
}

inline Mahler4Values mahler4_double(const Mahler4Values& x, const ReductionConstants& k) {
  return mahler4_add(x, x, k, 1);
}

// Values at x/2 from values at x, for x/2 within a quarter period of 0 on
// either side; sng(x/2) takes the sign given.
inline Mahler4Values mahler4_half(const Mahler4Values& x, const MahlerParams4& p,
                                  const ReductionConstants& k, double sign) {
  const double S = x.sng, C = x.cng, D = x.dng, F = x.fng;
  const double s2 = S * S;
  const double fmc = C >= 0.0 ? (1.0 - p.n) * s2 / (F + C) : F - C;
  const double dpc = C < 0.0 ? (1.0 - p.m) * s2 / (D - C) : D + C;
  const double den = F + D - k.n1 * fmc;
  double dng2;
  if (C >= 0.0) {
    dng2 = dpc * (F + D) / ((F + C) * (F + D) - k.n1 * (1.0 - p.n) * s2);
  } else {
    // F + C = (1 - n) S^2 / (F - C); the common factor S^2 cancels.
    dng2 = (1.0 - p.m) / (D - C) * (F + D) / ((1.0 - p.n) * ((F + D) / (F - C) - k.n1));
  }
  return {std::copysign(k.A * std::sqrt(fmc / den), sign), std::sqrt(dpc / den), std::sqrt(dng2),
          std::sqrt((F + D) / den)};
}

// Particular closed forms.
enum class ParticularCase { n_zero, m_zero, m_one, m_equals_n, m_n_one, m_n_zero };

namespace detail {

// m = 1: x = sng solves
// v = ln[((1+x)/(1-x)) (1 - n x + r)/(1 + n x + r)] / (2 sqrt(1-n)), r = sqrt((1-n)(1-n x^2)).
// Solved in t = atanh(x), where dv/dt = 1 / sqrt(1 - n x^2).
inline Mahler4Values mahler4_m_one(double v, double n) {
  detail::require(std::isfinite(n) && n < 1.0, "the m = 1 case needs n < 1");
  const double sq = std::sqrt(1.0 - n);
  auto v_of_t = [&](double t) {
    const double x = std::tanh(t);
    const double r = std::sqrt((1.0 - n) * (1.0 - n * x * x));
    return (2.0 * t + std::log((1.0 - n * x + r) / (1.0 + n * x + r))) / (2.0 * sq);
  };
  double t = sq * v;
  for (int it = 0; it < 100; ++it) {
    const double x = std::tanh(t);
    const double step = (v_of_t(t) - v) * std::sqrt(1.0 - n * x * x);
    t -= step;
    if (std::abs(step) <= 2.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t)))
      break;
  }
  const double x = std::tanh(t);
  const double c = 1.0 / std::cosh(t);
  return {x, c, c, std::sqrt(1.0 - n * x * x)};
}

}  // namespace detail

inline Mahler4Values particular_case(double v, ParticularCase kind, double param = 0.0) {
  detail::require(std::isfinite(v), "argument must be finite");
  switch (kind) {
    case ParticularCase::n_zero: {
      const JacobiTriple j = sncndn(v, param);
      return {j.sn, j.cn, j.dn, 1.0};
    }
    case ParticularCase::m_zero: {
      detail::require(param <= 0.0, "with m = 0 the domain needs n <= 0");
      const JacobiTriple j = sncndn(v, param);
      return {j.sn, j.cn, 1.0, j.dn};
    }
    case ParticularCase::m_one:
      return detail::mahler4_m_one(v, param);
    case ParticularCase::m_equals_n: {
      detail::require(param < 1.0, "the m = n case needs m < 1");
      const double th = std::sqrt(1.0 - param) * v;
      const double s = std::sin(th), c = std::cos(th);
      const double r = std::sqrt(1.0 - param * c * c);
      const double sng = s / r;
      const double dn = std::sqrt(1.0 - param * sng * sng);
      return {sng, std::sqrt(1.0 - param) * c / r, dn, dn};
    }
    case ParticularCase::m_n_one: {
      // sqrt(t / (1 + t)) rounds correctly where v / sqrt(1 + v^2) may not.
      const double t = v * v;
      const double c = std::sqrt(1.0 / (1.0 + t));
      const double s = std::abs(v) <= 1.0 ? std::sqrt(t / (1.0 + t)) : 1.0 / std::sqrt(1.0 + 1.0 / t);
      return {std::abs(v) < 1e-150 ? v : std::copysign(s, v), c, c, c};
    }
    case ParticularCase::m_n_zero:
      return {std::sin(v), std::cos(v), 1.0, 1.0};
  }
  throw domain_error("unknown particular case");
}

struct DirectResult {
  Mahler4Values values;
  int halvings = 0;
};

inline double mahler4_series_radius(const MahlerParams4& p) {
  return 0.1 * std::min(1.0, 1.0 / std::sqrt(1.0 + std::abs(p.m) + std::abs(p.n)));
}

// Argument halving into the series disc, Maclaurin evaluation, then as many
// doublings.
inline DirectResult mahler4_direct_detailed(double v, const MahlerParams4& p) {
  validate(p, true);
  detail::require(std::isfinite(v), "argument must be finite");
  if (p.m == 1.0 && p.n == 1.0) return {particular_case(v, ParticularCase::m_n_one), 0};
  const double radius = mahler4_series_radius(p);
  int j = 0;
  double w = v;
  while (std::abs(w) >= radius) {
    w *= 0.5;
    ++j;
  }
  const Mahler4Series ser = mahler4_series(p, detail::kMaclaurinOrder);
  Mahler4Values r{detail::horner(ser.s, w), detail::horner(ser.c, w), detail::horner(ser.d, w),
                  detail::horner(ser.f, w)};
  const ReductionConstants k = reduction_constants(p);
  for (int i = 0; i < j; ++i) r = mahler4_double(r, k);
  return {r, j};
}

inline Mahler4Values mahler4_direct(double v, const MahlerParams4& p) {
  return mahler4_direct_detailed(v, p).values;
}

// Dense ODE solution on [0, W]; sng is odd, the others even. Steps are not
// clamped at W, so values do not depend on the span requested.
class Mahler4Evaluator {
 public:
  Mahler4Evaluator(const MahlerParams4& p, double span, IntegratorConfig cfg = default_config())
      : p_(p) {
    validate(p, true);
    detail::require(std::isfinite(span), "span must be finite");
    cfg.overshoot = true;
    sol_ = integrate_ees(mahler4_system(p), 0.0, std::max(std::abs(span), 1e-3), cfg);
  }

  static IntegratorConfig default_config() {
    IntegratorConfig cfg;
    cfg.rtol = 1e-13;
    cfg.atol = 1e-15;
    return cfg;
  }

  double span() const { return sol_.back(); }

  Mahler4Values operator()(double v) const {
    std::array<double, 4> y{};
    sol_.evaluate(std::abs(v), y);
    return {v < 0.0 ? -y[0] : y[0], y[1], y[2], y[3]};
  }

 private:
  MahlerParams4 p_;
  DenseSolution sol_;
};

// G(v*) = int_0^v* dt / sqrt((1 - n sin^2 t)(1 - m sin^2 t)).
inline AmplitudeKernel mahler4_kernel(const MahlerParams4& p) {
  validate(p);
  return AmplitudeKernel({p.n, p.m});
}

inline double g_quadrature(double vstar, const MahlerParams4& p) {
  return mahler4_kernel(p).integral(vstar);
}

// Quarter period V = G(pi/2).
inline double g_period(const MahlerParams4& p) { return mahler4_kernel(p).quarter_period(); }

// Double expansion of G(pi/2) through m^4 and n^4:
// (pi/2) sum c_i c_j c_{i+j} n^i m^j with c_k = binom(2k, k) / 4^k.
inline double g_period_series(const MahlerParams4& p) {
  std::array<double, 9> c{};
  c[0] = 1.0;
  for (int k = 1; k < 9; ++k) c[k] = c[k - 1] * (2.0 * k - 1.0) / (2.0 * k);
  double sum = 0.0;
  double ni = 1.0;
  for (int i = 0; i <= 4; ++i) {
    double mj = 1.0;
    for (int j = 0; j <= 4; ++j) {
      sum += c[i] * c[j] * c[i + j] * ni * mj;
      mj *= p.m;
    }
    ni *= p.n;
  }
  return std::numbers::pi / 2 * sum;
}

// Generalized amplitude: inverse of G, with amg(v + 2V) = amg(v) + pi.
inline double amg(double v, const MahlerParams4& p) { return mahler4_kernel(p).inverse(v); }

inline Mahler4Values mahler4_from_amplitude(double v, const MahlerParams4& p) {
  const double phi = amg(v, p);
  const double s = std::sin(phi);
  return {s, std::cos(phi), std::sqrt(1.0 - p.m * s * s), std::sqrt(1.0 - p.n * s * s)};
}

inline Mahler4Values mahler4_add(double x, double y, const MahlerParams4& p, int sign = 1) {
  validate(p);
  return mahler4_add(mahler4_direct(x, p), mahler4_direct(y, p), reduction_constants(p), sign);
}

inline Mahler4Values mahler4_double(double x, const MahlerParams4& p) {
  validate(p);
  return mahler4_double(mahler4_direct(x, p), reduction_constants(p));
}

// Values at x/2: x = 4Vq + r with r in (-2V, 2V]; the half of r lies within
// a quarter period, and an odd q flips the signs of sng and cng.
inline Mahler4Values mahler4_half(double x, const MahlerParams4& p) {
  validate(p);
  const double V = g_period(p);
  double q = std::nearbyint(x / (4.0 * V));
  double r = x - 4.0 * V * q;
  if (r <= -2.0 * V) {
    r += 4.0 * V;
    q -= 1.0;
  }
  Mahler4Values h = mahler4_half(mahler4_direct(x, p), p, reduction_constants(p), r);
  if (r == 0.0) h.sng = 0.0;
  if (std::fmod(q, 2.0) != 0.0) {
    h.sng = -h.sng;
    h.cng = -h.cng;
  }
  return h;
}

// sn, cn, dn (a v | m1) recovered from the Mahler values.
inline JacobiTriple jacobi_from_mahler(double v, const MahlerParams4& p) {
  validate(p, true);
  const ReductionConstants k = reduction_constants(p);
  const Mahler4Values r = mahler4_direct(v, p);
  return {r.sng / (k.A * r.fng), r.cng / r.fng, r.dng / r.fng, k.a * v, k.m1};
}

// Four functions built from sn, cn, dn with a = 2K/pi and D = 1 - (1 - k') sn^2(a z).
struct ThetaSimilarValues {
  std::array<double, 4> omega{};
  double a = 0.0;
  double kp = 0.0;
  std::array<double, 4> ic{};
  std::array<double, 4> alphas{};
};

inline ThetaSimilarValues theta_similar(double z, double k) {
  detail::require(std::isfinite(k) && k > 0.0 && k < 1.0, "theta-similar functions need 0 < k < 1");
  detail::require(std::isfinite(z), "argument must be finite");
  ThetaSimilarValues t;
  t.kp = std::sqrt((1.0 - k) * (1.0 + k));
  t.a = 2.0 * complete_K(k * k) / std::numbers::pi;
  const JacobiTriple j = sncndn(t.a * z, k * k);
  const double r = std::sqrt(1.0 - (1.0 - t.kp) * j.sn * j.sn);
  t.omega = {std::sqrt(t.a * k * t.kp) * j.sn / r, std::sqrt(t.a * k) * j.cn / r,
             std::sqrt(t.a) * j.dn / r, std::sqrt(t.a * t.kp) / r};
  t.ic = {0.0, std::sqrt(t.a * k), std::sqrt(t.a), std::sqrt(t.a * t.kp)};
  const double e = (1.0 - t.kp) / k;
  t.alphas = {1.0, -1.0, -e, e};
  return t;
}

// A three-dimensional system with w1(0) = 0 solved by
// u1 = d1 sn(a v | m1), u2 = d2 cn, u3 = d3 dn.
struct Fit3Constants {
  double d1 = 0.0, d2 = 0.0, d3 = 0.0;
  double a = 0.0;
  double m1 = 0.0;
};

inline Fit3Constants fit3_constants(const EESParams& p) {
  detail::require(p.dimension() == 3, "fit3_constants needs a three-dimensional system");
  const auto& al = p.alphas();
  const auto& w = p.ic();
  detail::require(w[0] == 0.0, "fit3_constants needs u1(0) = 0");
  detail::require(w[1] != 0.0 && w[2] != 0.0, "fit3_constants needs u2(0), u3(0) nonzero");
  detail::require(al[0] * al[1] < 0.0 && al[0] * al[2] <= 0.0,
                  "alpha1 must differ in sign from alpha2 and alpha3");
  Fit3Constants f;
  f.d2 = w[1];
  f.d3 = w[2];
  f.d1 = std::sqrt(-al[0] / al[1]) * f.d2;
  f.a = al[0] * f.d2 * f.d3 / f.d1;
  f.m1 = al[2] * f.d2 * f.d2 / (al[1] * f.d3 * f.d3);
  return f;
}

inline std::array<double, 3> fit3_solution(double v, const Fit3Constants& f) {
  const JacobiTriple j = sncndn_any(f.a * v, f.m1);
  return {f.d1 * j.sn, f.d2 * j.cn, f.d3 * j.dn};
}

// The system (1, -(1 + n), -m, -n) with w(0) = (0, 1, 1, 1): w1 / w4 is
// sn(v | m - n), and the coordinates stay within the bounds below.
struct RatiosJacobiSystem {
  EESParams system;
  double jacobi_parameter = 0.0;
  double w1_max = 0.0;  // |w1| <= 1 / sqrt(1 + n)
  double w2_max = 1.0;  // |w2| <= 1
  double w3_min = 0.0;  // w3 >= sqrt(1 - m / (1 + n))
  double w4_min = 0.0;  // w4 >= sqrt(1 - n / (1 + n))
};

inline RatiosJacobiSystem ratios_jacobi_fixture(const MahlerParams4& p) {
  detail::require(std::isfinite(p.m) && std::isfinite(p.n), "m and n must be finite");
  detail::require(p.n >= 0.0 && p.n <= p.m && p.m - p.n < 1.0,
                  "ratios fixture needs 0 <= n <= m and m - n < 1");
  RatiosJacobiSystem r;
  r.system = EESParams({1.0, -(1.0 + p.n), -p.m, -p.n}, {0.0, 1.0, 1.0, 1.0});
  r.jacobi_parameter = p.m - p.n;
  r.w1_max = 1.0 / std::sqrt(1.0 + p.n);
  r.w3_min = std::sqrt(1.0 - p.m / (1.0 + p.n));
  r.w4_min = std::sqrt(1.0 - p.n / (1.0 + p.n));
  return r;
}

}  // namespace nees
