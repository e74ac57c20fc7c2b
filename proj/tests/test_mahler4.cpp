#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/special_functions/ellint_1.hpp>
#include <gtest/gtest.h>

#include "nees/mahler4.hpp"
#include "nees/selftest.hpp"

using namespace nees;

namespace {

const std::vector<MahlerParams4> kSets{{0.8, 0.1}, {0.5, -2.0}, {0.5, 0.5}, {0.95, 0.95}};

void expect_values(const Mahler4Values& a, const Mahler4Values& b, double tol) {
  EXPECT_NEAR(a.sng, b.sng, tol);
  EXPECT_NEAR(a.cng, b.cng, tol);
  EXPECT_NEAR(a.dng, b.dng, tol);
  EXPECT_NEAR(a.fng, b.fng, tol);
}

// The m = n relation in tangent form: x = tan(t) / sqrt(1 - m + tan^2 t), t = sqrt(1 - m) v.
double sng_tan_form(double v, double m) {
  const double t = std::tan(std::sqrt(1.0 - m) * v);
  return t / std::sqrt(1.0 - m + t * t);
}

}  // namespace

TEST(ReductionConstants, KnownValues) {
  const ReductionConstants z = reduction_constants({0.37, 0.0});
  EXPECT_EQ(z.a, 1.0);
  EXPECT_EQ(z.A, 1.0);
  EXPECT_EQ(z.n1, 0.0);
  EXPECT_EQ(z.m1, 0.37);
  const ReductionConstants c = reduction_constants({0.5, -2.0});
  EXPECT_NEAR(c.a, std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(c.A, 1.0 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(c.n1, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(c.m1, 5.0 / 6.0, 1e-15);
  EXPECT_EQ(reduction_constants({0.4, 0.4}).m1, 0.0);
}

TEST(GeneralIvp, UnitInitialConditionGivesProp5) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(-3.0, 0.99);
  for (int i = 0; i < 20; ++i) {
    double m = U(rng), n = U(rng);
    if (n > m) std::swap(n, m);
    const ReductionConstants a = reduction_constants({m, n});
    const GeneralIvpConstants b = general_ivp_constants(1.0, 1.0, 1.0, {m, n});
    const double eps = 4.0 * std::numeric_limits<double>::epsilon();
    EXPECT_NEAR(a.a, b.a, eps * std::abs(a.a));
    EXPECT_NEAR(a.A, b.A, eps * std::abs(a.A));
    EXPECT_NEAR(a.n1, b.n1, eps * (1.0 + std::abs(a.n1)));
    EXPECT_NEAR(a.m1, b.m1, eps * (1.0 + std::abs(a.m1)));
  }
  EXPECT_EQ(general_ivp_constants(2.0, 0.5, 1.3, {0.7, 0.0}).n1, 0.0);
}

TEST(GeneralIvp, MatchesOde) {
  const MahlerParams4 p{0.3, 0.1};
  const EESParams sys({1.0, -1.0, -p.m, -p.n}, {0.0, 2.0, 1.0, 1.0});
  const Trajectory t = integrate(sys, 10.0, selftest::tight_config());
  for (int k = 0; k <= 20; ++k) {
    const double v = 0.5 * k;
    const auto w = t.evaluate(v);
    const auto c = general_ivp_solution(v, 2.0, 1.0, 1.0, p);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(c[i], w[i], 1e-9);
  }
}

TEST(Mahler4, ValuesAtZero) {
  for (const auto& p : kSets) {
    expect_values(mahler4_closed(0.0, p), {0.0, 1.0, 1.0, 1.0}, 0.0);
    expect_values(mahler4_direct(0.0, p), {0.0, 1.0, 1.0, 1.0}, 0.0);
  }
}

TEST(Mahler4, NZeroIsJacobi) {
  for (double v : {0.3, 2.0, -7.5}) {
    const JacobiTriple j = sncndn(v, 0.6);
    expect_values(mahler4_closed(v, {0.6, 0.0}), {j.sn, j.cn, j.dn, 1.0}, 1e-15);
    expect_values(mahler4_direct(v, {0.6, 0.0}), {j.sn, j.cn, j.dn, 1.0}, 1e-11);
  }
}

TEST(Mahler4, ClosedAndDirectMatchOde) {
  const MahlerParams4 p{0.8, 0.1};
  const Trajectory t = integrate(mahler4_system(p), 3.0, selftest::tight_config());
  const auto w = t.evaluate(0.7);
  expect_values(mahler4_closed(0.7, p), {w[0], w[1], w[2], w[3]}, 1e-10);
  expect_values(mahler4_direct(2.5, p), mahler4_closed(2.5, p), 1e-11);
}

TEST(Mahler4, PathEquivalenceOnReferenceSets) {
  unsigned seed = 100;
  for (const auto& p : kSets) EXPECT_LT(selftest::mahler4_triple_path(p, 100, 20.0, seed++), 1e-9);
}

// 10^4 random (v, m, n) with n <= m < 1.
TEST(Mahler4, QuadraticIdentities) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> V(-25.0, 25.0), P(-4.0, 0.999);
  for (int i = 0; i < 10000; ++i) {
    double m = P(rng), n = P(rng);
    if (n > m) std::swap(n, m);
    const Mahler4Values r = mahler4_direct(V(rng), {m, n});
    const double s2 = r.sng * r.sng;
    ASSERT_NEAR(r.cng * r.cng + s2, 1.0, 1e-12);
    ASSERT_NEAR(r.dng * r.dng + m * s2, 1.0, 1e-12);
    ASSERT_NEAR(r.fng * r.fng + n * s2, 1.0, 1e-12);
  }
}

TEST(Mahler4, DerivativeSystem) {
  const MahlerParams4 p{0.8, 0.1};
  const double h = 1e-5;
  for (double v : {0.4, 1.9, 5.2}) {
    const Mahler4Values a = mahler4_direct(v - h, p), b = mahler4_direct(v + h, p),
                        c = mahler4_direct(v, p);
    EXPECT_NEAR((b.sng - a.sng) / (2 * h), c.cng * c.dng * c.fng, 1e-8);
    EXPECT_NEAR((b.cng - a.cng) / (2 * h), -c.sng * c.dng * c.fng, 1e-8);
    EXPECT_NEAR((b.dng - a.dng) / (2 * h), -p.m * c.sng * c.cng * c.fng, 1e-8);
    EXPECT_NEAR((b.fng - a.fng) / (2 * h), -p.n * c.sng * c.cng * c.dng, 1e-8);
  }
}

TEST(Mahler4, ParityAndPeriodicity) {
  for (const auto& p : {MahlerParams4{0.8, 0.1}, MahlerParams4{0.5, 0.5}, MahlerParams4{0.3, 0.0}}) {
    const double V = g_period(p);
    for (double v : {0.3, 1.7, 4.4}) {
      const Mahler4Values x = mahler4_direct(v, p), y = mahler4_direct(-v, p);
      EXPECT_DOUBLE_EQ(y.sng, -x.sng);
      EXPECT_DOUBLE_EQ(y.cng, x.cng);
      EXPECT_DOUBLE_EQ(y.dng, x.dng);
      EXPECT_DOUBLE_EQ(y.fng, x.fng);
      const Mahler4Values q = mahler4_direct(v + 4.0 * V, p), h = mahler4_direct(v + 2.0 * V, p);
      EXPECT_NEAR(q.sng, x.sng, 1e-9);
      EXPECT_NEAR(q.cng, x.cng, 1e-9);
      EXPECT_NEAR(h.dng, x.dng, 1e-9);
      EXPECT_NEAR(h.fng, x.fng, 1e-9);
    }
  }
}

TEST(Taylor, LowOrderCoefficients) {
  const MahlerParams4 p{0.2, 0.1};
  const double v = 1e-2;
  const Mahler4Values t3 = mahler4_taylor(v, p, 3);
  EXPECT_NEAR((t3.sng - v) / (v * v * v), -1.3 / 6.0, 1e-12);
  const Mahler4Values c = mahler4_taylor(0.05, {0.0, 0.0}, 7);
  EXPECT_NEAR(c.sng, std::sin(0.05), 1e-15);
  EXPECT_NEAR(c.cng, std::cos(0.05), 1e-12);
  expect_values(mahler4_taylor(0.05, {0.8, 0.1}, 6), mahler4_direct(0.05, {0.8, 0.1}), 1e-8);
  EXPECT_THROW(mahler4_taylor(0.1, p, 8), domain_error);
}

TEST(Taylor, MatchesSeriesCoefficients) {
  const MahlerParams4 p{0.7, -0.4};
  const Mahler4Series s = mahler4_series(p, 8);
  EXPECT_NEAR(s.s[3], -(1.0 + p.m + p.n) / 6.0, 1e-15);
  EXPECT_NEAR(s.s[5], (1.0 + 14.0 * (p.m + p.n + p.m * p.n) + p.m * p.m + p.n * p.n) / 120.0, 1e-15);
  EXPECT_NEAR(s.c[4], (1.0 + 4.0 * p.m + 4.0 * p.n) / 24.0, 1e-15);
  const Mahler4Values t = mahler4_taylor(0.1, p, 7);
  EXPECT_NEAR(t.sng, detail::horner(std::vector<double>(s.s.begin(), s.s.begin() + 8), 0.1), 1e-16);
}

TEST(Taylor, EmpiricalBound) { EXPECT_LE(selftest::taylor_bound_ratio(), 1.0); }

TEST(Addition, SpecialArguments) {
  const MahlerParams4 p{0.8, 0.1};
  expect_values(mahler4_add(1.3, 0.0, p), mahler4_direct(1.3, p), 1e-15);
  expect_values(mahler4_add(0.4, 0.4, p), mahler4_direct(0.8, p), 1e-13);
  expect_values(mahler4_add(0.4, 0.4, p, -1), {0.0, 1.0, 1.0, 1.0}, 1e-15);
  expect_values(mahler4_add(0.9, 0.9, p), mahler4_double(0.9, p), 1e-15);
  expect_values(mahler4_double(0.0, p), {0.0, 1.0, 1.0, 1.0}, 0.0);
}

TEST(Addition, RandomPairs) {
  unsigned seed = 30;
  for (const auto& p : kSets) EXPECT_LT(selftest::mahler4_addition(p, 125, seed++), 1e-10);
}

TEST(Addition, NZeroIsJacobiAddition) {
  const double m = 0.6;
  const Mahler4Values d = mahler4_double(0.7, {m, 0.0});
  const JacobiTriple j = jacobi_add(0.7, 0.7, m);
  expect_values(d, {j.sn, j.cn, j.dn, 1.0}, 1e-13);
}

TEST(Half, RoundTripAndSpecialValues) {
  unsigned seed = 40;
  for (const auto& p : kSets) EXPECT_LT(selftest::mahler4_double_half(p, 50, seed++), 1e-11);
  expect_values(mahler4_half(0.0, {0.8, 0.1}), {0.0, 1.0, 1.0, 1.0}, 1e-15);
  for (double x : {0.9, -3.1, 11.0, 40.0})
    expect_values(mahler4_half(x, {0.8, 0.1}), mahler4_direct(0.5 * x, {0.8, 0.1}), 1e-11);
  const JacobiTriple j = sncndn(0.45, 0.6);
  expect_values(mahler4_half(0.9, {0.6, 0.0}), {j.sn, j.cn, j.dn, 1.0}, 1e-12);
}

TEST(ParticularCases, KnownValues) {
  EXPECT_DOUBLE_EQ(particular_case(1.0, ParticularCase::m_n_one).sng, 1.0 / std::sqrt(2.0));
  const double v = (std::numbers::pi / 4) / std::sqrt(0.5);
  EXPECT_NEAR(particular_case(v, ParticularCase::m_equals_n, 0.5).sng, 1.0 / std::sqrt(1.5), 1e-15);
  EXPECT_NEAR(mahler4_direct(v, {0.5, 0.5}).sng, 1.0 / std::sqrt(1.5), 1e-13);
}

TEST(ParticularCases, TanFormWithinPrincipalBranch) {
  for (double m : {0.5, 0.95, -1.0}) {
    const double reach = 0.999 * (std::numbers::pi / 2) / std::sqrt(1.0 - m);
    for (int k = -20; k <= 20; ++k) {
      const double v = reach * k / 20.0;
      EXPECT_NEAR(sng_tan_form(v, m), mahler4_direct(v, {m, m}).sng, 1e-12);
      EXPECT_NEAR(sng_tan_form(v, m), particular_case(v, ParticularCase::m_equals_n, m).sng, 1e-12);
    }
  }
}

TEST(ParticularCases, AgreeWithDirect) {
  for (int k = 0; k < 20; ++k) {
    const double v = -9.5 + k;
    expect_values(particular_case(v, ParticularCase::n_zero, 0.7), mahler4_direct(v, {0.7, 0.0}),
                  1e-11);
    expect_values(particular_case(v, ParticularCase::m_zero, -0.6), mahler4_direct(v, {0.0, -0.6}),
                  1e-11);
    expect_values(particular_case(v, ParticularCase::m_one, 0.3), mahler4_direct(v, {1.0, 0.3}),
                  1e-11);
    expect_values(particular_case(v, ParticularCase::m_equals_n, 0.95),
                  mahler4_direct(v, {0.95, 0.95}), 1e-11);
    expect_values(particular_case(v, ParticularCase::m_n_zero), mahler4_direct(v, {0.0, 0.0}),
                  1e-11);
    const double r = std::sqrt(1.0 + v * v);
    expect_values(particular_case(v, ParticularCase::m_n_one), {v / r, 1 / r, 1 / r, 1 / r}, 1e-15);
  }
}

TEST(ParticularCases, MOneAgainstOde) {
  const Trajectory t = integrate(mahler4_system({1.0, 0.3}), 6.0, selftest::tight_config());
  for (double v : {0.5, 2.0, 6.0}) {
    const auto w = t.evaluate(v);
    expect_values(particular_case(v, ParticularCase::m_one, 0.3), {w[0], w[1], w[2], w[3]}, 1e-11);
  }
}

TEST(JacobiFromMahler, Values) {
  const JacobiTriple z = jacobi_from_mahler(0.0, {0.8, 0.1});
  EXPECT_EQ(z.sn, 0.0);
  EXPECT_EQ(z.cn, 1.0);
  const ReductionConstants c = reduction_constants({0.8, 0.1});
  const JacobiTriple a = jacobi_from_mahler(0.6, {0.8, 0.1}), b = sncndn(c.a * 0.6, c.m1);
  EXPECT_NEAR(a.sn, b.sn, 1e-13);
  EXPECT_NEAR(a.cn, b.cn, 1e-13);
  EXPECT_NEAR(a.dn, b.dn, 1e-13);
  const JacobiTriple n0 = jacobi_from_mahler(1.1, {0.5, 0.0}), r = sncndn(1.1, 0.5);
  EXPECT_NEAR(n0.sn, r.sn, 1e-12);
}

TEST(Amplitude, GeneralizedAmplitude) {
  EXPECT_EQ(amg(0.0, {0.8, 0.1}), 0.0);
  for (double v : {0.4, 3.0, -7.0}) EXPECT_NEAR(amg(v, {0.6, 0.0}), am(v, 0.6), 1e-12);
  std::mt19937_64 rng(50);
  std::uniform_real_distribution<double> V(-20.0, 20.0);
  for (int i = 0; i < 50; ++i) {
    const double v = V(rng);
    const double phi = amg(v, {0.8, 0.1});
    const Mahler4Values c = mahler4_closed(v, {0.8, 0.1});
    EXPECT_NEAR(std::sin(phi), c.sng, 1e-10);
    EXPECT_NEAR(std::cos(phi), c.cng, 1e-10);
  }
  expect_values(mahler4_from_amplitude(2.2, {0.5, -2.0}), mahler4_direct(2.2, {0.5, -2.0}), 1e-10);
}

TEST(Amplitude, QuadratureAndPeriod) {
  EXPECT_NEAR(g_period({0.0, 0.0}), std::numbers::pi / 2, 1e-15);
  EXPECT_EQ(g_quadrature(0.0, {0.8, 0.1}), 0.0);
  for (const auto& p : kSets) EXPECT_LT(selftest::g_period_vs_agm(p), 1e-13);
  EXPECT_NEAR(g_quadrature(1.0, {0.7, 0.0}), boost::math::ellint_1(std::sqrt(0.7), 1.0), 1e-14);
}

TEST(Amplitude, PeriodSeries) {
  EXPECT_DOUBLE_EQ(g_period_series({0.0, 0.0}), std::numbers::pi / 2);
  const double m = 0.1;
  const double head = std::numbers::pi / 2 * (1.0 + m / 4 + 9 * m * m / 64 + 25 * m * m * m / 256);
  EXPECT_NEAR(g_period_series({m, 0.0}), head, 2e-5);
  const MahlerParams4 p{0.05, 0.02};
  EXPECT_LT(std::abs(g_period_series(p) / g_period(p) - 1.0), 1e-6);
}

TEST(ThetaSimilar, InitialValuesAndSystem) {
  const double k = std::sqrt(0.95);
  const ThetaSimilarValues t = theta_similar(0.0, k);
  EXPECT_EQ(t.omega[0], 0.0);
  EXPECT_NEAR(t.omega[1], std::sqrt(t.a * k), 1e-15);
  EXPECT_NEAR(t.omega[2], std::sqrt(t.a), 1e-15);
  EXPECT_NEAR(t.omega[3], std::sqrt(t.a * t.kp), 1e-15);
  const EESParams sys({t.alphas.begin(), t.alphas.end()}, {t.ic.begin(), t.ic.end()});
  const Trajectory tr = integrate(sys, 10.0, selftest::tight_config());
  for (double z : {0.5, 3.0, 9.5}) {
    const auto w = tr.evaluate(z);
    const ThetaSimilarValues c = theta_similar(z, k);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(c.omega[i], w[i], 1e-11);
  }
}

TEST(ThetaSimilar, RatiosAreJacobiFunctions) {
  const double k = 0.6;
  for (double z : {0.2, 1.1, 2.7}) {
    const ThetaSimilarValues t = theta_similar(z, k);
    const JacobiTriple j = sncndn(t.a * z, k * k);
    // w1 / w4 = sqrt(k) sn, w2 / w4 = sqrt(k / k') cn, w3 / w4 = dn / sqrt(k')
    EXPECT_NEAR(t.omega[0] / t.omega[3], std::sqrt(k) * j.sn, 1e-14);
    EXPECT_NEAR(t.omega[1] / t.omega[3], std::sqrt(k / t.kp) * j.cn, 1e-14);
    EXPECT_NEAR(t.omega[2] / t.omega[3], j.dn / std::sqrt(t.kp), 1e-14);
  }
}

TEST(Fit3, JacobiCaseAndOde) {
  const Fit3Constants f = fit3_constants(EESParams({1.0, -1.0, -0.4}, {0.0, 1.0, 1.0}));
  EXPECT_EQ(f.d1, 1.0);
  EXPECT_EQ(f.d2, 1.0);
  EXPECT_EQ(f.d3, 1.0);
  EXPECT_EQ(f.a, 1.0);
  EXPECT_DOUBLE_EQ(f.m1, 0.4);
  const EESParams p({2.0, -0.5, -1.5}, {0.0, 1.3, 0.8});
  const Fit3Constants g = fit3_constants(p);
  const Trajectory t = integrate(p, 5.0, selftest::tight_config());
  for (double v : {0.5, 2.5, 5.0}) {
    const auto w = t.evaluate(v);
    const auto c = fit3_solution(v, g);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(c[i], w[i], 1e-10);
  }
}

TEST(Fit3, ReducedMahlerSystemMatchesProp5) {
  const MahlerParams4 p{0.8, 0.1};
  const GlashierReduction g = glashier_reduce(mahler4_system(p), 3);
  const Fit3Constants f = fit3_constants(g.system);
  EXPECT_NEAR(f.m1, reduction_constants(p).m1, 1e-15);
}

TEST(RatiosJacobi, BoundsAndModulus) {
  const MahlerParams4 p{0.8, 0.3};
  const RatiosJacobiSystem r = ratios_jacobi_fixture(p);
  const Trajectory t = integrate(r.system, 20.0, selftest::tight_config());
  EXPECT_LT(t.max_drift(), 1e-9);
  for (std::size_t k = 0; k < t.size(); ++k) {
    const auto w = t.state(k);
    EXPECT_LE(std::abs(w[0]), r.w1_max + 1e-12);
    EXPECT_LE(std::abs(w[1]), r.w2_max + 1e-12);
    EXPECT_GE(w[2], r.w3_min - 1e-12);
    EXPECT_GE(w[3], r.w4_min - 1e-12);
    EXPECT_NEAR(w[0] / w[3], sncndn(t.v(k), r.jacobi_parameter).sn, 1e-10);
  }
}

TEST(Mahler4, RejectsOutsideDomain) {
  EXPECT_THROW(mahler4_direct(1.0, {0.1, 0.5}), domain_error);
  EXPECT_THROW(mahler4_direct(1.0, {1.5, 0.0}), domain_error);
  EXPECT_THROW(mahler4_direct(NAN, {0.5, 0.0}), domain_error);
  EXPECT_THROW(amg(1.0, {1.0, 0.0}), domain_error);
}
