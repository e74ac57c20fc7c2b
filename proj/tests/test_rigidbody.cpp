#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "nees/rigidbody.hpp"
#include "nees/selftest.hpp"

using namespace nees;

namespace {

const InertiaParams kBody{1.0, 2.0, 3.0};
constexpr double kM = 1.0;
constexpr double kH = 5.0 / 24.0;

AndoyerState start(const RBConstants& k) {
  AndoyerState x;
  x.nu = std::numbers::pi / 2;
  x.N = k.R;
  x.M = k.M;
  return x;
}

}  // namespace

TEST(RigidBody, HamiltonianSimpleCases) {
  AndoyerState x;
  x.M = 2.0;
  x.N = 0.0;
  x.nu = 0.0;
  EXPECT_DOUBLE_EQ(rb_hamiltonian(x, kBody), 0.5 * 0.5 * 4.0);
  x.nu = std::numbers::pi / 2;
  EXPECT_DOUBLE_EQ(rb_hamiltonian(x, kBody), 0.5 * 1.0 * 4.0);
  x.N = 2.0;
  EXPECT_DOUBLE_EQ(rb_hamiltonian(x, kBody), 0.5 * 4.0 / 3.0);
}

TEST(RigidBody, SymmetricBodyKeepsN) {
  const InertiaParams I{1.5, 1.5, 2.0};
  AndoyerState x;
  x.nu = 0.7;
  x.N = 0.4;
  EXPECT_EQ(rb_rhs(x, I).N_dot, 0.0);
  const RBConstants k = rb_constants(I, 1.0, 0.3);
  EXPECT_EQ(k.n_star, 0.0);
  EXPECT_EQ(k.m, 0.0);
  EXPECT_DOUBLE_EQ(rb_mu_pi(2.0, k, I), 2.0 / 1.5);
  EXPECT_NEAR(rb_mu(2.0, k, I), 2.0 / 1.5, 1e-13);
}

TEST(RigidBody, ConstantsAtRegimeBoundary) {
  // d = 1/C gives m = 0.
  const RBConstants k = rb_constants(kBody, 1.0, 0.5 / 3.0);
  EXPECT_NEAR(k.m, 0.0, 1e-15);
  const RBConstants g = rb_constants(kBody, kM, kH);
  EXPECT_DOUBLE_EQ(g.d, 5.0 / 12.0);
  EXPECT_DOUBLE_EQ(g.n_star, 3.0);
  EXPECT_NEAR(g.m, 3.0 / 7.0, 1e-15);
  EXPECT_GT(g.R, 0.0);
  EXPECT_GT(g.s, 0.0);
}

TEST(RigidBody, SolutionAtZeroAndEnergy) {
  const RBConstants k = rb_constants(kBody, kM, kH);
  const RbSolution x = rb_solution(0.0, k);
  EXPECT_EQ(x.sin_nu, 1.0);
  EXPECT_EQ(x.cos_nu, 0.0);
  EXPECT_EQ(x.N, k.R);
  EXPECT_NEAR(rb_hamiltonian(start(k), kBody), kH, 1e-15);
  for (double t : {0.5, 3.0, 11.0}) {
    const RbSolution y = rb_solution(t, k);
    EXPECT_NEAR(y.sin_nu * y.sin_nu + y.cos_nu * y.cos_nu, 1.0, 1e-14);
    AndoyerState s = start(k);
    s.nu = std::atan2(y.sin_nu, y.cos_nu);
    s.N = y.N;
    EXPECT_NEAR(rb_hamiltonian(s, kBody), kH, 1e-14);
  }
}

TEST(RigidBody, ClosedFormMatchesIntegration) {
  const RBConstants k = rb_constants(kBody, kM, kH);
  const DenseSolution sol = rb_integrate(start(k), kBody, 12.0, selftest::tight_config());
  for (int i = 0; i <= 24; ++i) {
    const double t = 0.5 * i;
    const std::vector<double> y = sol(t);
    const RbSolution c = rb_solution(t, k);
    EXPECT_NEAR(c.sin_nu, std::sin(y[0]), 1e-8);
    EXPECT_NEAR(c.cos_nu, std::cos(y[0]), 1e-8);
    EXPECT_NEAR(c.N, y[1], 1e-8);
    EXPECT_NEAR(rb_nu(t, k), y[0], 1e-8);
    EXPECT_NEAR(rb_mu(t, k, kBody), y[2], 1e-8);
    EXPECT_NEAR(rb_mu_pi(t, k, kBody), y[2], 1e-8);
  }
}

TEST(RigidBody, ReportOverOnePeriod) {
  for (double h : {kH, 0.18, 0.24}) {
    const selftest::RigidBodyReport r = selftest::rigid_body(kBody, kM, h);
    EXPECT_LT(r.solution, 1e-8) << h;
    EXPECT_LT(r.energy, 1e-10) << h;
    EXPECT_LT(r.separated, 1e-8) << h;
    EXPECT_LT(r.mu, 1e-8) << h;
    EXPECT_LT(r.amg_form, 1e-8) << h;
    EXPECT_LT(r.mahler_form, 1e-10) << h;
  }
}

TEST(RigidBody, TimeShiftInvertsNu) {
  const RBConstants k = rb_constants(kBody, kM, kH);
  for (double t : {0.0, 0.7, 2.9, 6.4}) EXPECT_NEAR(rb_time_shift(rb_nu(t, k), k), t, 1e-11);
}

TEST(RigidBody, AlternativeConstants) {
  const RBAltConstants a = rb_alt_constants(kBody, kM, kH);
  const double a1 = 1.0, a2 = 0.5, a3 = 1.0 / 3.0, d = 5.0 / 12.0;
  EXPECT_DOUBLE_EQ(a.n1, (a1 - a2) / (d - a2));
  EXPECT_DOUBLE_EQ(a.m1, (a1 - a2) / (a3 - a2));
  EXPECT_DOUBLE_EQ(a.Omega, (d - a2) * (a3 - a2));
  EXPECT_DOUBLE_EQ(a.rate, kM * std::sqrt(a.Omega));
  const MahlerParams4 p = rb_alt_mahler(a);
  EXPECT_LE(p.n, p.m);
  EXPECT_DOUBLE_EQ(rb_nu_amg(0.0, a), std::numbers::pi / 2);
}

TEST(RigidBody, MahlerFormAmplitudes) {
  const RBConstants k = rb_constants(kBody, kM, kH);
  const RbMahlerForm f = rb_mahler_form(k, kBody);
  EXPECT_DOUBLE_EQ(f.A1, 1.0);
  EXPECT_DOUBLE_EQ(f.A3, k.R);
  EXPECT_NEAR(std::abs(f.A2), 1.0, 1e-12);
  const double a1 = 1.0, a2 = 0.5, a3 = 1.0 / 3.0;
  EXPECT_DOUBLE_EQ(f.params.m, (a1 - a2) / (a1 - k.d));
  EXPECT_DOUBLE_EQ(f.params.n, (a1 - a2) / (a1 - a3));
}

TEST(RigidBody, RejectsOtherRegimes) {
  EXPECT_THROW(rb_constants(kBody, kM, 0.3), domain_error);   // d = 0.6 > 1/B
  EXPECT_THROW(rb_constants(kBody, kM, 0.1), domain_error);   // d = 0.2 < 1/C
  EXPECT_THROW(rb_constants({2.0, 1.0, 3.0}, kM, kH), domain_error);
  EXPECT_THROW(rb_constants({1.0, 1.0, 3.0}, kM, kH), domain_error);
  EXPECT_THROW(rb_constants({1.0, 2.0, 2.0}, kM, kH), domain_error);
  EXPECT_THROW(rb_constants(kBody, -1.0, kH), domain_error);
}
