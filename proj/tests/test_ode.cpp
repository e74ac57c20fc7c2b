#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "nees/ees.hpp"
#include "nees/elliptic.hpp"
#include "nees/mahler4.hpp"
#include "nees/trajectory.hpp"

using namespace nees;

TEST(Ode, HarmonicOscillator) {
  const Trajectory t = integrate(EESParams({1.0, -1.0}, {0.0, 1.0}), 10.0);
  for (int k = 0; k <= 100; ++k) {
    const double v = 0.1 * k;
    const auto w = t.evaluate(v);
    EXPECT_NEAR(w[0], std::sin(v), 1e-11);
    EXPECT_NEAR(w[1], std::cos(v), 1e-11);
  }
}

TEST(Ode, DenseOutputBetweenNodes) {
  const Trajectory t = integrate(EESParams({1.0, -1.0}, {0.0, 1.0}), 10.0);
  ASSERT_GT(t.size(), 3u);
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    const double mid = 0.5 * (t.v(k) + t.v(k + 1));
    const auto w = t.evaluate(mid);
    EXPECT_NEAR(w[0], std::sin(mid), 1e-10);
    EXPECT_NEAR(w[1], std::cos(mid), 1e-10);
  }
}

TEST(Ode, NodeValuesAreReturnedExactly) {
  const Trajectory t = integrate(mahler4_system({0.8, 0.1}), 5.0);
  EXPECT_EQ(t.evaluate(0.0), (std::vector<double>{0.0, 1.0, 1.0, 1.0}));
  for (std::size_t k = 1; k + 1 < t.size(); k += 7) EXPECT_EQ(t.evaluate(t.v(k)), t.state(k));
}

TEST(Ode, JacobiSystemMatchesEllipticModule) {
  const double m = 0.5;
  const Trajectory t = integrate(EESParams({1.0, -1.0, -m}, {0.0, 1.0, 1.0}), 10.0);
  for (int k = 0; k <= 40; ++k) {
    const double u = 0.25 * k;
    const auto w = t.evaluate(u);
    const JacobiTriple j = sncndn(u, m);
    EXPECT_NEAR(w[0], j.sn, 1e-10);
    EXPECT_NEAR(w[1], j.cn, 1e-10);
    EXPECT_NEAR(w[2], j.dn, 1e-10);
  }
}

TEST(Ode, BackwardIntegration) {
  const Trajectory t = integrate(EESParams({1.0, -1.0}, {0.0, 1.0}), 0.0, -5.0);
  EXPECT_NEAR(t.evaluate(-5.0)[0], std::sin(-5.0), 1e-11);
  EXPECT_NEAR(t.evaluate(-2.5)[1], std::cos(-2.5), 1e-11);
}

TEST(Ode, TimeReversalReturnsInitialCondition) {
  const EESParams p({1.0, -1.0, 2.0, -0.5}, {0.0, 1.0, 1.0, 1.0});
  const double T = 10.0;
  const Trajectory fwd = integrate(p, T);
  const auto end = fwd.evaluate(T);
  const Trajectory back = integrate(EESParams(p.alphas(), end), T, 0.0);
  const auto w = back.evaluate(0.0);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(w[i], p.ic()[i], 1e-8);
}

TEST(Ode, HalvingToleranceDoesNotDegradeDrift) {
  for (const auto& p : {EESParams({1.0, -1.0, 2.0, -0.5}, {0.0, 1.0, 1.0, 1.0}),
                        mahler4_system({0.8, 0.1}), mahler4_system({0.5, -2.0})}) {
    IntegratorConfig a, b;
    a.rtol = 1e-10;
    b.rtol = 0.5e-10;
    const double da = integrate(p, 20.0, a).max_drift();
    const double db = integrate(p, 20.0, b).max_drift();
    EXPECT_LE(db, 2.0 * da + 1e-15);
  }
}

TEST(Ode, BlowUpReportsLocation) {
  // w' = w^2 from 1 escapes at v = 1.
  try {
    integrate(EESParams({1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}), 2.0);
    FAIL() << "expected a numerical_error";
  } catch (const numerical_error& e) {
    EXPECT_NEAR(e.where(), 1.0, 1e-3);
  }
}

TEST(Ode, OutOfRangeEvaluationThrows) {
  const Trajectory t = integrate(EESParams({1.0, -1.0}, {0.0, 1.0}), 1.0);
  EXPECT_THROW(t.evaluate(1.5), domain_error);
  EXPECT_THROW(t.evaluate(-0.1), domain_error);
}

TEST(Ode, OvershootMakesValuesIndependentOfSpan) {
  IntegratorConfig cfg;
  cfg.overshoot = true;
  const EESParams p = mahler4_system({0.8, 0.1});
  const Trajectory a = integrate(p, 3.0, cfg);
  const Trajectory b = integrate(p, 17.0, cfg);
  for (double v : {0.3, 1.7, 2.9, 3.0}) EXPECT_EQ(a.evaluate(v), b.evaluate(v));
}

TEST(Ode, ReportsStatistics) {
  const Trajectory t = integrate(mahler4_system({0.8, 0.1}), 20.0);
  const IntegrationStats& s = t.dense().stats();
  EXPECT_EQ(s.accepted + 1, t.size());
  EXPECT_GT(s.evaluations, s.accepted);
}
