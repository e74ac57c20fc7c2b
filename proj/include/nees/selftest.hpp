#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "nees/ees.hpp"
#include "nees/elliptic.hpp"
#include "nees/mahler4.hpp"
#include "nees/mahler5.hpp"
#include "nees/rigidbody.hpp"
#include "nees/trajectory.hpp"

namespace nees::selftest {

struct CheckResult {
  std::string name;
  double value = 0.0;      // measured error (or ratio to a bound)
  double tolerance = 0.0;  // threshold before scaling
  bool passed = false;
  double seconds = 0.0;
  std::string note;
};

inline nlohmann::json to_json(const CheckResult& r) {
  return {{"name", r.name},          {"value", r.value},     {"tolerance", r.tolerance},
          {"passed", r.passed},      {"seconds", r.seconds}, {"note", r.note}};
}

// Runs body, which returns the measured error, and compares it with
// tolerance * scale. Exceptions count as failures.
inline CheckResult run_check(const std::string& name, double tolerance, double scale,
                             const std::function<double(std::string&)>& body) {
  CheckResult r;
  r.name = name;
  r.tolerance = tolerance;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    r.value = body(r.note);
    r.passed = std::isfinite(r.value) && r.value <= tolerance * scale;
  } catch (const std::exception& e) {
    r.value = std::numeric_limits<double>::infinity();
    r.note = std::string("exception: ") + e.what();
    r.passed = false;
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

inline double max_diff(const Mahler4Values& a, const Mahler4Values& b) {
  return std::max({std::abs(a.sng - b.sng), std::abs(a.cng - b.cng), std::abs(a.dng - b.dng),
                   std::abs(a.fng - b.fng)});
}

inline double max_diff(const Mahler5Values& a, const Mahler5Values& b) {
  return std::max({std::abs(a.Sng - b.Sng), std::abs(a.Cng - b.Cng), std::abs(a.Dng - b.Dng),
                   std::abs(a.Fng - b.Fng), std::abs(a.Hng - b.Hng)});
}

inline IntegratorConfig tight_config() {
  IntegratorConfig cfg;
  cfg.rtol = 1e-13;
  cfg.atol = 1e-15;
  return cfg;
}

// Reference parameter sets: a generic 4-EES, theta-similar, 4- and 5-Mahler.
struct ReferenceSet {
  std::string name;
  EESParams params;
};

inline std::vector<ReferenceSet> reference_sets() {
  const ThetaSimilarValues ts = theta_similar(0.0, std::sqrt(0.95));
  return {
      {"generic 4-EES alpha=(1,-1,2,-0.5)", EESParams({1.0, -1.0, 2.0, -0.5}, {0.0, 1.0, 1.0, 1.0})},
      {"theta-similar k^2=0.95", EESParams({ts.alphas.begin(), ts.alphas.end()},
                                           {ts.ic.begin(), ts.ic.end()})},
      {"4-Mahler (m,n)=(0.8,0.1)", mahler4_system({0.8, 0.1})},
      {"4-Mahler (m,n)=(0.5,-2)", mahler4_system({0.5, -2.0})},
      {"4-Mahler (m,n)=(0.5,0.5)", mahler4_system({0.5, 0.5})},
      {"4-Mahler (m,n)=(0.95,0.95)", mahler4_system({0.95, 0.95})},
      {"5-Mahler (p,n,m)=(0.2,0.4,0.7)", mahler5_system({0.2, 0.4, 0.7})},
      {"5-Mahler (p,n,m)=(-2,-1,0.4)", mahler5_system({-2.0, -1.0, 0.4})},
  };
}

inline const std::vector<MahlerParams4>& mahler4_sets() {
  static const std::vector<MahlerParams4> sets{{0.8, 0.1}, {0.5, -2.0}, {0.5, 0.5}, {0.95, 0.95}};
  return sets;
}

// ---- individual checks -------------------------------------------------

// Max relative first-integral drift over [0, span] at rtol 1e-12, and the
// slowest run time in seconds.
struct ConservationReport {
  double drift = 0.0;
  double seconds = 0.0;
};

inline ConservationReport conservation(const EESParams& p, double span) {
  IntegratorConfig cfg;
  cfg.rtol = 1e-12;
  cfg.atol = 1e-14;
  const auto t0 = std::chrono::steady_clock::now();
  const Trajectory t = integrate(p, span, cfg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {t.max_drift(), secs};
}

// Jacobi identities at random (u, m), m in [-5, 1).
inline double jacobi_identities(int count, unsigned seed = 1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-50.0, 50.0), Mp(-5.0, 0.999);
  double err = 0.0;
  for (int i = 0; i < count; ++i) {
    const JacobiTriple j = sncndn(U(rng), Mp(rng));
    err = std::max(err, std::abs(j.sn * j.sn + j.cn * j.cn - 1.0));
    err = std::max(err, std::abs(j.dn * j.dn + j.m * j.sn * j.sn - 1.0));
  }
  return err;
}

// sn, cn, dn for parameter m (any real) against the 3-EES (1, -1, -m).
inline double jacobi_vs_ode(double m, double span, int points) {
  const Trajectory t = integrate(EESParams({1.0, -1.0, -m}, {0.0, 1.0, 1.0}), span, tight_config());
  double err = 0.0;
  for (int i = 0; i <= points; ++i) {
    const double u = span * i / points;
    const std::vector<double> w = t.evaluate(u);
    const JacobiTriple j = sncndn_any(u, m);
    err = std::max({err, std::abs(j.sn - w[0]), std::abs(j.cn - w[1]), std::abs(j.dn - w[2])});
  }
  return err;
}

// Landen step and addition theorem against the 3-EES for parameter m.
inline double landen_addition_vs_ode(double m, double span, int points) {
  const Trajectory t = integrate(EESParams({1.0, -1.0, -m}, {0.0, 1.0, 1.0}), span, tight_config());
  double err = 0.0;
  for (int i = 0; i <= points; ++i) {
    const double u = span * i / points;
    const std::vector<double> w = t.evaluate(u);
    const LandenStep L = landen_descend(u, m);
    const JacobiTriple a = jacobi_add(0.37 * u, 0.63 * u, m);
    err = std::max({err, std::abs(L.value.sn - w[0]), std::abs(L.value.cn - w[1]),
                    std::abs(L.value.dn - w[2]), std::abs(L.dn_from_double - w[2]),
                    std::abs(a.sn - w[0]), std::abs(a.cn - w[1]), std::abs(a.dn - w[2])});
  }
  return err;
}

// Closed form, direct algorithm and dense ODE, pairwise, at random v in [0, span].
inline double mahler4_triple_path(const MahlerParams4& p, int count, double span, unsigned seed) {
  const Trajectory t = integrate(mahler4_system(p), span, tight_config());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> V(0.0, span);
  double err = 0.0;
  for (int i = 0; i < count; ++i) {
    const double v = V(rng);
    const std::vector<double> w = t.evaluate(v);
    const Mahler4Values o{w[0], w[1], w[2], w[3]};
    const Mahler4Values c = mahler4_closed(v, p);
    const Mahler4Values d = mahler4_direct(v, p);
    err = std::max({err, max_diff(c, d), max_diff(c, o), max_diff(d, o)});
  }
  return err;
}

// Quadratic identities of the Mahler functions along the direct path.
inline double mahler4_identities(const MahlerParams4& p, int count, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> V(-30.0, 30.0);
  double err = 0.0;
  for (int i = 0; i < count; ++i) {
    const Mahler4Values r = mahler4_direct(V(rng), p);
    const double s2 = r.sng * r.sng;
    err = std::max({err, std::abs(r.cng * r.cng + s2 - 1.0),
                    std::abs(r.dng * r.dng + p.m * s2 - 1.0),
                    std::abs(r.fng * r.fng + p.n * s2 - 1.0)});
  }
  return err;
}

// Addition theorem at random (x, y) against the direct values at x + y and x - y.
inline double mahler4_addition(const MahlerParams4& p, int count, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> X(-10.0, 10.0);
  double err = 0.0;
  for (int i = 0; i < count; ++i) {
    const double x = X(rng), y = X(rng);
    err = std::max(err, max_diff(mahler4_add(x, y, p, 1), mahler4_direct(x + y, p)));
    err = std::max(err, max_diff(mahler4_add(x, y, p, -1), mahler4_direct(x - y, p)));
  }
  return err;
}

// double(half(x)) against the direct values at x.
inline double mahler4_double_half(const MahlerParams4& p, int count, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> X(-20.0, 20.0);
  const ReductionConstants k = reduction_constants(p);
  double err = 0.0;
  for (int i = 0; i < count; ++i) {
    const double x = X(rng);
    err = std::max(err, max_diff(mahler4_double(mahler4_half(x, p), k), mahler4_direct(x, p)));
  }
  return err;
}

// Largest ratio |taylor(order 6) - direct| / (5 |v|^7 (1 + |m| + |n|)^3) on a
// 10 x 10 x 10 grid in (v, m, n) with n <= m.
inline double taylor_bound_ratio() {
  double worst = 0.0;
  for (int iv = 1; iv <= 10; ++iv) {
    const double v = 0.01 * iv;
    for (int im = 0; im < 10; ++im) {
      const double m = -0.9 + 0.2 * im;
      for (int in = 0; in < 10; ++in) {
        const double n = -2.0 + 0.3 * in;
        if (n > m) continue;
        const MahlerParams4 p{m, n};
        const double bound = 5.0 * std::pow(v, 7) * std::pow(1.0 + std::abs(m) + std::abs(n), 3);
        for (double s : {v, -v})
          worst = std::max(worst, max_diff(mahler4_taylor(s, p, 6), mahler4_direct(s, p)) / bound);
      }
    }
  }
  return worst;
}

// sin(amg) and cos(amg) against sng and cng.
inline double amplitude_vs_direct(const MahlerParams4& p, int count, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> V(-20.0, 20.0);
  double err = 0.0;
  for (int i = 0; i < count; ++i) {
    const double v = V(rng);
    const double phi = amg(v, p);
    const Mahler4Values d = mahler4_direct(v, p);
    err = std::max({err, std::abs(std::sin(phi) - d.sng), std::abs(std::cos(phi) - d.cng)});
  }
  return err;
}

// Relative error of the truncated double series for G(pi/2) on a grid of
// (n, m), 0 <= n <= m <= mmax with the given step.
inline double g_series_error(double mmax, double step, std::string* where = nullptr) {
  double worst = 0.0;
  const int k = static_cast<int>(std::lround(mmax / step));
  for (int i = 0; i <= k; ++i)
    for (int j = 0; j <= i; ++j) {
      const MahlerParams4 p{step * i, step * j};
      const double e = std::abs(g_period_series(p) / g_period(p) - 1.0);
      if (e > worst) {
        worst = e;
        if (where) *where = "worst at (n,m)=(" + std::to_string(p.n) + "," + std::to_string(p.m) + ")";
      }
    }
  return worst;
}

// Quarter period by quadrature against K(m1) / a.
inline double g_period_vs_agm(const MahlerParams4& p) {
  const ReductionConstants k = reduction_constants(p);
  return std::abs(g_period(p) - complete_K(k.m1) / k.a);
}

// 5-Mahler with p = 0 against the 4-Mahler functions at random (w, n, m).
inline double mahler5_p_zero(int count, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> W(-10.0, 10.0), P(0.0, 0.95);
  double err = 0.0;
  for (int i = 0; i < count; ++i) {
    double m = P(rng), n = P(rng);
    if (n > m) std::swap(n, m);
    const double w = W(rng);
    const Mahler5Values a = mahler5_eval(w, {0.0, n, m});
    const Mahler4Values b = mahler4_direct(w, {m, n});
    err = std::max(err, max_diff(a, Mahler5Values{b.sng, b.cng, b.dng, b.fng, 1.0}));
  }
  return err;
}

// Reduced system in v* plus v(v*) against the direct 5-EES run.
inline double omega5_regularization(const MahlerParams5& q, double vstar_span) {
  const Omega5Regularization reg = regularize_omega5(mahler5_system(q));
  const Omega5Reconstruction rec(reg, vstar_span);
  double vmax = 0.0;
  for (std::size_t k = 0; k < rec.dense().size(); ++k) vmax = std::max(vmax, rec.node(k).v);
  const Mahler5Evaluator ev(q, vmax);
  double err = 0.0;
  for (std::size_t k = 0; k < rec.dense().size(); ++k) {
    const auto pt = rec.node(k);
    const Mahler5Values d = ev(pt.v);
    err = std::max(err, max_diff(d, Mahler5Values{pt.omega[0], pt.omega[1], pt.omega[2],
                                                  pt.omega[3], pt.omega[4]}));
  }
  return err;
}

// Functions from the generalized amplitude against the direct 5-EES run.
inline double mahler5_amplitude_path(const MahlerParams5& q, double span, int points) {
  const Mahler5Evaluator ev(q, span);
  double err = 0.0;
  for (int i = 0; i <= points; ++i) {
    const double w = -span + 2.0 * span * i / points;
    err = std::max(err, max_diff(ev(w), mahler5_from_amplitude(w, q)));
  }
  return err;
}

// p = n chain against the direct 5-EES run.
inline double pn_chain(double n, double m, double span, int points) {
  const Mahler5Evaluator ev({n, n, m}, span);
  double err = 0.0;
  for (int i = 1; i <= points; ++i) {
    const double w = span * i / points;
    err = std::max(err, max_diff(ev(w), pn_case(w, n, m).values));
  }
  return err;
}

// Pi(Amg(w; n, n, m); n, m) = w.
inline double pi_amg_roundtrip(double n, double m, double span, int points) {
  double err = 0.0;
  for (int i = 0; i <= points; ++i) {
    const double w = -span + 2.0 * span * i / points;
    err = std::max(err, std::abs(legendre_pi(Amg(w, {n, n, m}), n, m) - w));
  }
  return err;
}

// Pi(phi, 0, m) against the Jacobi amplitude, and the E identity.
inline double legendre_identities() {
  double err = 0.0;
  for (double m : {-2.0, 0.0, 0.3, 0.7, 0.95})
    for (double u : {-3.0, 0.2, 1.0, 2.5, 7.0}) {
      err = std::max(err, std::abs(legendre_pi(am(u, m), 0.0, m) - u));
      if (m >= 0.0) {
        const double phi = 0.4 * u;
        const double s = std::sin(phi);
        const double rhs = (1.0 - m) * legendre_pi(phi, m, m) +
                           m * std::sin(2.0 * phi) / (2.0 * std::sqrt(1.0 - m * s * s));
        err = std::max(err, std::abs(legendre_E(phi, m) - rhs));
      }
    }
  return err;
}

// Rigid body: classical solution, energy drift, separated relation and the
// two mu formulas against the integrated equations of motion.
struct RigidBodyReport {
  double solution = 0.0;
  double energy = 0.0;
  double separated = 0.0;
  double mu = 0.0;
  double amg_form = 0.0;
  double mahler_form = 0.0;
};

inline RigidBodyReport rigid_body(const InertiaParams& I, double M, double h) {
  const RBConstants k = rb_constants(I, M, h);
  const RBAltConstants alt = rb_alt_constants(I, M, h);
  const RbMahlerForm f = rb_mahler_form(k, I);
  const double period = 4.0 * complete_K(k.m) / k.s;
  AndoyerState x0;
  x0.nu = std::numbers::pi / 2;
  x0.N = k.R;
  x0.M = M;
  const DenseSolution sol = rb_integrate(x0, I, period, tight_config());
  RigidBodyReport r;
  const double h0 = rb_hamiltonian(x0, I);
  for (std::size_t i = 0; i < sol.size(); ++i) {
    AndoyerState x = x0;
    x.nu = sol.state(i)[0];
    x.N = sol.state(i)[1];
    r.energy = std::max(r.energy, std::abs(rb_hamiltonian(x, I) - h0) / std::abs(h0));
  }
  const int points = 30;
  for (int i = 0; i <= points; ++i) {
    const double t = period * i / points;
    const std::vector<double> y = sol(t);
    const RbSolution c = rb_solution(t, k);
    r.solution = std::max({r.solution, std::abs(c.sin_nu - std::sin(y[0])),
                           std::abs(c.cos_nu - std::cos(y[0])), std::abs(c.N - y[1])});
    AndoyerState x = x0;
    x.nu = y[0];
    x.N = y[1];
    const double s2 = std::sin(y[0]) * std::sin(y[0]);
    const double lhs = alt.rate * std::sqrt((1.0 - alt.n1 * s2) * (1.0 - alt.m1 * s2));
    r.separated = std::max(r.separated, std::abs(lhs - std::abs(rb_rhs(x, I).nu_dot)));
    r.mu = std::max({r.mu, std::abs(rb_mu(t, k, I) - y[2]), std::abs(rb_mu_pi(t, k, I) - y[2])});
    r.amg_form = std::max(r.amg_form, std::abs(rb_nu_amg(t, alt) - y[0]));
    const RbSolution mf = rb_solution_mahler(t, f);
    r.mahler_form = std::max({r.mahler_form, std::abs(mf.sin_nu - c.sin_nu),
                              std::abs(mf.cos_nu - c.cos_nu), std::abs(mf.N - c.N)});
  }
  return r;
}

// Spans over which the theta-ratio fixtures are integrated; the unbounded
// ones escape to infinity in finite time.
inline double theta_fixture_span(ThetaFixture tag) {
  switch (tag) {
    case ThetaFixture::bounded1:
    case ThetaFixture::bounded2:
      return 20.0;
    case ThetaFixture::unbounded1:
    case ThetaFixture::unbounded2:
      return 0.5;
  }
  return 0.0;
}

inline double theta_fixtures_drift(double k) {
  double d = 0.0;
  for (ThetaFixture tag : {ThetaFixture::bounded1, ThetaFixture::bounded2,
                           ThetaFixture::unbounded1, ThetaFixture::unbounded2})
    d = std::max(d, conservation(theta_ratio_fixture(tag, k), theta_fixture_span(tag)).drift);
  return d;
}

// ---- suites ------------------------------------------------------------

inline std::vector<CheckResult> run_selftest(bool full, double scale = 1.0) {
  std::vector<CheckResult> out;
  auto add = [&](const std::string& name, double tol, const std::function<double(std::string&)>& f) {
    out.push_back(run_check(name, tol, scale, f));
  };

  add("jacobi sn^2+cn^2=1, dn^2+m sn^2=1", 1e-12,
      [](std::string&) { return jacobi_identities(2000); });
  add("K(0) = pi/2", 1e-15, [](std::string&) {
    return std::abs(complete_K(0.0) - std::numbers::pi / 2);
  });
  add("jacobi functions vs 3-EES, m = 0.7, -2.5, 1, 1.6", 1e-10, [](std::string&) {
    return std::max({jacobi_vs_ode(0.7, 10.0, 40), jacobi_vs_ode(-2.5, 10.0, 40),
                     jacobi_vs_ode(1.0, 5.0, 20), jacobi_vs_ode(1.6, 10.0, 40)});
  });
  add("mahler quadratic identities", 1e-12, [](std::string&) {
    double e = 0.0;
    for (const auto& p : mahler4_sets()) e = std::max(e, mahler4_identities(p, 100, 3));
    return e;
  });
  add("mahler closed = direct = ODE, (m,n)=(0.8,0.1)", 1e-9,
      [](std::string&) { return mahler4_triple_path({0.8, 0.1}, 20, 20.0, 5); });
  add("mahler addition theorem", 1e-10, [](std::string&) {
    double e = 0.0;
    for (const auto& p : mahler4_sets()) e = std::max(e, mahler4_addition(p, 20, 7));
    return e;
  });
  add("mahler double(half(x)) = x", 1e-11, [](std::string&) {
    double e = 0.0;
    for (const auto& p : mahler4_sets()) e = std::max(e, mahler4_double_half(p, 20, 11));
    return e;
  });
  add("taylor order 6 within 5|v|^7(1+|m|+|n|)^3", 1.0,
      [](std::string&) { return taylor_bound_ratio(); });
  add("sin(amg) = sng, cos(amg) = cng", 1e-10, [](std::string&) {
    double e = 0.0;
    for (const auto& p : mahler4_sets()) e = std::max(e, amplitude_vs_direct(p, 10, 13));
    return e;
  });
  add("G(pi/2, 0, 0) = pi/2", 1e-15, [](std::string&) {
    return std::abs(g_period({0.0, 0.0}) - std::numbers::pi / 2);
  });
  add("G(pi/2) = K(m1)/a", 1e-13, [](std::string&) {
    double e = 0.0;
    for (const auto& p : mahler4_sets()) e = std::max(e, g_period_vs_agm(p));
    return e;
  });
  add("G series at (n,m)=(0.02,0.05), relative", 1e-6, [](std::string&) {
    const MahlerParams4 p{0.05, 0.02};
    return std::abs(g_period_series(p) / g_period(p) - 1.0);
  });
  add("Pi(phi,0,m) = F and E identity", 1e-12, [](std::string&) { return legendre_identities(); });
  add("5-Mahler amplitude path = ODE, (p,n,m)=(0.2,0.4,0.7)", 1e-10,
      [](std::string&) { return mahler5_amplitude_path({0.2, 0.4, 0.7}, 10.0, 20); });
  add("first integrals, generic 4-EES on [0,20]", 1e-9, [](std::string&) {
    return conservation(reference_sets().front().params, 20.0).drift;
  });

  if (!full) return out;

  add("first integrals, all reference sets on [0,20]", 1e-9, [](std::string& note) {
    double d = 0.0;
    for (const auto& f : reference_sets()) {
      const auto r = conservation(f.params, 20.0);
      d = std::max(d, r.drift);
    }
    note = std::to_string(reference_sets().size()) + " sets";
    return d;
  });
  add("theta-ratio fixtures conserve integrals", 1e-9,
      [](std::string&) { return theta_fixtures_drift(0.6); });
  add("mahler closed = direct = ODE, all sets", 1e-9, [](std::string&) {
    double e = 0.0;
    unsigned seed = 17;
    for (const auto& p : mahler4_sets()) e = std::max(e, mahler4_triple_path(p, 100, 20.0, seed++));
    return e;
  });
  add("landen and jacobi addition vs 3-EES", 1e-10, [](std::string&) {
    return std::max(landen_addition_vs_ode(0.7, 10.0, 40), landen_addition_vs_ode(0.99, 10.0, 40));
  });
  add("5-Mahler p=0 = 4-Mahler", 1e-10, [](std::string&) { return mahler5_p_zero(30, 19); });
  add("w5 regularization = direct 5-EES", 1e-8,
      [](std::string&) { return omega5_regularization({0.2, 0.4, 0.7}, 8.0); });
  add("p=n chain = direct 5-EES", 1e-8, [](std::string&) { return pn_chain(0.3, 0.6, 10.0, 30); });
  add("Pi(Amg(w)) = w at p=n", 1e-10,
      [](std::string&) { return pi_amg_roundtrip(0.3, 0.6, 10.0, 20); });
  const RigidBodyReport rb = rigid_body({1.0, 2.0, 3.0}, 1.0, 5.0 / 24.0);
  add("rigid body closed form = ODE over a period", 1e-8,
      [&rb](std::string&) { return rb.solution; });
  add("rigid body energy drift", 1e-10, [&rb](std::string&) { return rb.energy; });
  add("rigid body separated relation", 1e-8, [&rb](std::string&) { return rb.separated; });
  add("rigid body mu quadrature and third-kind form", 1e-8, [&rb](std::string&) { return rb.mu; });
  add("rigid body nu = amg(V - M sqrt(Omega) t)", 1e-8, [&rb](std::string&) { return rb.amg_form; });
  add("rigid body Mahler form", 1e-10, [&rb](std::string&) { return rb.mahler_form; });
  return out;
}

inline nlohmann::json report(const std::vector<CheckResult>& checks, const std::string& level,
                             double scale) {
  nlohmann::json j;
  j["level"] = level;
  j["tol_scale"] = scale;
  bool ok = true;
  for (const auto& c : checks) {
    j["checks"].push_back(to_json(c));
    ok = ok && c.passed;
  }
  j["passed"] = ok;
  return j;
}

}  // namespace nees::selftest
