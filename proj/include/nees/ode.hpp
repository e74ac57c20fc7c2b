#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <sstream>
#include <vector>

#include "nees/detail/dop853_tableau.hpp"
#include "nees/error.hpp"

namespace nees {

struct IntegratorConfig {
  double rtol = 1e-12;
  double atol = 1e-14;
  double max_step = std::numeric_limits<double>::infinity();
  double first_step = 0.0;  // 0 selects the step automatically
  std::size_t max_steps = 2000000;
  double blowup = 1e100;  // any |y_i| above this aborts the run
  // Step past the end point instead of clamping the last step. The step
  // sequence then depends only on the start point, so dense values at a
  // given argument do not depend on how far the run extends.
  bool overshoot = false;
};

struct IntegrationStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t evaluations = 0;
};

// Piecewise 7th-order interpolant over the accepted steps of a DOP853 run.
class DenseSolution {
 public:
  std::size_t dimension() const noexcept { return n_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  double node(std::size_t k) const { return nodes_[k]; }
  std::span<const double> state(std::size_t k) const {
    return {states_.data() + k * n_, n_};
  }
  double front() const { return nodes_.front(); }
  double back() const { return nodes_.back(); }
  const IntegrationStats& stats() const noexcept { return stats_; }

  bool contains(double s) const {
    const double lo = std::min(front(), back());
    const double hi = std::max(front(), back());
    return s >= lo && s <= hi;
  }

  void evaluate(double s, std::span<double> out) const {
    if (!contains(s)) {
      std::ostringstream msg;
      msg << "argument " << s << " outside integrated range [" << std::min(front(), back())
          << ", " << std::max(front(), back()) << "]";
      throw domain_error(msg.str());
    }
    if (nodes_.size() == 1) {
      std::copy_n(states_.begin(), n_, out.begin());
      return;
    }
    const std::size_t k = locate(s);
    const double h = nodes_[k + 1] - nodes_[k];
    const double x = (s - nodes_[k]) / h;
    const double* f = coeffs_.data() + k * 7 * n_;
    const double* y0 = states_.data() + k * n_;
    for (std::size_t i = 0; i < n_; ++i) {
      double y = 0.0;
      for (int j = 6; j >= 0; --j) {
        y += f[j * n_ + i];
        y *= ((6 - j) % 2 == 0) ? x : 1.0 - x;
      }
      out[i] = y + y0[i];
    }
  }

  std::vector<double> operator()(double s) const {
    std::vector<double> out(n_);
    evaluate(s, out);
    return out;
  }

 private:
  template <class Rhs>
  friend DenseSolution integrate_ode(Rhs&&, double, std::span<const double>, double,
                                     const IntegratorConfig&);

  std::size_t locate(double s) const {
    const bool forward = back() > front();
    std::size_t lo = 0, hi = nodes_.size() - 1;
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      if ((nodes_[mid] <= s) == forward)
        lo = mid;
      else
        hi = mid;
    }
    return lo;
  }

  std::size_t n_ = 0;
  std::vector<double> nodes_;
  std::vector<double> states_;
  std::vector<double> coeffs_;
  IntegrationStats stats_;
};

namespace detail {

inline double rms(std::span<const double> a) {
  double s = 0.0;
  for (double x : a) s += x * x;
  return std::sqrt(s / static_cast<double>(a.size()));
}

}  // namespace detail

// Dormand-Prince 8(5,3) with dense output. rhs(s, y, dy) fills dy.
template <class Rhs>
DenseSolution integrate_ode(Rhs&& rhs, double s0, std::span<const double> y0, double s1,
                            const IntegratorConfig& cfg) {
  namespace T = detail::dop853;
  constexpr double kSafety = 0.9;
  constexpr double kMinFactor = 0.2;
  constexpr double kMaxFactor = 10.0;
  constexpr double kExponent = -1.0 / 8.0;

  detail::require(cfg.rtol > 0.0 && cfg.atol >= 0.0, "tolerances must be positive");
  detail::require(std::isfinite(s0) && std::isfinite(s1), "integration span must be finite");

  const std::size_t n = y0.size();
  DenseSolution sol;
  sol.n_ = n;
  sol.nodes_.push_back(s0);
  sol.states_.assign(y0.begin(), y0.end());
  if (s1 == s0 || n == 0) return sol;

  const double dir = s1 > s0 ? 1.0 : -1.0;
  std::vector<double> y(y0.begin(), y0.end()), ynew(n), ytmp(n), scale(n);
  std::vector<double> k(T::kExtendedStages * n);
  auto stage = [&](int i) { return std::span<double>(k.data() + i * n, n); };
  auto eval = [&](double s, std::span<const double> yy, std::span<double> dy) {
    rhs(s, yy, dy);
    ++sol.stats_.evaluations;
  };

  std::vector<double> f(n), fnew(n);
  eval(s0, y, f);

  double h_abs = cfg.first_step;
  if (h_abs <= 0.0) {
    for (std::size_t i = 0; i < n; ++i) scale[i] = cfg.atol + std::abs(y[i]) * cfg.rtol;
    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] / scale[i];
    const double d0 = detail::rms(ytmp);
    for (std::size_t i = 0; i < n; ++i) ytmp[i] = f[i] / scale[i];
    const double d1 = detail::rms(ytmp);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, std::abs(s1 - s0));
    for (std::size_t i = 0; i < n; ++i) ynew[i] = y[i] + h0 * dir * f[i];
    eval(s0 + h0 * dir, ynew, fnew);
    for (std::size_t i = 0; i < n; ++i) ytmp[i] = (fnew[i] - f[i]) / scale[i];
    const double d2 = detail::rms(ytmp) / h0;
    const double h1 = (d1 <= 1e-15 && d2 <= 1e-15)
                          ? std::max(1e-6, h0 * 1e-3)
                          : std::pow(0.01 / std::max(d1, d2), 1.0 / 8.0);
    h_abs = std::min(100.0 * h0, h1);
  }

  double s = s0;
  std::vector<double> err3(n), err5(n);
  while (dir * (s - s1) < 0.0) {
    if (sol.stats_.accepted >= cfg.max_steps) {
      std::ostringstream msg;
      msg << "step limit reached at v = " << s;
      throw numerical_error(msg.str(), s);
    }
    const double min_step =
        10.0 * std::abs(std::nextafter(s, dir * std::numeric_limits<double>::infinity()) - s);
    h_abs = std::clamp(h_abs, min_step, std::max(min_step, cfg.max_step));

    bool rejected = false;
    double h = 0.0, snew = s;
    for (;;) {
      if (h_abs < min_step) {
        std::ostringstream msg;
        msg << "step size underflow at v = " << s;
        throw numerical_error(msg.str(), s);
      }
      h = h_abs * dir;
      snew = s + h;
      if (!cfg.overshoot && dir * (snew - s1) > 0.0) snew = s1;
      h = snew - s;
      h_abs = std::abs(h);

      std::copy(f.begin(), f.end(), stage(0).begin());
      for (int st = 1; st < T::kStages; ++st) {
        for (std::size_t i = 0; i < n; ++i) {
          double acc = 0.0;
          for (int j = 0; j < st; ++j) acc += T::kA[st][j] * k[j * n + i];
          ytmp[i] = y[i] + h * acc;
        }
        eval(s + T::kC[st] * h, ytmp, stage(st));
      }
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < T::kStages; ++j) acc += T::kB[j] * k[j * n + i];
        ynew[i] = y[i] + h * acc;
      }
      eval(snew, ynew, fnew);
      std::copy(fnew.begin(), fnew.end(), stage(T::kStages).begin());

      double n5 = 0.0, n3 = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double sc = cfg.atol + cfg.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
        double e5 = 0.0, e3 = 0.0;
        for (int j = 0; j <= T::kStages; ++j) {
          e5 += T::kE5[j] * k[j * n + i];
          e3 += T::kE3[j] * k[j * n + i];
        }
        e5 /= sc;
        e3 /= sc;
        n5 += e5 * e5;
        n3 += e3 * e3;
      }
      double err = 0.0;
      if (n5 > 0.0 || n3 > 0.0) {
        const double denom = n5 + 0.01 * n3;
        err = h_abs * n5 / std::sqrt(denom * static_cast<double>(n));
      }
      if (!std::isfinite(err)) err = std::numeric_limits<double>::infinity();

      if (err < 1.0) {
        double factor = err == 0.0 ? kMaxFactor
                                   : std::min(kMaxFactor, kSafety * std::pow(err, kExponent));
        if (rejected) factor = std::min(1.0, factor);
        h_abs *= factor;
        break;
      }
      h_abs *= std::max(kMinFactor, kSafety * std::pow(err, kExponent));
      rejected = true;
      ++sol.stats_.rejected;
    }

    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(ynew[i]) || std::abs(ynew[i]) > cfg.blowup) {
        std::ostringstream msg;
        msg << "solution blow-up at v = " << snew;
        throw numerical_error(msg.str(), snew);
      }
    }

    for (int st = T::kStages + 1; st < T::kExtendedStages; ++st) {
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < st; ++j) acc += T::kA[st][j] * k[j * n + i];
        ytmp[i] = y[i] + h * acc;
      }
      eval(s + T::kC[st] * h, ytmp, stage(st));
    }
    const std::size_t base = sol.coeffs_.size();
    sol.coeffs_.resize(base + 7 * n);
    double* F = sol.coeffs_.data() + base;
    for (std::size_t i = 0; i < n; ++i) {
      const double dy = ynew[i] - y[i];
      F[i] = dy;
      F[n + i] = h * f[i] - dy;
      F[2 * n + i] = 2.0 * dy - h * (fnew[i] + f[i]);
      for (int r = 0; r < T::kInterpolatorPower - 3; ++r) {
        double acc = 0.0;
        for (int j = 0; j < T::kExtendedStages; ++j) acc += T::kD[r][j] * k[j * n + i];
        F[(3 + r) * n + i] = h * acc;
      }
    }

    s = snew;
    y.swap(ynew);
    f.swap(fnew);
    sol.nodes_.push_back(s);
    sol.states_.insert(sol.states_.end(), y.begin(), y.end());
    ++sol.stats_.accepted;
  }
  return sol;
}

}  // namespace nees
