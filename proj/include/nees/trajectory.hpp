#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "nees/ees_system.hpp"
#include "nees/ode.hpp"

namespace nees {

// Solution of an N-EES on a finite interval. The underlying dense solution
// is stored in its own argument s; the trajectory exposes v = s / arg_scale
// and values scaled by value_scale, which lets a scaled copy share the run.
class Trajectory {
 public:
  Trajectory(EESParams params, DenseSolution sol, double arg_scale = 1.0,
             double value_scale = 1.0)
      : params_(std::move(params)),
        sol_(std::move(sol)),
        arg_scale_(arg_scale),
        value_scale_(value_scale) {
    const FirstIntegralMatrix c0 = first_integrals(params_);
    drift_.reserve(sol_.size());
    for (std::size_t k = 0; k < sol_.size(); ++k) {
      const std::vector<double> w = state(k);
      drift_.push_back(c0.relative_drift(first_integrals(params_, w)));
      max_drift_ = std::max(max_drift_, drift_.back());
    }
  }

  const EESParams& params() const noexcept { return params_; }
  const DenseSolution& dense() const noexcept { return sol_; }
  double arg_scale() const noexcept { return arg_scale_; }
  double value_scale() const noexcept { return value_scale_; }

  std::size_t size() const noexcept { return sol_.size(); }
  std::size_t dimension() const noexcept { return sol_.dimension(); }
  double v(std::size_t k) const { return sol_.node(k) / arg_scale_; }
  double v_start() const { return sol_.front() / arg_scale_; }
  double v_end() const { return sol_.back() / arg_scale_; }

  std::vector<double> state(std::size_t k) const {
    std::vector<double> w(sol_.state(k).begin(), sol_.state(k).end());
    for (double& x : w) x *= value_scale_;
    return w;
  }

  // Relative first-integral drift at node k, and its maximum over the run.
  double drift(std::size_t k) const { return drift_[k]; }
  double max_drift() const noexcept { return max_drift_; }

  std::vector<double> evaluate(double v) const {
    std::vector<double> w = sol_(v * arg_scale_);
    for (double& x : w) x *= value_scale_;
    return w;
  }

 private:
  EESParams params_;
  DenseSolution sol_;
  double arg_scale_;
  double value_scale_;
  std::vector<double> drift_;
  double max_drift_ = 0.0;
};

inline DenseSolution integrate_ees(const EESParams& p, double v_start, double v_end,
                                   const IntegratorConfig& cfg = {}) {
  const std::vector<double> alphas = p.alphas();
  auto rhs = [&alphas](double, std::span<const double> w, std::span<double> dw) {
    ees_rhs(alphas, w, dw);
  };
  return integrate_ode(rhs, v_start, p.ic(), v_end, cfg);
}

// Integrates from the initial condition at v_start to v_end (either direction).
inline Trajectory integrate(const EESParams& p, double v_start, double v_end,
                            const IntegratorConfig& cfg = {}) {
  return Trajectory(p, integrate_ees(p, v_start, v_end, cfg));
}

inline Trajectory integrate(const EESParams& p, double v_end, const IntegratorConfig& cfg = {}) {
  return integrate(p, 0.0, v_end, cfg);
}

inline std::vector<double> evaluate_dense(const Trajectory& t, double v) { return t.evaluate(v); }

}  // namespace nees
