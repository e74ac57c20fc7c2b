#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nees/error.hpp"

namespace nees {

// Coefficients and initial condition of w_i' = alpha_i * prod_{j != i} w_j.
class EESParams {
 public:
  EESParams() = default;

  EESParams(std::vector<double> alphas, std::vector<double> ic)
      : alphas_(std::move(alphas)), ic_(std::move(ic)) {
    detail::require(alphas_.size() == ic_.size(),
                    "alphas and initial condition must have the same length");
    detail::require(alphas_.size() >= 2, "system dimension must be at least 2");
    for (double a : alphas_) detail::require(std::isfinite(a), "alphas must be finite");
    for (double w : ic_) detail::require(std::isfinite(w), "initial condition must be finite");
  }

  std::size_t dimension() const noexcept { return alphas_.size(); }
  const std::vector<double>& alphas() const noexcept { return alphas_; }
  const std::vector<double>& ic() const noexcept { return ic_; }

  double alpha_sum() const {
    double s = 0.0;
    for (double a : alphas_) s += a;
    return s;
  }

 private:
  std::vector<double> alphas_;
  std::vector<double> ic_;
};

// Right-hand side. Products are formed from prefix and suffix products so
// zero coordinates are handled without division.
inline void ees_rhs(std::span<const double> alphas, std::span<const double> w,
                    std::span<double> dw) {
  const std::size_t n = w.size();
  double prefix = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    dw[i] = prefix;
    prefix *= w[i];
  }
  double suffix = 1.0;
  for (std::size_t i = n; i-- > 0;) {
    dw[i] *= suffix * alphas[i];
    suffix *= w[i];
  }
}

// Antisymmetric matrix C_ij = alpha_i w_j^2 - alpha_j w_i^2.
class FirstIntegralMatrix {
 public:
  FirstIntegralMatrix() = default;
  explicit FirstIntegralMatrix(std::size_t n) : n_(n), values_(n * n, 0.0) {}

  std::size_t dimension() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return values_[i * n_ + j]; }

  // Largest |C_ij - other_ij| / (1 + |C_ij|) over all pairs.
  double relative_drift(const FirstIntegralMatrix& other) const {
    double d = 0.0;
    for (std::size_t k = 0; k < values_.size(); ++k)
      d = std::max(d, std::abs(values_[k] - other.values_[k]) / (1.0 + std::abs(values_[k])));
    return d;
  }

  double max_abs() const {
    double d = 0.0;
    for (double v : values_) d = std::max(d, std::abs(v));
    return d;
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> values_;
};

inline FirstIntegralMatrix first_integrals(std::span<const double> alphas,
                                           std::span<const double> w) {
  detail::require(alphas.size() == w.size(), "state length does not match alphas");
  const std::size_t n = w.size();
  FirstIntegralMatrix c(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) c(i, j) = alphas[i] * w[j] * w[j] - alphas[j] * w[i] * w[i];
  return c;
}

inline FirstIntegralMatrix first_integrals(const EESParams& p, std::span<const double> w) {
  return first_integrals(p.alphas(), w);
}

inline FirstIntegralMatrix first_integrals(const EESParams& p) {
  return first_integrals(p.alphas(), p.ic());
}

}  // namespace nees
