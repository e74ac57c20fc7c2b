#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace nees {

// Raised when a parameter or initial condition lies outside the domain of a
// routine. Messages name the constraint that failed.
class domain_error : public std::domain_error {
 public:
  explicit domain_error(const std::string& what) : std::domain_error(what) {}
};

// Raised when a computation fails numerically: step-size underflow, blow-up,
// non-convergence of an iteration or a quadrature.
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& what,
                           double where = std::numeric_limits<double>::quiet_NaN())
      : std::runtime_error(what), where_(where) {}

  // Independent variable at which the failure happened, NaN if not applicable.
  double where() const noexcept { return where_; }

 private:
  double where_;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw domain_error(what);
}

}  // namespace detail
}  // namespace nees
