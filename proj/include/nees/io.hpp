#pragma once

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "nees/ees_system.hpp"
#include "nees/trajectory.hpp"

namespace nees {

inline void to_json(nlohmann::json& j, const EESParams& p) {
  j = nlohmann::json{{"alphas", p.alphas()}, {"ic", p.ic()}};
}

inline void from_json(const nlohmann::json& j, EESParams& p) {
  if (!j.is_object() || !j.contains("alphas") || !j.contains("ic"))
    throw domain_error("expected an object with \"alphas\" and \"ic\" arrays");
  p = EESParams(j.at("alphas").get<std::vector<double>>(), j.at("ic").get<std::vector<double>>());
}

inline EESParams read_params(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw domain_error(std::string("invalid JSON: ") + e.what());
  }
  try {
    return j.get<EESParams>();
  } catch (const nlohmann::json::exception& e) {
    throw domain_error(std::string("invalid system description: ") + e.what());
  }
}

// 17 significant digits with a '.' separator; parses back to the same double.
inline std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_csv_row(std::ostream& os, double v, std::span<const double> values) {
  os << format_number(v);
  for (double x : values) os << ',' << format_number(x);
  os << '\n';
}

inline void write_trajectory_header(std::ostream& os, std::size_t n) {
  os << 'v';
  for (std::size_t i = 1; i <= n; ++i) os << ",omega" << i;
  os << ",drift\n";
}

// Rows at the accepted integration nodes.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& t) {
  write_trajectory_header(os, t.dimension());
  for (std::size_t k = 0; k < t.size(); ++k) {
    std::vector<double> row = t.state(k);
    row.push_back(t.drift(k));
    write_csv_row(os, t.v(k), row);
  }
}

// Rows at the given arguments through the dense interpolant; returns the
// largest drift written.
inline double write_trajectory_csv(std::ostream& os, const Trajectory& t,
                                   std::span<const double> grid) {
  write_trajectory_header(os, t.dimension());
  const FirstIntegralMatrix c0 = first_integrals(t.params());
  double worst = 0.0;
  for (double v : grid) {
    std::vector<double> row = t.evaluate(v);
    const double d = c0.relative_drift(first_integrals(t.params(), row));
    worst = std::max(worst, d);
    row.push_back(d);
    write_csv_row(os, v, row);
  }
  return worst;
}

}  // namespace nees
