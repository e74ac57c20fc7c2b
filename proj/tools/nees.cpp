#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nees/ees.hpp"
#include "nees/elliptic.hpp"
#include "nees/io.hpp"
#include "nees/mahler4.hpp"
#include "nees/mahler5.hpp"
#include "nees/rigidbody.hpp"
#include "nees/selftest.hpp"

namespace {

enum ExitCode { kOk = 0, kDomain = 1, kNumerical = 2, kSelftest = 3 };

// Exact decimal-to-double conversion, so 17-digit output parses back bit for bit.
double parse_double(const std::string& text, const std::string& flag) {
  double x = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, x);
  if (ec != std::errc() || ptr != last)
    throw nees::domain_error("cannot parse " + flag + " value '" + text + "'");
  return x;
}

struct Options {
  std::map<std::string, std::string> raw;

  bool has(const std::string& k) const { return raw.count(k) && !raw.at(k).empty(); }

  double get(const std::string& k) const {
    if (!has(k)) throw nees::domain_error("missing required flag --" + k);
    return parse_double(raw.at(k), "--" + k);
  }

  double get(const std::string& k, double fallback) const { return has(k) ? get(k) : fallback; }
};

std::vector<double> make_grid(const Options& o, bool required = true) {
  if (o.has("at")) return {o.get("at")};
  if (o.has("from") || o.has("to") || o.has("count")) {
    const double a = o.get("from", 0.0), b = o.get("to");
    const long n = std::lround(o.get("count", 2.0));
    nees::detail::require(n >= 2, "grid count must be at least 2");
    std::vector<double> g(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
    g.back() = b;
    return g;
  }
  if (required) throw nees::domain_error("give --at or --from/--to/--count");
  return {};
}

double max_abs(const std::vector<double>& g) {
  double r = 0.0;
  for (double x : g) r = std::max(r, std::abs(x));
  return r;
}

nees::IntegratorConfig ode_config(const Options& o, nees::IntegratorConfig cfg) {
  if (const char* env = std::getenv("NEES_RTOL"); env && *env)
    cfg.rtol = parse_double(env, "NEES_RTOL");
  if (o.has("rtol")) cfg.rtol = o.get("rtol");
  nees::detail::require(cfg.rtol > 0.0, "rtol must be positive");
  cfg.atol = std::min(cfg.atol, cfg.rtol * 1e-2);
  return cfg;
}

struct Table {
  std::string arg = "v";
  std::vector<std::string> columns;
  std::function<std::vector<double>(double)> row;
};

nees::MahlerParams4 mahler4_params(const Options& o) { return {o.get("m"), o.get("n")}; }

nees::MahlerParams5 mahler5_params(const Options& o) {
  return {o.get("p"), o.get("n"), o.get("m")};
}

std::vector<double> as_row(const nees::Mahler4Values& r) { return {r.sng, r.cng, r.dng, r.fng}; }

std::vector<double> as_row(const nees::Mahler5Values& r) {
  return {r.Sng, r.Cng, r.Dng, r.Fng, r.Hng};
}

Table mahler4_table(const std::string& fn, const Options& o, const std::vector<double>& grid,
                    const std::string& method) {
  const nees::MahlerParams4 p = mahler4_params(o);
  std::function<nees::Mahler4Values(double)> f;
  if (method == "closed") {
    f = [p](double v) { return nees::mahler4_closed(v, p); };
  } else if (method == "direct") {
    f = [p](double v) { return nees::mahler4_direct(v, p); };
  } else if (method == "ode") {
    auto ev = std::make_shared<nees::Mahler4Evaluator>(
        p, max_abs(grid), ode_config(o, nees::Mahler4Evaluator::default_config()));
    f = [ev](double v) { return (*ev)(v); };
  } else if (method == "taylor") {
    const int order = static_cast<int>(std::lround(o.get("order", 6.0)));
    f = [p, order](double v) { return nees::mahler4_taylor(v, p, order); };
  } else if (method == "amg") {
    f = [p](double v) { return nees::mahler4_from_amplitude(v, p); };
  } else {
    throw nees::domain_error("unknown method '" + method +
                             "' (expected closed, direct, ode, taylor or amg)");
  }
  static const std::vector<std::string> names{"sng", "cng", "dng", "fng"};
  if (fn == "mahler4") return {"v", names, [f](double v) { return as_row(f(v)); }};
  const std::size_t i = std::find(names.begin(), names.end(), fn) - names.begin();
  return {"v", {fn}, [f, i](double v) { return std::vector<double>{as_row(f(v))[i]}; }};
}

Table mahler5_table(const std::string& fn, const Options& o, const std::vector<double>& grid) {
  const nees::MahlerParams5 q = mahler5_params(o);
  auto ev = std::make_shared<nees::Mahler5Evaluator>(
      q, max_abs(grid), ode_config(o, nees::Mahler5Evaluator::default_config()));
  static const std::vector<std::string> names{"Sng", "Cng", "Dng", "Fng", "Hng"};
  if (fn == "mahler5") return {"w", names, [ev](double w) { return as_row((*ev)(w)); }};
  const std::size_t i = std::find(names.begin(), names.end(), fn) - names.begin();
  return {"w", {fn}, [ev, i](double w) { return std::vector<double>{as_row((*ev)(w))[i]}; }};
}

nees::InertiaParams inertia(const Options& o) {
  return {o.get("A", 1.0), o.get("B", 2.0), o.get("C", 3.0)};
}

Table build_table(const std::string& fn, const Options& o, const std::vector<double>& grid,
                  const std::string& method) {
  using V = std::vector<double>;
  if (fn == "sn" || fn == "cn" || fn == "dn" || fn == "sncndn") {
    const double m = o.get("m");
    auto tri = [m](double u) {
      const nees::JacobiTriple j = nees::sncndn_any(u, m);
      return V{j.sn, j.cn, j.dn};
    };
    if (fn == "sncndn") return {"u", {"sn", "cn", "dn"}, tri};
    const int i = fn == "sn" ? 0 : fn == "cn" ? 1 : 2;
    return {"u", {fn}, [tri, i](double u) { return V{tri(u)[i]}; }};
  }
  if (fn == "am") {
    const double m = o.get("m");
    return {"u", {"am"}, [m](double u) { return V{nees::am(u, m)}; }};
  }
  if (fn == "K") return {"m", {"K"}, [](double m) { return V{nees::complete_K(m)}; }};
  if (fn == "sng" || fn == "cng" || fn == "dng" || fn == "fng" || fn == "mahler4")
    return mahler4_table(fn, o, grid, method);
  if (fn == "amg") {
    const auto ker = std::make_shared<nees::AmplitudeKernel>(nees::mahler4_kernel(mahler4_params(o)));
    return {"v", {"amg"}, [ker](double v) { return V{ker->inverse(v)}; }};
  }
  if (fn == "G") {
    const auto ker = std::make_shared<nees::AmplitudeKernel>(nees::mahler4_kernel(mahler4_params(o)));
    return {"phi", {"G"}, [ker](double phi) { return V{ker->integral(phi)}; }};
  }
  if (fn == "G-period" || fn == "G-series") {
    const bool series = fn == "G-series";
    return {"m", {fn}, [n = o.get("n"), series](double m) {
              return V{series ? nees::g_period_series({m, n}) : nees::g_period({m, n})};
            }};
  }
  if (fn == "Sng" || fn == "Cng" || fn == "Dng" || fn == "Fng" || fn == "Hng" || fn == "mahler5")
    return mahler5_table(fn, o, grid);
  if (fn == "Amg") {
    const auto ker = std::make_shared<nees::AmplitudeKernel>(nees::mahler5_kernel(mahler5_params(o)));
    return {"w", {"Amg"}, [ker](double w) { return V{ker->inverse(w)}; }};
  }
  if (fn == "Pi") {
    const double n = o.get("n"), m = o.get("m");
    return {"phi", {"Pi"}, [n, m](double phi) { return V{nees::legendre_pi(phi, n, m)}; }};
  }
  if (fn == "F") {
    const double m = o.get("m");
    return {"phi", {"F"}, [m](double phi) { return V{nees::legendre_F(phi, m)}; }};
  }
  if (fn == "E") {
    const double m = o.get("m");
    return {"phi", {"E"}, [m](double phi) { return V{nees::legendre_E(phi, m)}; }};
  }
  if (fn == "theta-similar") {
    const double k = o.get("k");
    return {"z", {"omega1", "omega2", "omega3", "omega4"}, [k](double z) {
              const auto t = nees::theta_similar(z, k);
              return V(t.omega.begin(), t.omega.end());
            }};
  }
  if (fn == "rb-solution" || fn == "rb-nu" || fn == "rb-mu" || fn == "rb-mu-pi" ||
      fn == "rb-nu-amg" || fn == "rb-mahler") {
    const nees::InertiaParams I = inertia(o);
    const double M = o.get("M", 1.0), h = o.get("h");
    if (fn == "rb-nu-amg") {
      const nees::RBAltConstants k = nees::rb_alt_constants(I, M, h);
      return {"t", {"nu"}, [k](double t) { return V{nees::rb_nu_amg(t, k)}; }};
    }
    const nees::RBConstants k = nees::rb_constants(I, M, h);
    if (fn == "rb-solution")
      return {"t", {"sin_nu", "cos_nu", "N"}, [k](double t) {
                const auto s = nees::rb_solution(t, k);
                return V{s.sin_nu, s.cos_nu, s.N};
              }};
    if (fn == "rb-mahler") {
      const nees::RbMahlerForm f = nees::rb_mahler_form(k, I);
      return {"t", {"sin_nu", "cos_nu", "N"}, [f](double t) {
                const auto s = nees::rb_solution_mahler(t, f);
                return V{s.sin_nu, s.cos_nu, s.N};
              }};
    }
    if (fn == "rb-nu") return {"t", {"nu"}, [k](double t) { return V{nees::rb_nu(t, k)}; }};
    if (fn == "rb-mu") return {"t", {"mu"}, [k, I](double t) { return V{nees::rb_mu(t, k, I)}; }};
    return {"t", {"mu"}, [k, I](double t) { return V{nees::rb_mu_pi(t, k, I)}; }};
  }
  throw nees::domain_error("unknown function '" + fn + "'");
}

int cmd_eval(const std::string& fn, const Options& o, const std::string& method) {
  std::vector<double> grid = make_grid(o, fn != "K");
  if (grid.empty()) grid = {o.get("m")};
  const Table t = build_table(fn, o, grid, method);
  std::vector<std::vector<double>> rows(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) rows[i] = t.row(grid[i]);
  std::cout << t.arg;
  for (const auto& c : t.columns) std::cout << ',' << c;
  std::cout << '\n';
  for (std::size_t i = 0; i < grid.size(); ++i) nees::write_csv_row(std::cout, grid[i], rows[i]);
  return kOk;
}

int cmd_solve(const std::string& path, const Options& o, std::optional<double> max_drift) {
  nees::EESParams params;
  if (path == "-") {
    params = nees::read_params(std::cin);
  } else {
    std::ifstream in(path);
    if (!in) throw nees::domain_error("cannot open " + path);
    params = nees::read_params(in);
  }
  const std::vector<double> grid = make_grid(o, false);
  const double v0 = o.get("from", 0.0);
  const double v1 = o.has("to") ? o.get("to") : o.get("at");
  const nees::Trajectory t = nees::integrate(params, v0, v1, ode_config(o, {}));
  double drift = t.max_drift();
  if (grid.empty()) {
    nees::write_trajectory_csv(std::cout, t);
  } else {
    drift = std::max(drift, nees::write_trajectory_csv(std::cout, t, grid));
  }
  std::cerr << "max_drift=" << nees::format_number(drift) << " steps=" << t.dense().stats().accepted
            << " rejected=" << t.dense().stats().rejected << '\n';
  if (max_drift && !(drift <= *max_drift)) {
    std::cerr << "error: first-integral drift " << nees::format_number(drift)
              << " exceeds threshold " << nees::format_number(*max_drift) << '\n';
    return kNumerical;
  }
  return kOk;
}

int cmd_selftest(const std::string& level, double scale, const std::string& json_path) {
  if (level != "quick" && level != "full")
    throw nees::domain_error("selftest level must be quick or full");
  const auto checks = nees::selftest::run_selftest(level == "full", scale);
  const nlohmann::json report = nees::selftest::report(checks, level, scale);
  if (json_path.empty() || json_path == "-") {
    std::cout << report.dump(2) << '\n';
  } else {
    std::ofstream(json_path) << report.dump(2) << '\n';
  }
  for (const auto& c : checks)
    std::cerr << (c.passed ? "PASS " : "FAIL ") << c.name << "  value=" << c.value
              << " tol=" << c.tolerance * scale << '\n';
  return report["passed"].get<bool>() ? kOk : kSelftest;
}

int cmd_system(const std::string& family, const Options& o) {
  nees::EESParams p;
  if (family == "mahler4") {
    p = nees::mahler4_system(mahler4_params(o));
  } else if (family == "mahler5") {
    p = nees::mahler5_system(mahler5_params(o));
  } else if (family == "theta-similar") {
    const auto t = nees::theta_similar(0.0, o.get("k"));
    p = nees::EESParams({t.alphas.begin(), t.alphas.end()}, {t.ic.begin(), t.ic.end()});
  } else if (family == "jacobi") {
    p = nees::EESParams({1.0, -1.0, -o.get("m")}, {0.0, 1.0, 1.0});
  } else if (family == "ratios-jacobi") {
    p = nees::ratios_jacobi_fixture(mahler4_params(o)).system;
  } else if (family == "bounded-1" || family == "bounded-2" || family == "unbounded-1" ||
             family == "unbounded-2") {
    p = nees::theta_ratio_fixture(nees::parse_theta_fixture(family), o.get("k"));
  } else {
    throw nees::domain_error("unknown system family '" + family + "'");
  }
  std::cout << nlohmann::json(p).dump() << '\n';
  return kOk;
}

void add_param_flags(CLI::App* cmd, Options& o, const std::vector<std::string>& flags) {
  for (const auto& f : flags) cmd->add_option("--" + f, o.raw[f]);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"N-extended Euler systems and generalized Jacobi elliptic functions"};
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);

  Options eval_opts, solve_opts;
  std::string fn, method = "direct", solve_path, level = "quick", json_path;
  std::optional<double> max_drift;
  double tol_scale = 1.0;

  auto* eval = app.add_subcommand("eval", "evaluate a function on a grid, CSV to stdout");
  eval->add_option("function", fn,
                   "sn cn dn sncndn am K sng cng dng fng mahler4 amg G G-period G-series "
                   "Sng Cng Dng Fng Hng mahler5 Amg Pi F E theta-similar rb-solution rb-nu "
                   "rb-mu rb-mu-pi rb-nu-amg rb-mahler")
      ->required();
  eval->add_option("--method", method, "4-Mahler path: closed direct ode taylor amg");
  add_param_flags(eval, eval_opts,
                  {"m", "n", "p", "k", "at", "from", "to", "count", "order", "rtol", "A", "B",
                   "C", "M", "h"});

  auto* solve = app.add_subcommand("solve", "integrate an N-EES given as JSON, CSV to stdout");
  solve->add_option("params", solve_path, "JSON file {\"alphas\": [...], \"ic\": [...]}, - for stdin")
      ->required();
  solve->add_option("--max-drift", max_drift, "exit 2 when the first-integral drift exceeds this");
  add_param_flags(solve, solve_opts, {"from", "to", "at", "count", "rtol"});

  Options sys_opts;
  std::string family;
  auto* sys = app.add_subcommand("system", "print the JSON description of a named system");
  sys->add_option("family", family,
                  "mahler4 mahler5 theta-similar jacobi ratios-jacobi bounded-1 bounded-2 "
                  "unbounded-1 unbounded-2")
      ->required();
  add_param_flags(sys, sys_opts, {"m", "n", "p", "k"});

  auto* st = app.add_subcommand("selftest", "run the identity and cross-path checks");
  st->add_option("level", level, "quick or full");
  st->add_option("--tol-scale", tol_scale, "multiply every tolerance by this factor");
  st->add_option("--json", json_path, "write the JSON report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kDomain;
  }

  try {
    if (*eval) return cmd_eval(fn, eval_opts, method);
    if (*solve) {
      if (!solve_opts.has("to") && !solve_opts.has("at"))
        throw nees::domain_error("solve needs --to (or --at)");
      return cmd_solve(solve_path, solve_opts, max_drift);
    }
    if (*sys) return cmd_system(family, sys_opts);
    if (*st) return cmd_selftest(level, tol_scale, json_path);
  } catch (const nees::numerical_error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::domain_error& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return kDomain;
  } catch (const std::invalid_argument& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return kDomain;
  }
  return kOk;
}
