#pragma once

#include "dirac/checks.hpp"
#include "dirac/serialize.hpp"

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace dirac::cli {

// Command implementations behind the `dirac` executable. Each returns the
// process exit status and writes reports to the given streams.

enum Exit : int { ok = 0, property_failure = 1, usage = 2, inconsistent = 3, regularity = 4 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;

  // check
  std::uint64_t seed = 42;
  int instances = 100;
  std::vector<std::string> structures;

  // compose
  std::string da, db, di;
  std::optional<Index> u1, u2, v1, v2;

  // simulate
  std::string model;
  std::string netlist;
  std::string closure;
  std::string params;
  bool closed = false;
  bool project_initial = false;
  double dt = 1e-3;
  double t_final = 1.0;
  std::string scheme = "midpoint";
  std::string format = "csv";

  std::optional<double> tol;  // check: equality tolerance; simulate: consistency tolerance
  std::string output;         // empty: standard output (check, compose) or no trajectory file (simulate)
};

inline const std::vector<std::string>& model_names() {
  static const std::vector<std::string> names = {"lc",           "pendulum-pair",   "oscillator",
                                                 "nonholonomic-particle", "spring-pendulum", "port-controlled"};
  return names;
}

namespace detail {

inline void require_file(const std::string& path, const char* what) {
  if (path.empty()) throw UsageError(std::string(what) + " is required");
  if (!std::filesystem::exists(path)) throw UsageError(std::string(what) + " '" + path + "' does not exist");
}

inline void validate(const RunConfig& c) {
  if (c.tol && !(*c.tol > 0)) throw UsageError("--tol must be positive");
  if (c.command == "check") {
    if (c.instances <= 0) throw UsageError("--instances must be positive");
    for (const auto& p : c.structures) require_file(p, "--structure");
  } else if (c.command == "compose") {
    require_file(c.da, "--da");
    require_file(c.db, "--db");
    require_file(c.di, "--di");
  } else if (c.command == "simulate") {
    if (!(c.dt > 0)) throw UsageError("--dt must be positive");
    if (!(c.t_final >= 0)) throw UsageError("--t-final must be non-negative");
    if (std::find(model_names().begin(), model_names().end(), c.model) == model_names().end())
      throw UsageError("unknown model '" + c.model + "'");
    if (c.scheme != "midpoint" && c.scheme != "rk4") throw UsageError("--scheme must be midpoint or rk4");
    if (c.format != "csv" && c.format != "json") throw UsageError("--format must be csv or json");
    if (c.model == "lc") require_file(c.netlist, "--netlist");
    if (!c.closure.empty()) require_file(c.closure, "--closure");
    if (!c.params.empty()) require_file(c.params, "--params");
  } else {
    throw UsageError("unknown command '" + c.command + "'");
  }
}

template <class F>
int with_output(const std::string& path, F&& write) {
  if (path.empty()) return write(std::cout);
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write '" + path + "'");
  return write(out);
}

inline double param(const json& p, const char* key, double fallback) {
  const auto it = p.find(key);
  if (it == p.end()) return fallback;
  if (!it->is_number()) throw ParseError(std::string("params.") + key + ": expected a number");
  return it->get<double>();
}

inline Vector param_vector(const json& p, const char* key, Index size) {
  const auto it = p.find(key);
  if (it == p.end()) return Vector();
  Vector v = vector_from_json(*it, std::string("params.") + key);
  if (v.size() != size) throw ParseError(std::string("params.") + key + ": expected " + std::to_string(size) + " entries");
  return v;
}

inline std::optional<LinearStructure> closure_of(const RunConfig& c) {
  if (c.closure.empty()) return std::nullopt;
  return read_structure(c.closure);
}

/// Default port-controlled system: a unit mass-spring driven by a force.
inline PortControlledSpec port_controlled_spec(const json& p) {
  Matrix j(2, 2), g(2, 1), q = Matrix::Identity(2, 2);
  j << 0, 1, -1, 0;
  g << 0, 1;
  if (p.contains("J")) j = matrix_from_json(p["J"], -1, "params.J");
  if (p.contains("g")) g = matrix_from_json(p["g"], -1, "params.g");
  if (p.contains("Q")) q = matrix_from_json(p["Q"], -1, "params.Q");
  const Index n = j.rows(), m = g.cols();
  if (q.rows() != n || q.cols() != n) throw ParseError("params.Q: expected an n x n matrix");
  const Matrix qs = 0.5 * (q + q.transpose());
  PortControlledSpec s;
  s.n = n;
  s.m = m;
  s.J_at = [j](const Vector&) { return j; };
  s.g_at = [g](const Vector&) { return g; };
  s.energy = [qs](const Vector& x) { return 0.5 * x.dot(qs * x); };
  s.gradient = [qs](const Vector& x) { return Vector(qs * x); };
  const double amp = param(p, "amplitude", 1.0), omega = param(p, "omega", 1.0);
  s.input = [amp, omega, m](double t) { return Vector(Vector::Constant(m, amp * std::sin(omega * t))); };
  s.x0 = param_vector(p, "x0", n);
  if (s.x0.size() == 0) s.x0 = Vector::Unit(n, 0);
  return s;
}

struct BuiltModel {
  Model model;
  std::optional<PendulumPairSpec> pendulum;
  std::optional<NonholonomicSpec> nonholonomic;
};

inline BuiltModel build(const RunConfig& c) {
  const json p = c.params.empty() ? json::object() : read_json_file(c.params);
  if (!p.is_object()) throw ParseError("params: expected an object");
  BuiltModel b;
  if (c.model == "oscillator") {
    b.model = build_oscillator(param(p, "k", 1.0), param(p, "m", 1.0), param_vector(p, "x0", 2));
  } else if (c.model == "lc") {
    b.model = build_lc(read_netlist(c.netlist), closure_of(c));
  } else if (c.model == "pendulum-pair") {
    PendulumPairSpec s;
    s.M = param(p, "M", s.M);
    s.m = param(p, "m", s.m);
    s.g = param(p, "g", s.g);
    s.theta0 = param(p, "theta0", s.theta0);
    s.x0 = param(p, "x0", std::sin(s.theta0));
    s.y0 = param(p, "y0", std::cos(s.theta0));
    s.ptheta0 = param(p, "ptheta0", s.ptheta0);
    if (p.contains("px0")) s.px0 = param(p, "px0", 0.0);
    if (p.contains("py0")) s.py0 = param(p, "py0", 0.0);
    b.model = build_pendulum_pair(s, c.closed);
    b.pendulum = s;
  } else if (c.model == "nonholonomic-particle") {
    NonholonomicSpec s = nonholonomic_particle(param_vector(p, "x0", 6));
    b.model = build_nonholonomic(s);
    b.nonholonomic = s;
  } else if (c.model == "spring-pendulum") {
    SpringPendulumSpec s;
    s.k = param(p, "k", s.k);
    s.r0 = param(p, "r0", s.r0);
    s.m = param(p, "m", s.m);
    s.force_r = param(p, "force_r", s.force_r);
    s.force_theta = param(p, "force_theta", s.force_theta);
    s.x0 = param_vector(p, "x0", 4);
    b.model = build_spring_pendulum(s);
  } else {
    const PortControlledSpec s = port_controlled_spec(p);
    b.model = build_port_controlled(s, c.closed ? PortMode::closed : PortMode::open, closure_of(c));
  }
  return b;
}

inline double max_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

}  // namespace detail

/// Property batteries plus classification of any structure files given.
inline int run_check(const RunConfig& c, std::ostream& err = std::cerr) {
  std::vector<std::pair<std::string, LinearStructure>> files;
  for (const auto& path : c.structures) files.emplace_back(path, read_structure(path));
  checks::CheckConfig cfg;
  cfg.seed = c.seed;
  cfg.instances = c.instances;
  if (c.tol) cfg.tol = *c.tol;
  const auto results = checks::run_battery(cfg);
  bool passed = true;
  json suites = json::array();
  for (const auto& r : results) {
    passed = passed && r.passed();
    json s = {{"name", r.name},     {"instances", r.instances}, {"failures", r.failures}, {"redrawn", r.redrawn},
              {"worst_defect", r.worst}, {"tolerance", r.tol},  {"passed", r.passed()}};
    if (!r.first_failure.empty()) s["first_failure"] = r.first_failure;
    suites.push_back(std::move(s));
  }
  json structures = json::array();
  for (const auto& [path, s] : files) {
    const ClassReport rep = classify_report(s.span());
    structures.push_back({{"path", path},
                          {"n", s.n()},
                          {"dim", s.dim()},
                          {"class", std::string(to_string(rep.tag))},
                          {"isotropy_defect", rep.isotropy_defect},
                          {"coisotropy_defect", rep.coisotropy_defect},
                          {"borderline", rep.borderline}});
  }
  const json report = {{"schema", "dirac-check/1"}, {"seed", c.seed},       {"tol", cfg.tol},
                       {"instances", cfg.instances}, {"suites", suites},   {"structures", structures},
                       {"passed", passed}};
  for (const auto& r : results)
    if (!r.passed()) err << "suite " << r.name << " failed: " << r.first_failure << '\n';
  return detail::with_output(c.output, [&](std::ostream& out) {
    out << report.dump(2) << '\n';
    return passed ? Exit::ok : Exit::property_failure;
  });
}

/// Composes Da on U1 × U2 with Db on V1 × V2 through Di on U2 × V2. Missing
/// dimensions are inferred from the structure sizes when possible.
inline int run_compose(const RunConfig& c, std::ostream& err = std::cerr) {
  const LinearStructure da = read_structure(c.da), db = read_structure(c.db), di = read_structure(c.di);
  ComposeDims d;
  if (c.u2) d.u2 = *c.u2;
  else if (c.u1) d.u2 = da.n() - *c.u1;
  else throw UsageError("compose: give --u2 or --u1");
  if (c.v2) d.v2 = *c.v2;
  else if (c.v1) d.v2 = db.n() - *c.v1;
  else throw UsageError("compose: give --v2 or --v1");
  d.u1 = c.u1 ? *c.u1 : da.n() - d.u2;
  d.v1 = c.v1 ? *c.v1 : db.n() - d.v2;
  if (d.u1 < 0 || d.u2 < 0 || d.v1 < 0 || d.v2 < 0) throw DimensionError("compose: negative block dimension");
  for (const auto& [s, what] : {std::pair{&da, "Da"}, std::pair{&db, "Db"}, std::pair{&di, "Di"}})
    if (!s->is_dirac())
      throw ClassError(std::string("compose: ") + what + " is " + std::string(to_string(s->class_tag())) + ", not Dirac");
  const LinearStructure out = compose(da, db, di, d);
  if (!out.is_dirac()) {
    err << "compose: result classified as " << to_string(out.class_tag()) << '\n';
    return Exit::property_failure;
  }
  return detail::with_output(c.output, [&](std::ostream& o) {
    o << to_json(out).dump(2) << '\n';
    return Exit::ok;
  });
}

/// Runs a model; the trajectory goes to `output` and a JSON summary to `out`.
inline int run_simulate(const RunConfig& c, std::ostream& out = std::cout) {
  const detail::BuiltModel b = detail::build(c);
  SimulateOptions opt;
  opt.project_initial = c.project_initial;
  if (c.tol) opt.consistency_tol = *c.tol;
  const Trajectory tr = simulate(b.model.field, b.model.x0, c.dt, c.t_final, scheme_from_string(c.scheme), opt);
  if (!c.output.empty()) {
    std::ofstream f(c.output);
    if (!f) throw UsageError("cannot write '" + c.output + "'");
    if (c.format == "csv") write_csv(f, tr);
    else f << to_json(tr).dump() << '\n';
  }
  const PowerReport power = power_balance(tr);
  json summary = {{"schema", "dirac-simulate/1"},
                  {"model", c.model},
                  {"scheme", c.scheme},
                  {"dt", c.dt},
                  {"t_final", c.t_final},
                  {"rows", tr.size()},
                  {"energy_initial", tr.energies.front()},
                  {"energy_drift", energy_drift(tr)},
                  {"max_consistency_residual", detail::max_of(tr.consistency_residuals)},
                  {"max_stage_residual", detail::max_of(tr.stage_residuals)},
                  {"power_balance", {{"with_ports", power.with_ports}, {"max", power.max}, {"mean", power.mean}}}};
  if (b.pendulum && c.closed) {
    summary["max_lock_residual"] = pendulum_lock_residual(tr);
    summary["max_momentum_relation_residual"] = pendulum_momentum_residual(*b.pendulum, tr);
  }
  if (b.nonholonomic) summary["max_constraint_residual"] = nonholonomic_constraint_residual(*b.nonholonomic, tr);
  out << summary.dump(2) << '\n';
  return Exit::ok;
}

/// Validates the configuration, dispatches, and maps errors to exit codes.
inline int run(const RunConfig& c, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  try {
    detail::validate(c);
    if (c.command == "check") return run_check(c, err);
    if (c.command == "compose") return run_compose(c, err);
    return run_simulate(c, out);
  } catch (const InconsistentState& e) {
    err << json({{"error", "inconsistent_state"}, {"message", e.what()}, {"residual", e.residual()},
                 {"step", e.step()}}).dump()
        << '\n';
    return Exit::inconsistent;
  } catch (const RegularityError& e) {
    err << json({{"error", "regularity"}, {"message", e.what()}, {"step", e.step()}}).dump() << '\n';
    return Exit::regularity;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return Exit::usage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return Exit::usage;
  } catch (const DimensionError& e) {
    err << "dimension error: " << e.what() << '\n';
    return Exit::usage;
  } catch (const ClassError& e) {
    err << "class error: " << e.what() << '\n';
    return Exit::usage;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << '\n';
    return Exit::usage;
  }
}

}  // namespace dirac::cli
