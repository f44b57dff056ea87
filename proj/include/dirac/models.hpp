#pragma once

#include "dirac/dynamics.hpp"
#include "dirac/io_structure.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dirac {

/// A model ready to simulate: the IO-structure at each state, the Dirac system
/// actually integrated, and a suggested initial state.
struct Model {
  std::string name;
  std::function<IOStructure(const Vector&)> io_at;
  StateField field;
  Vector x0;
};

/// Canonical symplectic form on R^n x R^n* (coordinates (q, p)) in the flat
/// convention: flat(q̇, ṗ) = (-ṗ, q̇), so Hamilton's equations read
/// (ẋ, dH) ∈ graph.
inline TwoForm canonical_form(Index config_dim) {
  const Index n = config_dim;
  Matrix w = Matrix::Zero(2 * n, 2 * n);
  w.topRightCorner(n, n) = -Matrix::Identity(n, n);
  w.bottomLeftCorner(n, n) = Matrix::Identity(n, n);
  return TwoForm(w);
}

/// Pullback of dq ∧ dp to M = TQ ⊕ T*Q in (q, v, p) blocks; the v rows and
/// columns vanish.
inline TwoForm pulled_back_form(Index config_dim) {
  const Index n = config_dim;
  Matrix w = Matrix::Zero(3 * n, 3 * n);
  w.block(0, 2 * n, n, n) = -Matrix::Identity(n, n);
  w.block(2 * n, 0, n, n) = Matrix::Identity(n, n);
  return TwoForm(w);
}

namespace detail {

inline PortSample port_sample(const IOStructure& a, const Vector& v, const Vector& alpha) {
  const auto w = membership_witness(a, v, alpha, std::numeric_limits<double>::infinity());
  return {w->u2, w->alpha2};
}

}  // namespace detail

// Port-controlled systems: ẋ = J(x) dE + g(x) f, e = g(x)ᵀ dE.

struct PortControlledSpec {
  Index n = 0;
  Index m = 0;
  std::function<Matrix(const Vector&)> J_at;
  std::function<Matrix(const Vector&)> g_at;
  std::function<double(const Vector&)> energy;
  std::function<Vector(const Vector&)> gradient;
  /// Prescribed port flows f(t) for the open system.
  std::function<Vector(double)> input;
  Vector x0;
};

enum class PortMode { open, closed };

/// Open: OFIO with D_U1 = graph of J(x), driven by the prescribed flows.
/// Closed: the same structure interconnected through `d_ports` (default
/// U2 ⊕ {0}, which gives the constraint gᵀ dE = 0).
inline Model build_port_controlled(const PortControlledSpec& spec, PortMode mode,
                                   std::optional<LinearStructure> d_ports = std::nullopt) {
  require_dims(spec.x0.size() == spec.n, "port-controlled: x0 has wrong size");
  for (const Vector& probe : {spec.x0, Vector(Vector::Zero(spec.n)), Vector(Vector::Ones(spec.n))}) {
    const Matrix j = spec.J_at(probe);
    require_dims(j.rows() == spec.n && j.cols() == spec.n, "port-controlled: J has wrong shape");
    if (j.size() > 0 && (j + j.transpose()).cwiseAbs().maxCoeff() > 1e-10) throw ClassError("port-controlled: J is not skew");
    const Matrix g = spec.g_at(probe);
    require_dims(g.rows() == spec.n && g.cols() == spec.m, "port-controlled: g has wrong shape");
  }
  auto open_at = [spec](const Vector& x) {
    return make_ofio(graph(Bivector(spec.J_at(x))), spec.g_at(x));
  };
  Model model;
  model.x0 = spec.x0;
  model.field.n = spec.n;
  model.field.energy = spec.energy;
  model.field.gradient = spec.gradient;
  if (mode == PortMode::open) {
    model.name = "port-controlled (open)";
    model.io_at = open_at;
    model.field.structure_at = [spec](const Vector& x) { return kernel_rep_of(graph(Bivector(spec.J_at(x)))); };
    auto input = spec.input ? spec.input : [m = spec.m](double) { return Vector(Vector::Zero(m)); };
    model.field.flow_offset = [spec, input](double t, const Vector& x) { return Vector(spec.g_at(x) * input(t)); };
    model.field.port_extractor = [spec, input](double t, const Vector& x, const Vector&) {
      return PortSample{input(t), spec.g_at(x).transpose() * spec.gradient(x)};
    };
  } else {
    model.name = "port-controlled (closed)";
    const LinearStructure ports = d_ports ? *d_ports : pure_flows(spec.m);
    model.io_at = [open_at, ports](const Vector& x) { return interconnect(open_at(x), ports); };
    auto io_at = model.io_at;
    model.field.structure_at = [io_at](const Vector& x) { return kernel_rep_of(effective_structure(io_at(x))); };
    model.field.port_extractor = [io_at, spec](double, const Vector& x, const Vector& v) {
      return detail::port_sample(io_at(x), v, spec.gradient(x));
    };
  }
  return model;
}

/// Canonical oscillator: graph of the symplectic form on R^2, E = (k q² + p²/m) / 2.
inline Model build_oscillator(double k = 1.0, double m = 1.0, Vector x0 = Vector()) {
  if (!(k > 0) || !(m > 0)) throw std::invalid_argument("oscillator: k and m must be positive");
  Model model;
  model.name = "oscillator";
  const LinearStructure d = graph(canonical_form(1));
  const KernelRep rep = kernel_rep_of(d);
  model.io_at = [d](const Vector&) { return make_fio(d, pure_flows(0), Matrix(2, 0)); };
  model.field.n = 2;
  model.field.structure_at = [rep](const Vector&) { return rep; };
  model.field.energy = [k, m](const Vector& x) { return 0.5 * (k * x(0) * x(0) + x(1) * x(1) / m); };
  model.field.gradient = [k, m](const Vector& x) {
    Vector g(2);
    g << k * x(0), x(1) / m;
    return g;
  };
  model.x0 = x0.size() == 2 ? x0 : Vector(Vector::Unit(2, 0));
  return model;
}

// LC circuits.

enum class BranchKind { inductor, capacitor, port };

struct Branch {
  std::string id;
  BranchKind kind = BranchKind::inductor;
  double value = 0.0;
};

struct Netlist {
  std::vector<Branch> branches;
  Matrix kcl;                      // rows act on the currents of all branches, in branch order
  std::vector<std::string> ports;  // order of the port coordinates
  Vector q0;                       // optional, one entry per element branch
  Vector i0;                       // optional, one entry per element branch
};

/// Element (non-port) branches of a netlist, with derived matrices.
struct CircuitData {
  std::vector<Branch> elements;
  Matrix k_elements;   // KCL columns of the element branches
  Matrix k_ports;      // KCL columns of the port branches, in port order
  Subspace delta;      // admissible element currents, ports left free
  Matrix port_map;     // element currents -> port currents
};

inline CircuitData analyse_netlist(const Netlist& net) {
  const Index nb = static_cast<Index>(net.branches.size());
  require_dims(net.kcl.cols() == nb, "netlist: kcl has " + std::to_string(net.kcl.cols()) + " columns for " +
                                         std::to_string(nb) + " branches");
  CircuitData c;
  std::vector<Index> elem_cols;
  std::map<std::string, Index> port_col;
  for (Index i = 0; i < nb; ++i) {
    const Branch& b = net.branches[i];
    if (b.kind == BranchKind::port) {
      port_col[b.id] = i;
    } else {
      if (!(b.value > 0)) throw std::invalid_argument("netlist: element " + b.id + " needs a positive value");
      elem_cols.push_back(i);
      c.elements.push_back(b);
    }
  }
  if (port_col.size() != net.ports.size()) throw std::invalid_argument("netlist: port list does not match port branches");
  if (c.elements.empty()) throw std::invalid_argument("netlist: no L or C elements");
  if (net.kcl.rows() > 0) {
    const Subspace rows = Subspace::span_of(net.kcl.transpose());
    if (rows.dim() != net.kcl.rows()) throw std::invalid_argument("netlist: KCL rows are linearly dependent");
  }
  const Index ne = static_cast<Index>(elem_cols.size()), np = static_cast<Index>(net.ports.size());
  c.k_elements = Matrix(net.kcl.rows(), ne);
  for (Index j = 0; j < ne; ++j) c.k_elements.col(j) = net.kcl.col(elem_cols[j]);
  c.k_ports = Matrix(net.kcl.rows(), np);
  for (Index j = 0; j < np; ++j) {
    const auto it = port_col.find(net.ports[j]);
    if (it == port_col.end()) throw std::invalid_argument("netlist: unknown port " + net.ports[j]);
    c.k_ports.col(j) = net.kcl.col(it->second);
  }
  if (np > 0) {
    const Subspace range = Subspace::span_of(c.k_ports);
    if (range.dim() != np) throw std::invalid_argument("netlist: port currents are not determined by KCL");
    const Matrix resid = (Matrix::Identity(net.kcl.rows(), net.kcl.rows()) - range.projector()) * c.k_elements;
    c.delta = null_space(resid);
    c.port_map = -c.k_ports.completeOrthogonalDecomposition().pseudoInverse() * c.k_elements;
  } else {
    c.delta = null_space(c.k_elements);
    c.port_map = Matrix(0, ne);
  }
  return c;
}

/// D_1 on M = TQ ⊕ T*Q: the pulled-back canonical form restricted to
/// {q̇ ∈ Δ}. Its elements satisfy q̇ ∈ Δ, ṗ + α ∈ Δ°, γ = 0, β = q̇.
inline LinearStructure lc_dirac(const Subspace& delta) {
  const Index n = delta.ambient_dim();
  Matrix dist = Matrix::Zero(3 * n, delta.dim() + 2 * n);
  dist.block(0, 0, n, delta.dim()) = delta.basis();
  dist.block(n, delta.dim(), 2 * n, 2 * n).setIdentity();
  return from_pair(Subspace::span_of(dist), pulled_back_form(n));
}

/// E(q, v, p) = p·v - L(q, v), L = Σ ½ L_i v_i² - Σ ½ q_j² / C_j.
inline double lc_energy(const std::vector<Branch>& el, const Vector& x) {
  const Index n = static_cast<Index>(el.size());
  double e = x.segment(2 * n, n).dot(x.segment(n, n));
  for (Index i = 0; i < n; ++i) {
    if (el[i].kind == BranchKind::inductor) e -= 0.5 * el[i].value * x(n + i) * x(n + i);
    else e += 0.5 * x(i) * x(i) / el[i].value;
  }
  return e;
}

inline Vector lc_gradient(const std::vector<Branch>& el, const Vector& x) {
  const Index n = static_cast<Index>(el.size());
  Vector g(3 * n);
  for (Index i = 0; i < n; ++i) {
    const bool ind = el[i].kind == BranchKind::inductor;
    g(i) = ind ? 0.0 : x(i) / el[i].value;
    g(n + i) = x(2 * n + i) - (ind ? el[i].value * x(n + i) : 0.0);
    g(2 * n + i) = x(n + i);
  }
  return g;
}

/// OBIO for a netlist with ports (BIO once closed, or for a port-less
/// netlist). Open ports are simulated with zero port efforts.
inline Model build_lc(const Netlist& net, std::optional<LinearStructure> closure = std::nullopt) {
  const CircuitData c = analyse_netlist(net);
  const Index n = static_cast<Index>(c.elements.size()), m = static_cast<Index>(net.ports.size());
  Matrix p = Matrix::Zero(m, 3 * n);
  p.leftCols(n) = c.port_map;
  const LinearStructure d1 = lc_dirac(c.delta);
  IOStructure io;
  if (closure) {
    io = interconnect(make_obio(d1, p), *closure);
  } else if (m > 0) {
    io = make_obio(d1, p);
  } else {
    io = make_bio(d1, pure_flows(0), p);
  }
  const IOStructure simulated = is_open(io.kind) ? interconnect(io, pure_flows(m)) : io;
  const KernelRep rep = kernel_rep_of(effective_structure(simulated));
  Model model;
  model.name = "lc";
  model.io_at = [io](const Vector&) { return io; };
  model.field.n = 3 * n;
  model.field.structure_at = [rep](const Vector&) { return rep; };
  model.field.energy = [el = c.elements](const Vector& x) { return lc_energy(el, x); };
  model.field.gradient = [el = c.elements](const Vector& x) { return lc_gradient(el, x); };
  if (m > 0) {
    model.field.port_extractor = [simulated, el = c.elements](double, const Vector& x, const Vector& v) {
      return detail::port_sample(simulated, v, lc_gradient(el, x));
    };
  }
  Vector q0 = Vector::Zero(n), i0 = Vector::Zero(n);
  for (Index i = 0; i < n; ++i)
    if (c.elements[i].kind == BranchKind::capacitor) q0(i) = c.elements[i].value;  // unit voltage
  if (net.q0.size() > 0) {
    require_dims(net.q0.size() == n, "netlist: q0 needs one entry per element");
    q0 = net.q0;
  }
  if (net.i0.size() > 0) {
    require_dims(net.i0.size() == n, "netlist: i0 needs one entry per element");
    i0 = net.i0;
  }
  model.x0 = Vector(3 * n);
  model.x0 << q0, i0, Vector::Zero(n);
  for (Index i = 0; i < n; ++i)
    if (c.elements[i].kind == BranchKind::inductor) model.x0(2 * n + i) = c.elements[i].value * i0(i);
  return model;
}

// Nonholonomic systems on T*Q.

struct NonholonomicSpec {
  Index config_dim = 0;
  std::function<double(const Vector&)> hamiltonian;
  std::function<Vector(const Vector&)> gradient;
  /// Constraint one-forms μ^a(q) as rows (k × config_dim).
  std::function<Matrix(const Vector&)> mu_at;
  Vector x0;
};

/// FIO with D_1 = graph of the canonical form, g(λ) = λ_a μ^a ∂/∂p and
/// D_U2 = U2 ⊕ {0}. The port flows u2 are the multipliers λ.
inline Model build_nonholonomic(const NonholonomicSpec& spec) {
  const Index n = spec.config_dim;
  const LinearStructure d1 = graph(canonical_form(n));
  auto io_at = [spec, d1, n](const Vector& x) {
    const Matrix mu = spec.mu_at(x.head(n));
    require_dims(mu.cols() == n, "nonholonomic: constraint forms have wrong width");
    const Index k = mu.rows();
    if (k > 0 && Subspace::span_of(mu.transpose()).dim() != k)
      throw RegularityError("nonholonomic: constraint forms are dependent at this state", -1);
    Matrix g = Matrix::Zero(2 * n, k);
    g.bottomRows(n) = mu.transpose();
    return make_fio(d1, pure_flows(k), g);
  };
  Model model;
  model.name = "nonholonomic";
  model.io_at = io_at;
  model.field.n = 2 * n;
  model.field.structure_at = [io_at](const Vector& x) { return kernel_rep_of(effective_structure(io_at(x))); };
  model.field.energy = spec.hamiltonian;
  model.field.gradient = spec.gradient;
  model.field.port_extractor = [io_at, spec](double, const Vector& x, const Vector& v) {
    return detail::port_sample(io_at(x), v, spec.gradient(x));
  };
  model.x0 = spec.x0;
  return model;
}

/// Particle in R^3 with H = |p|²/2 and the constraint ż = y ẋ (μ = dz - y dx).
inline NonholonomicSpec nonholonomic_particle(Vector x0 = Vector()) {
  NonholonomicSpec s;
  s.config_dim = 3;
  s.hamiltonian = [](const Vector& x) { return 0.5 * x.tail(3).squaredNorm(); };
  s.gradient = [](const Vector& x) {
    Vector g = Vector::Zero(6);
    g.tail(3) = x.tail(3);
    return g;
  };
  s.mu_at = [](const Vector& q) {
    Matrix mu(1, 3);
    mu << -q(1), 0.0, 1.0;
    return mu;
  };
  if (x0.size() == 6) {
    s.x0 = x0;
  } else {
    s.x0 = Vector::Zero(6);
    s.x0(3) = 1.0;  // p_x
    s.x0(4) = 0.5;  // p_y
  }
  return s;
}

// Spring pendulum in polar coordinates, x = (r, θ, v_r, v_θ, p_r, p_θ).

struct SpringPendulumSpec {
  double k = 1.0;
  double r0 = 1.0;
  double m = 1.0;
  double force_r = 0.0;
  double force_theta = 0.0;
  Vector x0;  // optional (r, θ, v_r, v_θ); momenta are set from the velocities
};

inline double spring_pendulum_energy(const SpringPendulumSpec& s, const Vector& x) {
  const double r = x(0), vr = x(2), vt = x(3);
  return x(4) * vr + x(5) * vt - 0.5 * s.m * (vr * vr + r * r * vt * vt) + 0.5 * s.k * (r - s.r0) * (r - s.r0);
}

inline Model build_spring_pendulum(const SpringPendulumSpec& spec) {
  if (!(spec.k > 0) || !(spec.r0 > 0) || !(spec.m > 0))
    throw std::invalid_argument("spring pendulum: k, r0 and m must be positive");
  const LinearStructure d1 = graph(pulled_back_form(2));
  Matrix g = Matrix::Zero(6, 2);
  g.bottomRows(2).setIdentity();
  const IOStructure io = make_ofio(d1, g);
  const KernelRep rep = kernel_rep_of(d1);
  Vector force(2);
  force << spec.force_r, spec.force_theta;
  Model model;
  model.name = "spring-pendulum";
  model.io_at = [io](const Vector&) { return io; };
  model.field.n = 6;
  model.field.structure_at = [rep](const Vector&) { return rep; };
  model.field.energy = [spec](const Vector& x) { return spring_pendulum_energy(spec, x); };
  model.field.gradient = [spec](const Vector& x) {
    const double r = x(0), vr = x(2), vt = x(3);
    Vector gr(6);
    gr << -spec.m * r * vt * vt + spec.k * (r - spec.r0), 0.0, x(4) - spec.m * vr, x(5) - spec.m * r * r * vt, vr, vt;
    return gr;
  };
  model.field.flow_offset = [g, force](double, const Vector&) { return Vector(g * force); };
  model.field.port_extractor = [g, force, grad = model.field.gradient](double, const Vector& x, const Vector&) {
    return PortSample{force, g.transpose() * grad(x)};
  };
  Vector q = spec.x0.size() == 4 ? spec.x0 : Vector((Vector(4) << spec.r0, 0.0, 0.0, 0.0).finished());
  model.x0 = Vector(6);
  model.x0 << q, spec.m * q(2), spec.m * q(0) * q(0) * q(3);
  return model;
}

// Pendulum of mass M (unit rod) and a free mass m, x = (θ, x, y, p_θ, p_x, p_y),
// y pointing down.

struct PendulumPairSpec {
  double M = 1.0;
  double m = 1.0;
  double g = 9.81;
  double theta0 = 0.5;
  double x0 = std::sin(0.5);
  double y0 = std::cos(0.5);
  double ptheta0 = 0.0;
  /// When absent, the free mass starts with the velocity of the pendulum bob.
  std::optional<double> px0;
  std::optional<double> py0;
};

inline double pendulum_pair_energy(const PendulumPairSpec& s, const Vector& x) {
  return x(3) * x(3) / (2 * s.M) + (x(4) * x(4) + x(5) * x(5)) / (2 * s.m) - s.M * s.g * std::cos(x(0)) -
         s.m * s.g * x(2);
}

/// Port map p_A(θ̇, ẋ, ẏ, ...) = (θ̇ cos θ, -θ̇ sin θ, ẋ, ẏ).
inline Matrix pendulum_port_map(double theta) {
  Matrix p = Matrix::Zero(4, 6);
  p(0, 0) = std::cos(theta);
  p(1, 0) = -std::sin(theta);
  p(2, 1) = 1.0;
  p(3, 2) = 1.0;
  return p;
}

/// {f1 = f3, f2 = f4, e1 = -e3, e2 = -e4}.
inline LinearStructure pendulum_closure() {
  Matrix flows = Matrix::Zero(4, 4), efforts = Matrix::Zero(4, 4);
  flows(0, 0) = flows(2, 0) = 1.0;
  flows(1, 1) = flows(3, 1) = 1.0;
  efforts(0, 2) = 1.0;
  efforts(2, 2) = -1.0;
  efforts(1, 3) = 1.0;
  efforts(3, 3) = -1.0;
  return LinearStructure::from_blocks(flows, efforts);
}

/// OBIO (open) or BIO (closed with `pendulum_closure`). Open ports are
/// simulated with zero port efforts, i.e. two independent subsystems.
inline Model build_pendulum_pair(const PendulumPairSpec& spec, bool closed) {
  if (!(spec.M > 0) || !(spec.m > 0) || !(spec.g > 0))
    throw std::invalid_argument("pendulum pair: masses and gravity must be positive");
  const LinearStructure d1 = graph(canonical_form(3));
  const LinearStructure ports = closed ? pendulum_closure() : pure_flows(4);
  auto io_at = [d1, closed, ports](const Vector& x) {
    const IOStructure open = make_obio(d1, pendulum_port_map(x(0)));
    return closed ? interconnect(open, ports) : open;
  };
  auto simulated = [d1, ports](const Vector& x) { return interconnect(make_obio(d1, pendulum_port_map(x(0))), ports); };
  Model model;
  model.name = closed ? "pendulum-pair (closed)" : "pendulum-pair (open)";
  model.io_at = io_at;
  model.field.n = 6;
  model.field.structure_at = [simulated](const Vector& x) { return kernel_rep_of(effective_structure(simulated(x))); };
  model.field.energy = [spec](const Vector& x) { return pendulum_pair_energy(spec, x); };
  model.field.gradient = [spec](const Vector& x) {
    Vector g(6);
    g << spec.M * spec.g * std::sin(x(0)), 0.0, -spec.m * spec.g, x(3) / spec.M, x(4) / spec.m, x(5) / spec.m;
    return g;
  };
  model.field.port_extractor = [simulated, grad = model.field.gradient](double, const Vector& x, const Vector& v) {
    return detail::port_sample(simulated(x), v, grad(x));
  };
  const double w = spec.ptheta0 / spec.M;
  model.x0 = Vector(6);
  model.x0 << spec.theta0, spec.x0, spec.y0, spec.ptheta0, spec.px0.value_or(spec.m * w * std::cos(spec.theta0)),
      spec.py0.value_or(-spec.m * w * std::sin(spec.theta0));
  return model;
}

// Trajectory diagnostics used by the CLI summary and the tests.

/// Largest deviation from x - sin θ = const and y - cos θ = const.
inline double pendulum_lock_residual(const Trajectory& tr) {
  if (tr.size() == 0) return 0.0;
  const Vector& a = tr.states.front();
  const double cx = a(1) - std::sin(a(0)), cy = a(2) - std::cos(a(0));
  double r = 0.0;
  for (const Vector& x : tr.states)
    r = std::max({r, std::abs(x(1) - std::sin(x(0)) - cx), std::abs(x(2) - std::cos(x(0)) - cy)});
  return r;
}

/// Per-step |ṗ_θ + (M+m) g sin θ + ṗ_x cos θ - ṗ_y sin θ| with difference
/// quotients and θ at the step midpoint.
inline double pendulum_momentum_residual(const PendulumPairSpec& s, const Trajectory& tr) {
  double r = 0.0;
  for (std::size_t k = 1; k < tr.size(); ++k) {
    const double h = tr.times[k] - tr.times[k - 1];
    const Vector d = (tr.states[k] - tr.states[k - 1]) / h;
    const double th = 0.5 * (tr.states[k](0) + tr.states[k - 1](0));
    r = std::max(r, std::abs(d(3) + (s.M + s.m) * s.g * std::sin(th) + d(4) * std::cos(th) - d(5) * std::sin(th)));
  }
  return r;
}

/// Largest |μ(q) ∂H/∂p| along the trajectory.
inline double nonholonomic_constraint_residual(const NonholonomicSpec& s, const Trajectory& tr) {
  const Index n = s.config_dim;
  double r = 0.0;
  for (const Vector& x : tr.states) {
    const Vector v = s.gradient(x).tail(n);
    const Vector c = s.mu_at(x.head(n)) * v;
    if (c.size() > 0) r = std::max(r, c.cwiseAbs().maxCoeff());
  }
  return r;
}

/// Angular frequency from the upward zero crossings of a sampled signal,
/// located by linear interpolation. Returns 0 with fewer than two crossings.
inline double measured_angular_frequency(const std::vector<double>& t, const std::vector<double>& y) {
  std::vector<double> crossings;
  for (std::size_t k = 1; k < y.size(); ++k)
    if (y[k - 1] < 0.0 && y[k] >= 0.0) crossings.push_back(t[k - 1] + (t[k] - t[k - 1]) * (-y[k - 1]) / (y[k] - y[k - 1]));
  if (crossings.size() < 2) return 0.0;
  const double period = (crossings.back() - crossings.front()) / static_cast<double>(crossings.size() - 1);
  return 2.0 * std::acos(-1.0) / period;
}

}  // namespace dirac
