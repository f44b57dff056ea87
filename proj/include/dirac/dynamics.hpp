#pragma once

#include "dirac/structure.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace dirac {

/// D = {(v, α) : flow_mat v + effort_mat α = 0}.
struct KernelRep {
  Matrix flow_mat;
  Matrix effort_mat;

  Index n() const { return flow_mat.cols(); }
  Index rows() const { return flow_mat.rows(); }

  Matrix stacked() const {
    Matrix m(rows(), 2 * n());
    m << flow_mat, effort_mat;
    return m;
  }

  Subspace span() const { return null_space(stacked()); }

  /// Largest entry of EFᵀ + FEᵀ, zero for Dirac representations.
  double skew_defect() const {
    if (flow_mat.size() == 0) return 0.0;
    return (flow_mat * effort_mat.transpose() + effort_mat * flow_mat.transpose()).cwiseAbs().maxCoeff();
  }
};

/// Rows spanning the Euclidean complement of D, which for a Dirac D is the
/// block swap of D itself. Normalized to (effort_mat = I) when possible, so a
/// graph of ω comes out as (-ω, I).
inline KernelRep kernel_rep_of(const LinearStructure& d) {
  if (!d.is_dirac()) throw ClassError(std::string("kernel_rep_of: structure is ") + std::string(to_string(d.class_tag())));
  KernelRep k{Matrix(d.effort_block().transpose()), Matrix(d.flow_block().transpose())};
  if (d.n() == 0) return k;
  Eigen::JacobiSVD<Matrix> svd(k.effort_mat);
  const Vector& s = svd.singularValues();
  if (s(s.size() - 1) > 1e-8 * s(0)) {
    const Eigen::PartialPivLU<Matrix> lu(k.effort_mat);
    k.flow_mat = lu.solve(k.flow_mat);
    k.effort_mat = Matrix::Identity(d.n(), d.n());
  }
  return k;
}

inline LinearStructure structure_of(const KernelRep& k) { return LinearStructure(k.span()); }

class InconsistentState : public std::runtime_error {
 public:
  InconsistentState(const std::string& what, double residual, long step)
      : std::runtime_error(what), residual_(residual), step_(step) {}
  double residual() const { return residual_; }
  long step() const { return step_; }

 private:
  double residual_;
  long step_;
};

class RegularityError : public std::runtime_error {
 public:
  RegularityError(const std::string& what, long step) : std::runtime_error(what), step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

struct PortSample {
  Vector u2;
  Vector alpha2;
};

/// A state-dependent Dirac system (ẋ - f(t, x), dE(x) - e(t, x)) ∈ D_x. The
/// optional offsets carry prescribed inputs of open systems; the optional
/// extractor turns a state and velocity into port flows and efforts.
struct StateField {
  Index n = 0;
  std::function<KernelRep(const Vector&)> structure_at;
  std::function<double(const Vector&)> energy;
  std::function<Vector(const Vector&)> gradient;
  std::function<Vector(double, const Vector&)> flow_offset;
  std::function<Vector(double, const Vector&)> effort_offset;
  std::function<PortSample(double, const Vector&, const Vector&)> port_extractor;
};

/// Largest relative mismatch between `gradient` and central differences of
/// `energy` over the probe states.
inline double gradient_check(const StateField& f, const std::vector<Vector>& probes, double h = 1e-6) {
  double worst = 0.0;
  for (const auto& x : probes) {
    const Vector g = f.gradient(x);
    Vector fd(f.n);
    for (Index i = 0; i < f.n; ++i) {
      Vector xp = x, xm = x;
      xp(i) += h;
      xm(i) -= h;
      fd(i) = (f.energy(xp) - f.energy(xm)) / (2 * h);
    }
    worst = std::max(worst, (g - fd).norm() / std::max(1.0, g.norm()));
  }
  return worst;
}

/// The solution set of a kernel system at one point, {v : Ê v = -F̂ α}, as a
/// minimum-norm particular solution plus the free directions G = ker Ê.
struct LocalSolve {
  Matrix e_hat;          // orthonormalized rows, flow part
  Matrix f_hat;          // orthonormalized rows, effort part
  Matrix e_pinv;         // Ê⁺
  Matrix free_proj;      // projector onto G
  Index free_dim = 0;

  Vector particular(const Vector& alpha) const { return -e_pinv * (f_hat * alpha); }
  /// Distance of -F̂α from range Ê; equals |P_G α| for Dirac structures.
  double consistency(const Vector& alpha) const { return (free_proj * alpha).norm(); }
};

inline LocalSolve local_solve(const KernelRep& k, long step = -1) {
  const Index n = k.n();
  LocalSolve ls;
  if (n == 0) {
    ls.e_hat = ls.f_hat = ls.e_pinv = ls.free_proj = Matrix(0, 0);
    return ls;
  }
  const Matrix st = k.stacked();
  Eigen::JacobiSVD<Matrix> svd(st, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Index r = detail::numerical_rank(svd.singularValues(), numeric_policy().rank_rel_tol);
  if (r != n)
    throw RegularityError("structure has rank " + std::to_string(r) + " instead of " + std::to_string(n), step);
  const Matrix rows = svd.matrixV().leftCols(r).transpose();
  ls.e_hat = rows.leftCols(n);
  ls.f_hat = rows.rightCols(n);
  Eigen::JacobiSVD<Matrix> es(ls.e_hat, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& sv = es.singularValues();
  // Ê has orthonormal-row companions, so its singular values live in [0, 1].
  Index re = 0;
  while (re < sv.size() && sv(re) > 1e-9) ++re;
  ls.free_dim = n - re;
  Matrix sinv = Matrix::Zero(n, n);
  for (Index i = 0; i < re; ++i) sinv(i, i) = 1.0 / sv(i);
  ls.e_pinv = es.matrixV() * sinv * es.matrixU().transpose();
  const Matrix g = es.matrixV().rightCols(ls.free_dim);
  ls.free_proj = g * g.transpose();
  return ls;
}

enum class Scheme { midpoint, rk4 };

inline Scheme scheme_from_string(const std::string& s) {
  if (s == "midpoint") return Scheme::midpoint;
  if (s == "rk4") return Scheme::rk4;
  throw std::invalid_argument("unknown scheme '" + s + "'");
}

struct StepDiagnostics {
  double stage_residual = 0.0;             // differential rows of Ê(v - f) + F̂α at the stage point
  double stage_constraint_residual = 0.0;  // algebraic rows at the stage point
  double consistency_residual = 0.0;  // |P_G α| at the new state
  int iterations = 0;
  Index free_dim = 0;
  Vector velocity;                    // (x_next - x) / dt
  double stage_time = 0.0;
  Vector stage_state;
};

struct StepOptions {
  double newton_tol = 1e-10;
  int max_iterations = 50;
  double fd_step = 1e-7;
};

namespace detail {

inline Vector effort_at(const StateField& f, double t, const Vector& x) {
  Vector a = f.gradient(x);
  if (f.effort_offset) a -= f.effort_offset(t, x);
  return a;
}

inline Vector flow_offset_at(const StateField& f, double t, const Vector& x) {
  return f.flow_offset ? f.flow_offset(t, x) : Vector::Zero(f.n);
}

/// Splits Ê(v - f) + F̂α into its component in range Ê (the differential
/// rows) and the rest, which only depends on α (the algebraic rows).
inline std::pair<double, double> stage_residuals(const LocalSolve& ls, const Vector& v, const Vector& off,
                                                 const Vector& alpha) {
  const Vector full = ls.e_hat * (v - off) + ls.f_hat * alpha;
  const Vector diff = ls.e_hat * (ls.e_pinv * full);
  return {diff.norm(), (full - diff).norm()};
}

/// Newton iteration whose finite-difference Jacobian is kept between calls
/// and refreshed only when the contraction stalls.
class ChordNewton {
 public:
  void invalidate() { valid_ = false; }

  template <class Residual>
  Vector solve(Residual&& res, Vector z, const StepOptions& opt, double tol, int& iterations, long step) {
    if (jac_.rows() != z.size()) valid_ = false;
    Vector r = res(z);
    iterations = 0;
    bool fresh = false;
    while (r.lpNorm<Eigen::Infinity>() > tol) {
      if (iterations >= opt.max_iterations)
        throw RegularityError("Newton iteration did not converge (residual " + std::to_string(r.norm()) + ")", step);
      if (!valid_) {
        refresh(res, z, r, opt);
        fresh = true;
      }
      Vector zn = z - cod_.solve(r);
      Vector rn = res(zn);
      ++iterations;
      if (!fresh && rn.lpNorm<Eigen::Infinity>() > 0.25 * r.lpNorm<Eigen::Infinity>()) {
        valid_ = false;
        if (rn.norm() >= r.norm()) {
          r = res(z);
          continue;
        }
      }
      z = std::move(zn);
      r = std::move(rn);
    }
    return z;
  }

 private:
  template <class Residual>
  void refresh(Residual& res, const Vector& z, const Vector& r, const StepOptions& opt) {
    const Index m = z.size();
    jac_.resize(m, m);
    for (Index j = 0; j < m; ++j) {
      const double h = opt.fd_step * std::max(1.0, std::abs(z(j)));
      Vector zp = z;
      zp(j) += h;
      jac_.col(j) = (res(zp) - r) / h;
    }
    cod_.compute(jac_);
    valid_ = true;
  }

  Matrix jac_;
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod_;
  bool valid_ = false;
};

}  // namespace detail

/// Advances a Dirac system one step at a time, keeping the Newton Jacobian,
/// the basis of free directions and the structure at the current state
/// between calls.
///
/// Midpoint: the differential rows are the implicit midpoint rule with the
/// free directions G(x) scaled by unknown coefficients, and the algebraic
/// rows (P_G α = 0) are imposed at the new state in the same Newton solve.
/// RK4: classical RK4 on the minimum-norm field, then a Newton projection
/// along G(x) onto the constraint set.
class Stepper {
 public:
  Stepper(const StateField& f, Scheme scheme, StepOptions opt = {}) : f_(f), scheme_(scheme), opt_(opt) {}

  std::pair<Vector, StepDiagnostics> advance(double t, const Vector& x, double dt, long step_index = -1) {
    require_dims(x.size() == f_.n, "step: state has wrong dimension");
    if (!(dt > 0)) throw std::invalid_argument("step: dt must be positive");
    const Index n = f_.n;
    const LocalSolve ls0 = (have_start_ && start_x_ == x) ? start_ls_ : local_solve(f_.structure_at(x), step_index);
    const Index k = ls0.free_dim;
    const Matrix g0 = free_basis(ls0, k);
    if (dt != newton_dt_ || k != newton_k_) newton_.invalidate();
    newton_dt_ = dt;
    newton_k_ = k;
    const double t1 = t + dt;
    auto checked = [&](const Vector& xx) {
      LocalSolve ls = local_solve(f_.structure_at(xx), step_index);
      if (ls.free_dim != k)
        throw RegularityError("rank of the flow constraints changed from " + std::to_string(n - k) + " to " +
                                  std::to_string(n - ls.free_dim),
                              step_index);
      return ls;
    };
    StepDiagnostics diag;
    Vector y;
    LocalSolve l1;
    bool have_l1 = false;
    if (scheme_ == Scheme::midpoint) {
      const double tm = t + 0.5 * dt;
      const double tol = std::max(opt_.newton_tol, 64 * std::numeric_limits<double>::epsilon() *
                                                       std::max(1.0, x.lpNorm<Eigen::Infinity>()) / dt);
      LocalSolve last_m, last_1;
      Vector last_z;
      auto residual = [&](const Vector& z) {
        const Vector yy = z.head(n);
        const Vector xm = 0.5 * (x + yy);
        last_m = checked(xm);
        const Vector am = detail::effort_at(f_, tm, xm);
        Vector r(n + k);
        r.head(n) = (yy - x) / dt - detail::flow_offset_at(f_, tm, xm) - last_m.particular(am) -
                    last_m.free_proj * (g0 * z.tail(k));
        if (k > 0) {
          last_1 = checked(yy);
          r.tail(k) = g0.transpose() * (last_1.free_proj * detail::effort_at(f_, t1, yy));
        }
        last_z = z;
        return r;
      };
      Vector z0(n + k);
      if (v_prev_.size() == n && c_prev_.size() == k) {
        z0.head(n) = x + dt * v_prev_;
        z0.tail(k) = c_prev_;
      } else {
        z0.head(n) = x + dt * (detail::flow_offset_at(f_, t, x) + ls0.particular(detail::effort_at(f_, t, x)));
        z0.tail(k).setZero();
      }
      const Vector z = newton_.solve(residual, z0, opt_, tol, diag.iterations, step_index);
      if (last_z != z) residual(z);
      c_prev_ = z.tail(k);
      y = z.head(n);
      const Vector xm = 0.5 * (x + y);
      diag.velocity = (y - x) / dt;
      diag.stage_time = tm;
      diag.stage_state = xm;
      std::tie(diag.stage_residual, diag.stage_constraint_residual) = detail::stage_residuals(
          last_m, diag.velocity, detail::flow_offset_at(f_, tm, xm), detail::effort_at(f_, tm, xm));
      if (k > 0) {
        l1 = last_1;
        have_l1 = true;
      }
    } else {
      double worst = 0.0, worst_alg = 0.0;
      auto field = [&](double tt, const Vector& xx, const LocalSolve* known) {
        const LocalSolve l = known ? *known : checked(xx);
        const Vector a = detail::effort_at(f_, tt, xx);
        const Vector off = detail::flow_offset_at(f_, tt, xx);
        const Vector v = off + l.particular(a);
        const auto [dr, ar] = detail::stage_residuals(l, v, off, a);
        worst = std::max(worst, dr);
        worst_alg = std::max(worst_alg, ar);
        return v;
      };
      const Vector k1 = field(t, x, &ls0);
      const Vector k2 = field(t + 0.5 * dt, x + 0.5 * dt * k1, nullptr);
      const Vector k3 = field(t + 0.5 * dt, x + 0.5 * dt * k2, nullptr);
      const Vector k4 = field(t1, x + dt * k3, nullptr);
      const Vector pred = x + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
      y = pred;
      if (k > 0) {
        LocalSolve last_1;
        Vector last_c;
        auto residual = [&](const Vector& c) {
          const Vector yy = pred + g0 * c;
          last_1 = checked(yy);
          last_c = c;
          return Vector(g0.transpose() * (last_1.free_proj * detail::effort_at(f_, t1, yy)));
        };
        const Vector c = newton_.solve(residual, Vector(Vector::Zero(k)), opt_, opt_.newton_tol, diag.iterations,
                                       step_index);
        if (last_c != c) residual(c);
        y = pred + g0 * c;
        l1 = last_1;
        have_l1 = true;
      }
      diag.velocity = (y - x) / dt;
      diag.stage_time = t + 0.5 * dt;
      diag.stage_state = 0.5 * (x + y);
      // Largest residuals of the four field evaluations.
      diag.stage_residual = worst;
      diag.stage_constraint_residual = worst_alg;
    }
    if (!have_l1) l1 = checked(y);
    diag.consistency_residual = l1.consistency(detail::effort_at(f_, t1, y));
    diag.free_dim = k;
    v_prev_ = diag.velocity;
    have_start_ = true;
    start_x_ = y;
    start_ls_ = std::move(l1);
    return {y, diag};
  }

 private:
  /// Orthonormal basis of G(x). When possible it is the rotation of the
  /// previous basis closest to it, so that the Newton unknowns vary smoothly.
  Matrix free_basis(const LocalSolve& ls, Index k) {
    const Index n = f_.n;
    Matrix g0 = Matrix::Zero(n, k);
    if (k == 0) return g0;
    bool done = false;
    if (g_prev_.rows() == n && g_prev_.cols() == k) {
      const Matrix mapped = ls.free_proj * g_prev_;
      Eigen::JacobiSVD<Matrix> svd(mapped, Eigen::ComputeThinU | Eigen::ComputeThinV);
      if (svd.singularValues()(k - 1) > 0.5) {
        g0 = svd.matrixU() * svd.matrixV().transpose();
        done = true;
      }
    }
    if (!done) {
      Eigen::SelfAdjointEigenSolver<Matrix> eig(ls.free_proj);
      g0 = eig.eigenvectors().rightCols(k);
      newton_.invalidate();
    }
    g_prev_ = g0;
    return g0;
  }

  const StateField& f_;
  Scheme scheme_;
  StepOptions opt_;
  bool have_start_ = false;
  Vector start_x_;
  LocalSolve start_ls_;
  Matrix g_prev_;
  Vector v_prev_;
  Vector c_prev_;
  detail::ChordNewton newton_;
  double newton_dt_ = 0.0;
  Index newton_k_ = -1;
};

/// A single step from (t, x); see Stepper.
inline std::pair<Vector, StepDiagnostics> step(const StateField& f, double t, const Vector& x, double dt,
                                               Scheme scheme, const StepOptions& opt = {}, long step_index = -1) {
  Stepper s(f, scheme, opt);
  return s.advance(t, x, dt, step_index);
}

struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<double> energies;
  std::vector<double> consistency_residuals;
  std::vector<double> stage_residuals;
  std::vector<PortSample> port_trace;       // empty when the field has no ports
  std::vector<double> power_residuals;      // empty when the field has no ports

  std::size_t size() const { return times.size(); }
  bool has_ports() const { return !port_trace.empty(); }
};

struct SimulateOptions {
  StepOptions step;
  double consistency_tol = 1e-6;
  /// Project an inconsistent initial state onto the constraint set instead of
  /// rejecting it.
  bool project_initial = false;
};

/// Least-squares correction of x onto {P_G(x) α(x) = 0}.
inline Vector project_consistent(const StateField& f, double t, Vector x, const StepOptions& opt = {}) {
  for (int it = 0; it < opt.max_iterations; ++it) {
    const LocalSolve ls = local_solve(f.structure_at(x));
    const Vector r = ls.free_proj * detail::effort_at(f, t, x);
    if (r.norm() <= opt.newton_tol) return x;
    Matrix jac(f.n, f.n);
    for (Index j = 0; j < f.n; ++j) {
      const double h = opt.fd_step * std::max(1.0, std::abs(x(j)));
      Vector xp = x;
      xp(j) += h;
      const LocalSolve lp = local_solve(f.structure_at(xp));
      jac.col(j) = (lp.free_proj * detail::effort_at(f, t, xp) - r) / h;
    }
    x -= jac.completeOrthogonalDecomposition().solve(r);
  }
  return x;
}

inline double consistency_residual(const StateField& f, double t, const Vector& x) {
  return local_solve(f.structure_at(x)).consistency(detail::effort_at(f, t, x));
}

/// Runs ceil(t_final / dt) steps; the last one is shortened to land on t_final.
inline Trajectory simulate(const StateField& f, const Vector& x0, double dt, double t_final, Scheme scheme,
                           const SimulateOptions& opt = {}) {
  require_dims(x0.size() == f.n, "simulate: initial state has wrong dimension");
  if (!(dt > 0)) throw std::invalid_argument("simulate: dt must be positive");
  if (!(t_final >= 0)) throw std::invalid_argument("simulate: t_final must be non-negative");
  Vector x = x0;
  double r0 = consistency_residual(f, 0.0, x);
  if (r0 > opt.consistency_tol) {
    if (!opt.project_initial)
      throw InconsistentState("initial state violates the constraints (residual " + std::to_string(r0) + ")", r0, 0);
    x = project_consistent(f, 0.0, x, opt.step);
    r0 = consistency_residual(f, 0.0, x);
    if (r0 > opt.consistency_tol)
      throw InconsistentState("projection onto the constraints failed (residual " + std::to_string(r0) + ")", r0, 0);
  }
  const long steps = t_final <= 0 ? 0 : static_cast<long>(std::ceil(t_final / dt - 1e-9));
  Trajectory tr;
  tr.times.reserve(steps + 1);
  auto record = [&](double t, const Vector& s, double cres, double sres) {
    tr.times.push_back(t);
    tr.states.push_back(s);
    tr.energies.push_back(f.energy(s));
    tr.consistency_residuals.push_back(cres);
    tr.stage_residuals.push_back(sres);
  };
  record(0.0, x, r0, 0.0);
  if (f.port_extractor) {
    const LocalSolve ls = local_solve(f.structure_at(x));
    const Vector v0 = detail::flow_offset_at(f, 0.0, x) + ls.particular(detail::effort_at(f, 0.0, x));
    tr.port_trace.push_back(f.port_extractor(0.0, x, v0));
    tr.power_residuals.push_back(0.0);
  }
  Index free_dim = -1;
  double t = 0.0;
  Stepper stepper(f, scheme, opt.step);
  for (long i = 0; i < steps; ++i) {
    const double h = (i + 1 == steps) ? t_final - t : dt;
    auto [y, diag] = stepper.advance(t, x, h, i);
    if (free_dim >= 0 && diag.free_dim != free_dim)
      throw RegularityError("rank of the flow constraints changed at step " + std::to_string(i), i);
    free_dim = diag.free_dim;
    if (diag.consistency_residual > opt.consistency_tol)
      throw InconsistentState("constraint residual " + std::to_string(diag.consistency_residual) + " at step " +
                                  std::to_string(i),
                              diag.consistency_residual, i);
    const double e_prev = tr.energies.back();
    t = (i + 1 == steps) ? t_final : t + h;
    record(t, y, diag.consistency_residual, diag.stage_residual);
    if (f.port_extractor) {
      PortSample ps = f.port_extractor(diag.stage_time, diag.stage_state, diag.velocity);
      const double rate = (tr.energies.back() - e_prev) / h;
      tr.power_residuals.push_back(std::abs(rate - ps.alpha2.dot(ps.u2)));
      tr.port_trace.push_back(std::move(ps));
    }
    x = y;
  }
  return tr;
}

struct PowerReport {
  std::vector<double> residuals;  // one per step
  double max = 0.0;
  double mean = 0.0;
  bool with_ports = false;
};

/// Per-step |ΔE/Δt - <α2, u2>|, or |ΔE/Δt| when the trajectory has no ports.
inline PowerReport power_balance(const Trajectory& tr) {
  PowerReport rep;
  rep.with_ports = tr.has_ports();
  for (std::size_t i = 1; i < tr.size(); ++i) {
    const double rate = (tr.energies[i] - tr.energies[i - 1]) / (tr.times[i] - tr.times[i - 1]);
    const double supplied = rep.with_ports ? tr.port_trace[i].alpha2.dot(tr.port_trace[i].u2) : 0.0;
    rep.residuals.push_back(std::abs(rate - supplied));
  }
  for (double r : rep.residuals) {
    rep.max = std::max(rep.max, r);
    rep.mean += r;
  }
  if (!rep.residuals.empty()) rep.mean /= static_cast<double>(rep.residuals.size());
  return rep;
}

/// Largest |E(t) - E(0)| along the trajectory.
inline double energy_drift(const Trajectory& tr) {
  double d = 0.0;
  for (double e : tr.energies) d = std::max(d, std::abs(e - tr.energies.front()));
  return d;
}

}  // namespace dirac
