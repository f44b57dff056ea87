#pragma once

#include "dirac/io_structure.hpp"
#include "dirac/oracles.hpp"
#include "dirac/random.hpp"
#include "dirac/transfer.hpp"

#include <cstdint>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <functional>
#include <string>
#include <vector>

namespace dirac::checks {

// Seeded property batteries. Each suite draws from its own generator, seeded
// from the battery seed and the suite index, so suites can be run alone.

struct CheckConfig {
  std::uint64_t seed = 42;
  double tol = 1e-9;
  int instances = 100;
};

struct SuiteResult {
  std::string name;
  int instances = 0;
  int failures = 0;
  int redrawn = 0;      // draws rejected as too close to a rank change
  double worst = 0.0;   // largest defect seen
  double tol = 0.0;
  std::string first_failure;

  bool passed() const { return failures == 0; }
};

/// Instances whose transfers come closer than this to a rank change are
/// redrawn. Near such points rounding in the inputs is amplified by about the
/// inverse square of the gap, and no double-precision result can be held to
/// the equality tolerance.
inline constexpr double kMinGap = 1e-3;
inline constexpr int kMaxRedraws = 1000;

/// Tracks one suite: `record` adds a defect, `check` a non-numeric condition.
class Tally {
 public:
  Tally(std::string name, double tol) { r_.name = std::move(name), r_.tol = tol; }

  void begin() { ++r_.instances, bad_ = false; }
  void redraw() { ++r_.redrawn; }
  void record(double defect, const std::string& what) {
    if (!std::isnan(defect)) r_.worst = std::max(r_.worst, defect);
    if (!(defect <= r_.tol)) fail(what + " defect " + format(defect));
  }
  void check(bool ok, const std::string& what) {
    if (!ok) fail(what);
  }
  const std::string& name() const { return r_.name; }
  SuiteResult result() const { return r_; }

  static std::string format(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
  }

 private:
  void fail(const std::string& what) {
    if (!bad_) ++r_.failures;
    bad_ = true;
    if (r_.first_failure.empty()) r_.first_failure = "instance " + std::to_string(r_.instances - 1) + ": " + what;
  }
  SuiteResult r_;
  bool bad_ = false;
};

namespace detail {

inline random::Rng suite_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index)};
  return random::Rng(seq);
}

inline double dist(const LinearStructure& a, const LinearStructure& b) {
  return projector_distance(a.span(), b.span());
}

/// Random linear map, rank-deficient about a quarter of the time.
inline Matrix random_map(random::Rng& rng, Index rows, Index cols) {
  const Index full = std::min(rows, cols);
  const bool deficient = full > 0 && random::uniform_int(rng, 0, 3) == 0;
  return random::map(rng, rows, cols, deficient ? random::uniform_int(rng, 0, full - 1) : full);
}

/// Random isotropic, coisotropic or Dirac structure.
inline LinearStructure random_structure(random::Rng& rng, Index n) {
  switch (random::uniform_int(rng, 0, 2)) {
    case 0: return random::isotropic(rng, n);
    case 1: return random::coisotropic(rng, n);
    default: return random::dirac(rng, n);
  }
}

inline IOStructure random_open(random::Rng& rng, IOKind kind, Index n, Index m) {
  const LinearStructure d = random::dirac(rng, n);
  return kind == IOKind::ofio ? make_ofio(d, random_map(rng, n, m)) : make_obio(d, random_map(rng, m, n));
}

inline double fgap(const Matrix& phi, const LinearStructure& s) {
  const auto g = forward_gap(phi, s);
  return std::min(g.first, g.second);
}

inline double bgap(const Matrix& phi, const LinearStructure& s) {
  const auto g = backward_gap(phi, s);
  return std::min(g.first, g.second);
}

inline double compose_gap(const LinearStructure& da, const LinearStructure& db, const LinearStructure& di,
                          const ComposeDims& d) {
  const ComposeMaps maps = compose_maps(d);
  const LinearStructure product = direct_product({da, di, db});
  return std::min(bgap(maps.phi, product), fgap(maps.psi, backward(maps.phi, product)));
}

inline double effective_gap(const IOStructure& a) {
  const LinearStructure prod = direct_product(a.d_u1, a.port_struct);
  return is_forward(a.kind) ? fgap(structure_map(a), prod) : bgap(structure_map(a), prod);
}

/// Conditioning of the induced form: the smallest nonzero flow singular value.
inline double flow_gap(const LinearStructure& s) { return dirac::detail::smallest_nonzero_sv(s.flow_block()); }

inline bool posed(double gap) { return gap >= kMinGap; }

/// Calls `draw` until it yields an instance, counting rejections.
template <class Draw>
auto draw_posed(Tally& t, random::Rng& rng, Draw&& draw) {
  for (int attempt = 0;; ++attempt) {
    auto x = draw(rng);
    if (x) return *x;
    t.redraw();
    if (attempt >= kMaxRedraws) throw std::runtime_error(t.name() + ": no well-posed instance found");
  }
}

}  // namespace detail

inline SuiteResult dirac_axioms(const CheckConfig& c, random::Rng rng) {
  Tally t("dirac-axioms", c.tol);
  for (int i = 0; i < c.instances; ++i) {
    t.begin();
    const Index n = random::uniform_int(rng, 1, 6);
    const LinearStructure d = i % 2 == 0 ? random::dirac_from_pair(rng, n) : random::dirac_from_bivector(rng, n);
    t.check(d.class_tag() == StructureClass::dirac, "class is " + std::string(to_string(d.class_tag())));
    t.check(d.dim() == n, "dim != n");
    t.record(oracle::max_pairing_on_basis(d), "pairing on spanning pairs");
  }
  return t.result();
}

inline SuiteResult subspace_identities(const CheckConfig& c, random::Rng rng) {
  Tally t("subspace-identities", c.tol);
  for (int i = 0; i < c.instances; ++i) {
    t.begin();
    const Index n = random::uniform_int(rng, 1, 8);
    const Subspace a = random::subspace(rng, n), b = random::subspace(rng, n);
    t.check(a.dim() + b.dim() == sum(a, b).dim() + intersect(a, b).dim(), "Grassmann identity");
    t.record((a.basis().transpose() * a.basis() - Matrix::Identity(a.dim(), a.dim())).norm(), "orthonormality");
    t.record(projector_distance(annihilator(annihilator(a)), a), "double annihilator");
    const Subspace s = random::subspace(rng, 2 * n);
    t.record(projector_distance(pairing_orthogonal(pairing_orthogonal(s)), s), "double pairing orthogonal");
  }
  return t.result();
}

inline SuiteResult functoriality(const CheckConfig& c, random::Rng rng) {
  Tally t("functoriality", c.tol);
  struct Instance {
    Matrix phi, psi;
    LinearStructure du, dw;
  };
  for (int i = 0; i < c.instances; ++i) {
    t.begin();
    const Instance x = detail::draw_posed(t, rng, [](random::Rng& r) -> std::optional<Instance> {
      const Index u = random::uniform_int(r, 1, 5), v = random::uniform_int(r, 1, 5), w = random::uniform_int(r, 1, 5);
      Instance x{detail::random_map(r, v, u), detail::random_map(r, w, v), random::dirac(r, u), random::dirac(r, w)};
      const double gap = std::min({detail::fgap(x.phi, x.du), detail::fgap(x.psi, forward(x.phi, x.du)),
                                   detail::fgap(x.psi * x.phi, x.du), detail::bgap(x.psi, x.dw),
                                   detail::bgap(x.phi, backward(x.psi, x.dw)), detail::bgap(x.psi * x.phi, x.dw)});
      if (!detail::posed(gap)) return std::nullopt;
      return x;
    });
    const Index u = x.phi.cols(), w = x.psi.rows();
    t.record(detail::dist(forward(x.psi * x.phi, x.du), forward(x.psi, forward(x.phi, x.du))), "forward composition");
    t.record(detail::dist(backward(x.psi * x.phi, x.dw), backward(x.phi, backward(x.psi, x.dw))),
             "backward composition");
    t.record(detail::dist(forward(Matrix::Identity(u, u), x.du), x.du), "forward identity");
    t.record(detail::dist(backward(Matrix::Identity(w, w), x.dw), x.dw), "backward identity");
  }
  return t.result();
}

inline SuiteResult class_preservation(const CheckConfig& c, random::Rng rng) {
  Tally t("class-preservation", c.tol);
  struct Instance {
    Matrix phi;
    LinearStructure iso_u, co_u, iso_v, co_v;
  };
  for (int i = 0; i < c.instances; ++i) {
    t.begin();
    const Instance x = detail::draw_posed(t, rng, [](random::Rng& r) -> std::optional<Instance> {
      const Index u = random::uniform_int(r, 1, 5), v = random::uniform_int(r, 1, 5);
      Instance x{detail::random_map(r, v, u), random::isotropic(r, u), random::coisotropic(r, u),
                 random::isotropic(r, v), random::coisotropic(r, v)};
      const double gap = std::min({detail::fgap(x.phi, x.iso_u), detail::fgap(x.phi, x.co_u),
                                   detail::bgap(x.phi, x.iso_v), detail::bgap(x.phi, x.co_v)});
      if (!detail::posed(gap)) return std::nullopt;
      return x;
    });
    const auto fi = classify_report(forward(x.phi, x.iso_u).span());
    const auto bi = classify_report(backward(x.phi, x.iso_v).span());
    const auto fc = classify_report(forward(x.phi, x.co_u).span());
    const auto bc = classify_report(backward(x.phi, x.co_v).span());
    t.record(fi.isotropy_defect, "forward of isotropic");
    t.record(bi.isotropy_defect, "backward of isotropic");
    t.record(fc.coisotropy_defect, "forward of coisotropic");
    t.record(bc.coisotropy_defect, "backward of coisotropic");
    t.check(is_isotropic_tag(fi.tag) && is_isotropic_tag(bi.tag), "isotropic image not tagged isotropic");
    t.check(is_coisotropic_tag(fc.tag) && is_coisotropic_tag(bc.tag), "coisotropic image not tagged coisotropic");
  }
  return t.result();
}

inline SuiteResult twist_involution(const CheckConfig& c, random::Rng rng) {
  Tally t("twist-involution", c.tol);
  for (int i = 0; i < c.instances; ++i) {
    t.begin();
    const LinearStructure s = detail::random_structure(rng, random::uniform_int(rng, 1, 6));
    const LinearStructure ts = twist(s);
    t.record(detail::dist(twist(ts), s), "twist twice");
    t.check(ts.class_tag() == s.class_tag(), "twist changed the class");
  }
  return t.result();
}

inline SuiteResult duality(const CheckConfig& c, random::Rng rng) {
  Tally t("twist-duality", c.tol);
  struct Instance {
    Matrix phi;
    LinearStructure su, sv;
  };
  for (int i = 0; i < c.instances; ++i) {
    t.begin();
    const Instance x = detail::draw_posed(t, rng, [](random::Rng& r) -> std::optional<Instance> {
      const Index u = random::uniform_int(r, 1, 5), v = random::uniform_int(r, 1, 5);
      Instance x{detail::random_map(r, v, u), detail::random_structure(r, u), detail::random_structure(r, v)};
      const Matrix pt = x.phi.transpose();
      const double gap = std::min({detail::fgap(x.phi, x.su), detail::bgap(pt, twist(x.su)),
                                   detail::bgap(x.phi, x.sv), detail::fgap(pt, twist(x.sv))});
      if (!detail::posed(gap)) return std::nullopt;
      return x;
    });
    t.record(duality_transport(x.phi, x.su).distance, "twist of forward vs backward of twist");
    // The mirrored identity: t(Bφ(D)) = Fφ*(t(D)).
    t.record(detail::dist(twist(backward(x.phi, x.sv)), forward(x.phi.transpose(), twist(x.sv))),
             "twist of backward vs forward of twist");
  }
  return t.result();
}

/// Random composition data with u1 + u2 + v1 + v2 ≤ 12.
struct ComposeInstance {
  LinearStructure da, db, di;
  ComposeDims dims;
};

inline ComposeInstance draw_compose_instance(Tally& t, random::Rng& rng) {
  return detail::draw_posed(t, rng, [](random::Rng& r) -> std::optional<ComposeInstance> {
    ComposeDims d;
    d.u1 = random::uniform_int(r, 0, 3);
    d.u2 = random::uniform_int(r, 0, 3);
    d.v1 = random::uniform_int(r, 0, 3);
    d.v2 = random::uniform_int(r, 0, 3);
    if (d.u1 + d.u2 == 0) d.u1 = 1;
    if (d.v1 + d.v2 == 0) d.v1 = 1;
    ComposeInstance x{random::dirac(r, d.u1 + d.u2), random::dirac(r, d.v1 + d.v2), random::dirac(r, d.u2 + d.v2), d};
    if (!detail::posed(detail::compose_gap(x.da, x.db, x.di, d))) return std::nullopt;
    return x;
  });
}

inline SuiteResult composition_oracle(const CheckConfig& c, random::Rng rng) {
  Tally t("composition-oracle", c.tol);
  for (int i = 0; i < c.instances; ++i) {
    t.begin();
    const ComposeInstance x = draw_compose_instance(t, rng);
    const LinearStructure got = compose(x.da, x.db, x.di, x.dims);
    t.record(detail::dist(got, oracle::composition_witness_set(x.da, x.db, x.di, x.dims)), "compose vs witness set");
    t.check(got.is_dirac(), "composition is not Dirac");
  }
  return t.result();
}

inline SuiteResult shared_port_composition(const CheckConfig& c, random::Rng rng) {
  Tally t("shared-port-composition", c.tol);
  struct Instance {
    Index u1, u2, u3;
    LinearStructure da, db;
  };
  for (int i = 0; i < c.instances; ++i) {
    t.begin();
    const Instance x = detail::draw_posed(t, rng, [](random::Rng& r) -> std::optional<Instance> {
      const Index u1 = random::uniform_int(r, 0, 3), u2 = random::uniform_int(r, 1, 3),
                  u3 = random::uniform_int(r, 0, 3);
      Instance x{u1, u2, u3, random::dirac(r, u1 + u2), random::dirac(r, u3 + u2)};
      if (!detail::posed(detail::compose_gap(x.da, x.db, oracle::cancellation_interconnection(u2), {u1, u2, u3, u2})))
        return std::nullopt;
      return x;
    });
    const LinearStructure got =
        compose(x.da, x.db, oracle::cancellation_interconnection(x.u2), {x.u1, x.u2, x.u3, x.u2});
    t.record(detail::dist(got, oracle::shared_port_composition(x.da, x.db, x.u1, x.u2, x.u3)),
             "compose vs shared port");
  }
  return t.result();
}

inline SuiteResult graph_transfer(const CheckConfig& c, random::Rng rng) {
  Tally t("graph-transfer", c.tol);
  for (int i = 0; i < c.instances; ++i) {
    t.begin();
    const Index u = random::uniform_int(rng, 1, 5), v = random::uniform_int(rng, 1, 5);
    const Matrix phi = detail::random_map(rng, v, u);
    const Bivector lambda(random::skew(rng, u));
    const TwoForm omega(random::skew(rng, v));
    t.record(detail::dist(forward(phi, graph(lambda)), oracle::forward_of_bivector_graph(phi, lambda)),
             "forward of Poisson graph");
    t.record(detail::dist(backward(phi, graph(omega)), oracle::backward_of_form_graph(phi, omega)),
             "backward of presymplectic graph");
  }
  return t.result();
}

inline SuiteResult isotropic_round_trip(const CheckConfig& c, random::Rng rng) {
  Tally t("isotropic-round-trip", c.tol);
  for (int i = 0; i < c.instances; ++i) {
    t.begin();
    const LinearStructure s = detail::draw_posed(t, rng, [](random::Rng& r) -> std::optional<LinearStructure> {
      LinearStructure s = random::isotropic(r, random::uniform_int(r, 1, 6));
      if (!detail::posed(detail::flow_gap(s))) return std::nullopt;
      return s;
    });
    const IsotropicParts p = isotropic_decompose(s);
    t.record(detail::dist(reconstruct(p), s), "reconstruct(decompose)");
    // F of the orthogonal is F ⊕ F2.
    t.record(projector_distance(pairing_orthogonal(s).flow_projection(), sum(p.f, p.f2)), "flows of the orthogonal");
    const LinearStructure d = random::dirac(rng, s.n());
    t.check(isotropic_decompose(d).f2.dim() == 0, "Dirac input with F2 != 0");
  }
  return t.result();
}

inline SuiteResult coisotropic_round_trip(const CheckConfig& c, random::Rng rng) {
  Tally t("coisotropic-round-trip", c.tol);
  for (int i = 0; i < c.instances; ++i) {
    t.begin();
    const LinearStructure s = detail::draw_posed(t, rng, [](random::Rng& r) -> std::optional<LinearStructure> {
      LinearStructure s = random::coisotropic(r, random::uniform_int(r, 1, 6));
      if (!detail::posed(detail::flow_gap(pairing_orthogonal(s)))) return std::nullopt;
      return s;
    });
    t.record(detail::dist(reconstruct(coisotropic_decompose(s)), s), "reconstruct(decompose)");
  }
  return t.result();
}

inline SuiteResult io_effective_class(const CheckConfig& c, random::Rng rng) {
  Tally t("io-effective-class", 1e-8);
  for (int i = 0; i < c.instances; ++i) {
    t.begin();
    const bool fwd = i % 2 == 0;
    const IOStructure closed = detail::draw_posed(t, rng, [fwd](random::Rng& r) -> std::optional<IOStructure> {
      const Index n = random::uniform_int(r, 1, 5), m = random::uniform_int(r, 1, 4);
      const LinearStructure d1 = random::dirac(r, n), d2 = random::dirac(r, m);
      IOStructure a = fwd ? make_fio(d1, d2, detail::random_map(r, n, m)) : make_bio(d1, d2, detail::random_map(r, m, n));
      if (!detail::posed(detail::effective_gap(a))) return std::nullopt;
      return a;
    });
    const Index n = closed.u1_dim;
    const IOStructure open = fwd ? make_ofio(closed.d_u1, closed.coupling) : make_obio(closed.d_u1, closed.coupling);
    const LinearStructure eff = effective_structure(closed), sigma = effective_structure(open);
    t.check(eff.is_dirac() && eff.dim() == n, "closed effective structure is not Dirac");
    t.check(is_coisotropic_tag(sigma.class_tag()), "open effective structure is not coisotropic");
    t.record(inclusion_defect(eff.span(), sigma.span()), "closed inside open");
    const Vector z = eff.span().basis() * random::matrix(rng, eff.dim(), 1);
    const auto w = membership_witness(closed, z.head(n), z.tail(n));
    t.check(w.has_value(), "no port witness for an effective pair");
  }
  return t.result();
}

/// Interconnection of two open structures against composition of their
/// PH-structures with the same interconnecting structure.
struct InterconnectComparison {
  double distance = 0.0;         // incoming-positive PH-structures
  double naive_distance = 0.0;   // port efforts taken without the sign flip
  bool naive_is_dirac = false;
};

inline InterconnectComparison compare_interconnect(const IOStructure& a, const IOStructure& b,
                                                   const LinearStructure& d_ports) {
  const LinearStructure lhs = effective_structure(interconnect(product({a, b}), d_ports));
  const ComposeDims dims{a.u1_dim, a.u2_dim, b.u1_dim, b.u2_dim};
  InterconnectComparison r;
  r.distance = detail::dist(lhs, compose(ph_structure(a), ph_structure(b), d_ports, dims));
  const LinearStructure na = ph_structure(a, false), nb = ph_structure(b, false);
  r.naive_is_dirac = na.is_dirac() && nb.is_dirac();
  r.naive_distance = r.naive_is_dirac ? detail::dist(lhs, compose(na, nb, d_ports, dims))
                                      : std::numeric_limits<double>::infinity();
  return r;
}

struct InterconnectInstance {
  IOStructure a, b;
  LinearStructure d_ports;
};

inline InterconnectInstance draw_interconnect_instance(Tally& t, random::Rng& rng, IOKind kind) {
  return detail::draw_posed(t, rng, [kind](random::Rng& r) -> std::optional<InterconnectInstance> {
    const Index n1 = random::uniform_int(r, 1, 3), m1 = random::uniform_int(r, 1, 2);
    const Index n2 = random::uniform_int(r, 1, 3), m2 = random::uniform_int(r, 1, 2);
    InterconnectInstance x{detail::random_open(r, kind, n1, m1), detail::random_open(r, kind, n2, m2),
                           random::dirac(r, m1 + m2)};
    const ComposeDims dims{n1, m1, n2, m2};
    const double gap = std::min(detail::effective_gap(interconnect(product({x.a, x.b}), x.d_ports)),
                                detail::compose_gap(ph_structure(x.a), ph_structure(x.b), x.d_ports, dims));
    if (!detail::posed(gap)) return std::nullopt;
    return x;
  });
}

inline SuiteResult interconnect_compose(const CheckConfig& c, random::Rng rng) {
  Tally t("interconnect-compose", c.tol);
  for (int i = 0; i < c.instances; ++i) {
    t.begin();
    const InterconnectInstance x = draw_interconnect_instance(t, rng, i % 2 == 0 ? IOKind::ofio : IOKind::obio);
    t.record(compare_interconnect(x.a, x.b, x.d_ports).distance, "interconnect vs compose");
  }
  return t.result();
}

using Suite = std::function<SuiteResult(const CheckConfig&, random::Rng)>;

inline const std::vector<Suite>& suites() {
  static const std::vector<Suite> all = {dirac_axioms,       subspace_identities,   functoriality,
                                         class_preservation, twist_involution,      duality,
                                         composition_oracle, shared_port_composition, graph_transfer,
                                         isotropic_round_trip, coisotropic_round_trip, io_effective_class,
                                         interconnect_compose};
  return all;
}

inline std::vector<SuiteResult> run_battery(const CheckConfig& c) {
  std::vector<SuiteResult> out;
  std::uint64_t index = 0;
  for (const auto& s : suites()) {
    try {
      out.push_back(s(c, detail::suite_rng(c.seed, index)));
    } catch (const std::exception& e) {
      SuiteResult r;
      r.name = "suite-" + std::to_string(index);
      r.failures = 1;
      r.tol = c.tol;
      r.first_failure = std::string("exception: ") + e.what();
      out.push_back(r);
    }
    ++index;
  }
  return out;
}

}  // namespace dirac::checks
