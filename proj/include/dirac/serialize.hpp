#pragma once

#include "dirac/dynamics.hpp"
#include "dirac/io_structure.hpp"
#include "dirac/models.hpp"

#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>

namespace dirac {

// JSON and CSV formats. Matrices are arrays of rows; a subspace basis is an
// array of columns, each column listing its ambient coordinates. Structures
// on V⊕V* put the n flow coordinates before the n effort coordinates.

using json = nlohmann::json;

inline constexpr const char* kSchemaTag = "dirac-report/1";

inline json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(std::move(r));
  }
  return rows;
}

namespace detail {

inline double number_at(const json& v, const std::string& where) {
  if (!v.is_number()) throw ParseError(where + ": expected a number");
  return v.get<double>();
}

inline const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw ParseError(where + ": missing field '" + key + "'");
  return *it;
}

inline Index index_at(const json& v, const std::string& where) {
  if (!v.is_number_integer() || v.get<long long>() < 0) throw ParseError(where + ": expected a non-negative integer");
  return static_cast<Index>(v.get<long long>());
}

}  // namespace detail

/// `cols` is needed for matrices with no rows.
inline Matrix matrix_from_json(const json& j, Index cols = -1, const std::string& where = "matrix") {
  if (!j.is_array()) throw ParseError(where + ": expected an array of rows");
  const Index rows = static_cast<Index>(j.size());
  if (rows == 0) return Matrix(0, cols < 0 ? 0 : cols);
  if (!j[0].is_array()) throw ParseError(where + ": row 0 is not an array");
  const Index c = static_cast<Index>(j[0].size());
  if (cols >= 0 && c != cols) throw ParseError(where + ": expected " + std::to_string(cols) + " columns");
  Matrix m(rows, c);
  for (Index i = 0; i < rows; ++i) {
    const json& r = j[static_cast<std::size_t>(i)];
    if (!r.is_array() || static_cast<Index>(r.size()) != c) throw ParseError(where + ": ragged row " + std::to_string(i));
    for (Index k = 0; k < c; ++k) m(i, k) = detail::number_at(r[static_cast<std::size_t>(k)], where);
  }
  return m;
}

inline Vector vector_from_json(const json& j, const std::string& where = "vector") {
  if (!j.is_array()) throw ParseError(where + ": expected an array");
  Vector v(static_cast<Index>(j.size()));
  for (Index i = 0; i < v.size(); ++i) v(i) = detail::number_at(j[static_cast<std::size_t>(i)], where);
  return v;
}

// Subspace

inline json to_json(const Subspace& s) {
  json cols = json::array();
  for (Index j = 0; j < s.dim(); ++j) {
    json c = json::array();
    for (Index i = 0; i < s.ambient_dim(); ++i) c.push_back(s.basis()(i, j));
    cols.push_back(std::move(c));
  }
  return {{"ambient_dim", s.ambient_dim()}, {"basis", cols}};
}

inline Subspace subspace_from_json(const json& j, const std::string& where = "subspace") {
  const Index n = detail::index_at(detail::field(j, "ambient_dim", where), where + ".ambient_dim");
  const json& b = detail::field(j, "basis", where);
  if (!b.is_array()) throw ParseError(where + ".basis: expected an array of columns");
  Matrix m(n, static_cast<Index>(b.size()));
  for (Index k = 0; k < m.cols(); ++k) {
    const json& c = b[static_cast<std::size_t>(k)];
    if (!c.is_array() || static_cast<Index>(c.size()) != n)
      throw ParseError(where + ".basis: column " + std::to_string(k) + " must have " + std::to_string(n) + " entries");
    for (Index i = 0; i < n; ++i) m(i, k) = detail::number_at(c[static_cast<std::size_t>(i)], where + ".basis");
  }
  if (!m.allFinite()) throw ParseError(where + ".basis: non-finite entry");
  return Subspace::span_of(m);
}

// LinearStructure

inline json to_json(const LinearStructure& s) {
  return {{"n", s.n()}, {"span", to_json(s.span())}, {"class", std::string(to_string(s.class_tag()))}};
}

/// The stored class tag is checked against the recomputed one.
inline LinearStructure structure_from_json(const json& j, const std::string& where = "structure") {
  const Index n = detail::index_at(detail::field(j, "n", where), where + ".n");
  const Subspace span = subspace_from_json(detail::field(j, "span", where), where + ".span");
  if (span.ambient_dim() != 2 * n)
    throw ParseError(where + ": span lives in dimension " + std::to_string(span.ambient_dim()) + ", expected 2n = " +
                     std::to_string(2 * n));
  LinearStructure s(span);
  if (const auto it = j.find("class"); it != j.end()) {
    if (!it->is_string()) throw ParseError(where + ".class: expected a string");
    StructureClass declared;
    try {
      declared = class_from_string(it->get<std::string>());
    } catch (const std::exception& e) {
      throw ParseError(where + ".class: " + e.what());
    }
    if (declared != s.class_tag())
      throw ParseError(where + ": declared class '" + it->get<std::string>() + "' but the span is '" +
                       std::string(to_string(s.class_tag())) + "'");
  }
  return s;
}

// IOStructure

inline json to_json(const IOStructure& a) {
  return {{"kind", std::string(to_string(a.kind))},
          {"u1_dim", a.u1_dim},
          {"u2_dim", a.u2_dim},
          {"d_u1", to_json(a.d_u1)},
          {"port_struct", to_json(a.port_struct)},
          {"coupling", matrix_to_json(a.coupling)}};
}

inline IOStructure io_structure_from_json(const json& j, const std::string& where = "io-structure") {
  IOStructure a;
  const json& kind = detail::field(j, "kind", where);
  if (!kind.is_string()) throw ParseError(where + ".kind: expected a string");
  try {
    a.kind = io_kind_from_string(kind.get<std::string>());
  } catch (const std::exception& e) {
    throw ParseError(where + ".kind: " + e.what());
  }
  a.u1_dim = detail::index_at(detail::field(j, "u1_dim", where), where + ".u1_dim");
  a.u2_dim = detail::index_at(detail::field(j, "u2_dim", where), where + ".u2_dim");
  a.d_u1 = structure_from_json(detail::field(j, "d_u1", where), where + ".d_u1");
  a.port_struct = structure_from_json(detail::field(j, "port_struct", where), where + ".port_struct");
  const Index cols = is_forward(a.kind) ? a.u2_dim : a.u1_dim;
  a.coupling = matrix_from_json(detail::field(j, "coupling", where), cols, where + ".coupling");
  try {
    a.validate();
  } catch (const std::exception& e) {
    throw ParseError(where + ": " + e.what());
  }
  return a;
}

// Netlist

inline std::string_view to_string(BranchKind k) {
  switch (k) {
    case BranchKind::inductor: return "L";
    case BranchKind::capacitor: return "C";
    case BranchKind::port: return "port";
  }
  return "?";
}

inline Netlist netlist_from_json(const json& j, const std::string& where = "netlist") {
  Netlist net;
  const json& branches = detail::field(j, "branches", where);
  if (!branches.is_array() || branches.empty()) throw ParseError(where + ".branches: expected a non-empty array");
  for (std::size_t b = 0; b < branches.size(); ++b) {
    const std::string w = where + ".branches[" + std::to_string(b) + "]";
    Branch br;
    const json& id = detail::field(branches[b], "id", w);
    const json& kind = detail::field(branches[b], "kind", w);
    if (!id.is_string() || !kind.is_string()) throw ParseError(w + ": id and kind must be strings");
    br.id = id.get<std::string>();
    const std::string k = kind.get<std::string>();
    if (k == "L") br.kind = BranchKind::inductor;
    else if (k == "C") br.kind = BranchKind::capacitor;
    else if (k == "port" || k == "P") br.kind = BranchKind::port;
    else throw ParseError(w + ": unknown kind '" + k + "' (expected L, C or port)");
    if (br.kind != BranchKind::port) {
      br.value = detail::number_at(detail::field(branches[b], "value", w), w + ".value");
      if (!(br.value > 0)) throw ParseError(w + ": value must be positive");
    }
    net.branches.push_back(br);
  }
  net.kcl = matrix_from_json(detail::field(j, "kcl", where), static_cast<Index>(net.branches.size()), where + ".kcl");
  if (const auto it = j.find("ports"); it != j.end()) {
    if (!it->is_array()) throw ParseError(where + ".ports: expected an array");
    for (const auto& p : *it) {
      if (!p.is_string()) throw ParseError(where + ".ports: expected strings");
      net.ports.push_back(p.get<std::string>());
    }
  }
  if (const auto it = j.find("q0"); it != j.end()) net.q0 = vector_from_json(*it, where + ".q0");
  if (const auto it = j.find("i0"); it != j.end()) net.i0 = vector_from_json(*it, where + ".i0");
  return net;
}

inline json to_json(const Netlist& net) {
  json branches = json::array();
  for (const auto& b : net.branches) {
    json e = {{"id", b.id}, {"kind", std::string(to_string(b.kind))}};
    if (b.kind != BranchKind::port) e["value"] = b.value;
    branches.push_back(std::move(e));
  }
  json j = {{"branches", branches}, {"kcl", matrix_to_json(net.kcl)}, {"ports", net.ports}};
  if (net.q0.size() > 0) j["q0"] = std::vector<double>(net.q0.data(), net.q0.data() + net.q0.size());
  if (net.i0.size() > 0) j["i0"] = std::vector<double>(net.i0.data(), net.i0.data() + net.i0.size());
  return j;
}

// Files

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline LinearStructure read_structure(const std::string& path) { return structure_from_json(read_json_file(path), path); }

inline Netlist read_netlist(const std::string& path) { return netlist_from_json(read_json_file(path), path); }

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

// Trajectories

inline void write_csv(std::ostream& out, const Trajectory& tr) {
  const Index n = tr.states.empty() ? 0 : tr.states.front().size();
  const bool power = !tr.power_residuals.empty();
  out << "t";
  for (Index i = 0; i < n; ++i) out << ",x" << i;
  out << ",E,consistency_residual";
  if (power) out << ",power_residual";
  out << '\n';
  std::ostringstream row;
  row << std::setprecision(17);
  for (std::size_t k = 0; k < tr.size(); ++k) {
    row.str("");
    row << tr.times[k];
    for (Index i = 0; i < n; ++i) row << ',' << tr.states[k](i);
    row << ',' << tr.energies[k] << ',' << tr.consistency_residuals[k];
    if (power) row << ',' << tr.power_residuals[k];
    out << row.str() << '\n';
  }
}

inline json to_json(const Trajectory& tr) {
  json rows = json::array();
  for (std::size_t k = 0; k < tr.size(); ++k) {
    json r = {{"t", tr.times[k]},
              {"x", std::vector<double>(tr.states[k].data(), tr.states[k].data() + tr.states[k].size())},
              {"E", tr.energies[k]},
              {"consistency_residual", tr.consistency_residuals[k]}};
    if (!tr.power_residuals.empty()) r["power_residual"] = tr.power_residuals[k];
    rows.push_back(std::move(r));
  }
  return {{"schema", "dirac-trajectory/1"}, {"rows", rows}};
}

}  // namespace dirac
