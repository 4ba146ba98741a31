#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "json.hpp"

#include "pathlyap/counterexample.hpp"
#include "pathlyap/error.hpp"
#include "pathlyap/graph.hpp"
#include "pathlyap/invariant.hpp"
#include "pathlyap/lyapunov.hpp"

// JSON documents for graphs, automata, matrix sets, certificates, counterexample
// bundles and invariant functions. Readers are strict: unknown fields, wrong
// types and dangling references are errors with distinct kinds. Writers emit
// fields in a fixed order, so their output is canonical.

namespace pathlyap::io {

using Json = nlohmann::ordered_json;

namespace detail {

[[noreturn]] inline void malformed(const std::string& what) { throw Error(ErrorKind::malformed_document, what); }

inline void check_fields(const Json& j, const std::string& context, std::initializer_list<const char*> required,
                         std::initializer_list<const char*> optional = {}) {
  if (!j.is_object()) malformed(context + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* r : required) known = known || it.key() == r;
    for (const char* o : optional) known = known || it.key() == o;
    if (!known) throw Error(ErrorKind::unknown_field, context + "." + it.key());
  }
  for (const char* r : required)
    if (!j.contains(r)) malformed(context + " is missing '" + r + "'");
}

inline std::string as_string(const Json& j, const std::string& context) {
  if (!j.is_string()) malformed(context + " must be a string");
  return j.get<std::string>();
}

inline std::vector<std::string> as_strings(const Json& j, const std::string& context) {
  if (!j.is_array()) malformed(context + " must be an array of strings");
  std::vector<std::string> out;
  for (const auto& v : j) out.push_back(as_string(v, context + "[]"));
  return out;
}

inline double as_number(const Json& j, const std::string& context) {
  if (!j.is_number()) malformed(context + " must be a number");
  return j.get<double>();
}

inline Matrix as_matrix(const Json& j, std::size_t n, const std::string& context) {
  if (!j.is_array() || j.size() != n) malformed(context + " must have " + std::to_string(n) + " rows");
  Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = j[i];
    if (!row.is_array() || row.size() != n) malformed(context + " rows must have " + std::to_string(n) + " entries");
    for (std::size_t k = 0; k < n; ++k)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = as_number(row[k], context);
  }
  return m;
}

inline Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Json int_matrix_json(const IntMatrix& m) {
  Json rows = Json::array();
  for (const auto& r : m) rows.push_back(r);
  return rows;
}

}  // namespace detail

inline Json parse_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    detail::malformed(std::string("not valid JSON: ") + e.what());
  }
}

inline Json word_json(const Alphabet& alphabet, const Word& w) { return alphabet.names(w); }

// ---------------------------------------------------------------- graphs

inline LabeledGraph parse_graph(const Json& j) {
  detail::check_fields(j, "graph", {"alphabet", "nodes", "edges"});
  Alphabet alphabet(detail::as_strings(j["alphabet"], "alphabet"));
  auto nodes = detail::as_strings(j["nodes"], "nodes");
  {
    std::unordered_set<std::string> seen;
    for (const auto& n : nodes)
      if (!seen.insert(n).second) throw Error(ErrorKind::duplicate_node, "'" + n + "'");
  }
  auto node_index = [&](const Json& v, const std::string& context) {
    const auto name = detail::as_string(v, context);
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (nodes[i] == name) return i;
    throw Error(ErrorKind::unknown_node, "'" + name + "' in " + context);
  };
  if (!j["edges"].is_array()) detail::malformed("edges must be an array");
  std::vector<Edge> edges;
  for (const auto& e : j["edges"]) {
    detail::check_fields(e, "edge", {"from", "to", "label"});
    const auto label = detail::as_strings(e["label"], "edge.label");
    if (label.empty()) throw Error(ErrorKind::empty_label, "edge labels must be nonempty");
    edges.push_back({node_index(e["from"], "edge.from"), node_index(e["to"], "edge.to"), alphabet.parse_word(label)});
  }
  return LabeledGraph(std::move(alphabet), std::move(nodes), std::move(edges));
}

inline LabeledGraph parse_graph(const std::string& text) { return parse_graph(parse_text(text)); }
inline LabeledGraph parse_graph(const char* text) { return parse_graph(std::string(text)); }

inline Json graph_json(const LabeledGraph& g) {
  Json edges = Json::array();
  for (const auto& e : g.edges())
    edges.push_back(
        Json{{"from", g.nodes()[e.from]}, {"to", g.nodes()[e.to]}, {"label", word_json(g.alphabet(), e.label)}});
  return Json{{"alphabet", g.alphabet().symbols()}, {"nodes", g.nodes()}, {"edges", std::move(edges)}};
}

inline std::string serialize_graph(const LabeledGraph& g) { return graph_json(g).dump(); }

// ---------------------------------------------------------------- automata

inline Nfa parse_nfa(const Json& j) {
  detail::check_fields(j, "nfa", {"alphabet", "states", "start", "accept", "transitions"});
  Nfa nfa;
  nfa.alphabet = Alphabet(detail::as_strings(j["alphabet"], "alphabet"));
  nfa.states = detail::as_strings(j["states"], "states");
  auto state_index = [&](const std::string& name, const std::string& context) {
    for (std::size_t i = 0; i < nfa.states.size(); ++i)
      if (nfa.states[i] == name) return i;
    throw Error(ErrorKind::unknown_node, "'" + name + "' in " + context);
  };
  auto state_list = [&](const Json& v, const std::string& context) {
    std::vector<std::size_t> out;
    for (const auto& name : detail::as_strings(v, context)) {
      const auto s = state_index(name, context);
      if (std::find(out.begin(), out.end(), s) != out.end()) detail::malformed("duplicate state in " + context);
      out.push_back(s);
    }
    return out;
  };
  {
    std::unordered_set<std::string> seen;
    for (const auto& n : nfa.states)
      if (!seen.insert(n).second) throw Error(ErrorKind::duplicate_node, "'" + n + "'");
  }
  nfa.start = state_list(j["start"], "start");
  nfa.accept = state_list(j["accept"], "accept");
  if (!j["transitions"].is_array()) detail::malformed("transitions must be an array");
  for (const auto& t : j["transitions"]) {
    detail::check_fields(t, "transition", {"from", "sym", "to"});
    nfa.transitions.push_back({state_index(detail::as_string(t["from"], "transition.from"), "transition.from"),
                               nfa.alphabet.index_of(detail::as_string(t["sym"], "transition.sym")),
                               state_index(detail::as_string(t["to"], "transition.to"), "transition.to")});
  }
  nfa.validate();
  return nfa;
}

inline Nfa parse_nfa(const std::string& text) { return parse_nfa(parse_text(text)); }
inline Nfa parse_nfa(const char* text) { return parse_nfa(std::string(text)); }

inline Json nfa_json(const Nfa& nfa) {
  auto names = [&](const std::vector<std::size_t>& states) {
    std::vector<std::string> out;
    for (auto s : states) out.push_back(nfa.states[s]);
    return out;
  };
  Json transitions = Json::array();
  for (const auto& t : nfa.transitions)
    transitions.push_back(
        Json{{"from", nfa.states[t.from]}, {"sym", nfa.alphabet.name(t.symbol)}, {"to", nfa.states[t.to]}});
  return Json{{"alphabet", nfa.alphabet.symbols()}, {"states", nfa.states}, {"start", names(nfa.start)},
              {"accept", names(nfa.accept)}, {"transitions", std::move(transitions)}};
}

// ---------------------------------------------------------------- matrix sets

/// Matrices are keyed by symbol name. With an alphabet, the keys must match it
/// exactly and the set follows its order; without one, document order defines
/// the alphabet.
inline MatrixSet parse_matrix_set(const Json& j, const Alphabet* alphabet = nullptr) {
  detail::check_fields(j, "system", {"n", "matrices"});
  if (!j["n"].is_number_integer() || j["n"].get<std::int64_t>() < 1) detail::malformed("n must be a positive integer");
  const auto n = static_cast<std::size_t>(j["n"].get<std::int64_t>());
  const auto& ms = j["matrices"];
  if (!ms.is_object() || ms.empty()) detail::malformed("matrices must be a nonempty object");
  std::vector<std::string> keys;
  for (auto it = ms.begin(); it != ms.end(); ++it) keys.push_back(it.key());
  Alphabet al = alphabet ? *alphabet : Alphabet(keys);
  if (alphabet) {
    for (const auto& k : keys)
      if (!al.find(k)) throw Error(ErrorKind::unknown_symbol, "matrix for '" + k + "'");
    if (keys.size() != al.size()) throw Error(ErrorKind::dimension_mismatch, "need one matrix per symbol");
  }
  std::vector<Matrix> out;
  for (const auto& sym : al.symbols()) out.push_back(detail::as_matrix(ms[sym], n, "matrices." + sym));
  return MatrixSet(std::move(al), std::move(out));
}

inline Json matrix_set_json(const MatrixSet& s) {
  Json ms = Json::object();
  for (std::size_t k = 0; k < s.size(); ++k) ms[s.alphabet().name(k)] = detail::matrix_json(s[k]);
  return Json{{"n", s.dim()}, {"matrices", std::move(ms)}};
}

// ---------------------------------------------------------------- certificates

struct CertificateDocument {
  Certificate certificate;
  double delta = default_delta;
};

inline CertificateDocument parse_certificate(const Json& j, const LabeledGraph& g, std::size_t n) {
  detail::check_fields(j, "certificate", {}, {"delta", "quadratics", "diagonals"});
  const bool quad = j.contains("quadratics"), diag = j.contains("diagonals");
  if (quad == diag) detail::malformed("certificate needs exactly one of 'quadratics' or 'diagonals'");
  CertificateDocument doc;
  if (j.contains("delta")) {
    doc.delta = detail::as_number(j["delta"], "delta");
    if (!(doc.delta >= 0.0)) detail::malformed("delta must be nonnegative");
  }
  const auto& forms = quad ? j["quadratics"] : j["diagonals"];
  if (!forms.is_object()) detail::malformed("certificate forms must be an object keyed by node");
  for (auto it = forms.begin(); it != forms.end(); ++it) g.node_index(it.key());
  doc.certificate.diagonal = diag;
  for (const auto& node : g.nodes()) {
    if (!forms.contains(node)) throw Error(ErrorKind::dimension_mismatch, "no form for node '" + node + "'");
    const auto& f = forms[node];
    if (quad) {
      doc.certificate.forms.push_back(detail::as_matrix(f, n, "quadratics." + node));
    } else {
      if (!f.is_array() || f.size() != n) detail::malformed("diagonals." + node + " must have " + std::to_string(n) + " entries");
      Vector p(static_cast<Eigen::Index>(n));
      for (std::size_t k = 0; k < n; ++k) p(static_cast<Eigen::Index>(k)) = detail::as_number(f[k], "diagonals." + node);
      doc.certificate.forms.push_back(p.asDiagonal());
    }
  }
  return doc;
}

inline Json certificate_json(const LabeledGraph& g, const Certificate& c, std::optional<double> delta = std::nullopt) {
  Json forms = Json::object();
  for (std::size_t i = 0; i < c.forms.size(); ++i) {
    if (c.diagonal) {
      Json d = Json::array();
      for (Eigen::Index k = 0; k < c.forms[i].rows(); ++k) d.push_back(c.forms[i](k, k));
      forms[g.nodes()[i]] = std::move(d);
    } else {
      forms[g.nodes()[i]] = detail::matrix_json(c.forms[i]);
    }
  }
  Json out = Json::object();
  if (delta) out["delta"] = *delta;
  out[c.diagonal ? "diagonals" : "quadratics"] = std::move(forms);
  return out;
}

// ---------------------------------------------------------------- counterexample bundles

/// Graph, integer transposed cycle family, integer diagonal forms and the
/// exact check, all in one document that `verify --from-bundle` can consume.
inline Json bundle_json(const LabeledGraph& g, const CounterexampleBundle& b) {
  Json matrices = Json::object();
  for (std::size_t k = 0; k < b.sigma.matrices.size(); ++k)
    matrices[g.alphabet().name(k)] = detail::int_matrix_json(int_transpose(b.sigma.matrices[k]));
  Json diagonals = Json::object();
  for (std::size_t i = 0; i < b.diagonals.size(); ++i) diagonals[g.nodes()[i]] = b.diagonals[i];
  Json checks = Json::array();
  for (const auto& c : b.exact_checks) checks.push_back(Json{{"edge", c.edge}, {"pass", c.pass}});
  return Json{{"word", word_json(g.alphabet(), b.word)},
              {"graph", graph_json(g)},
              {"system", Json{{"n", b.sigma.dim}, {"matrices", std::move(matrices)}}},
              {"certificate", Json{{"diagonals", std::move(diagonals)}}},
              {"exact", Json{{"pass", b.exact_pass}, {"edges", std::move(checks)}}}};
}

struct BundleDocument {
  LabeledGraph graph;
  Word word;
  MatrixSet system;
  Certificate certificate;
};

inline BundleDocument parse_bundle(const Json& j) {
  detail::check_fields(j, "bundle", {"word", "graph", "system", "certificate"}, {"exact", "verification"});
  BundleDocument doc;
  doc.graph = parse_graph(j["graph"]);
  doc.word = doc.graph.alphabet().parse_word(detail::as_strings(j["word"], "word"));
  doc.system = parse_matrix_set(j["system"], &doc.graph.alphabet());
  doc.certificate = parse_certificate(j["certificate"], doc.graph, doc.system.dim()).certificate;
  return doc;
}

// ---------------------------------------------------------------- invariant functions

inline Json invariant_json(const Alphabet& alphabet, const InvariantFunction& f) {
  Json products = Json::array();
  for (const auto& level : f.levels)
    for (const auto& p : level)
      products.push_back(Json{{"word", word_json(alphabet, p.word)}, {"matrix", detail::matrix_json(p.matrix)}});
  return Json{{"gamma", f.gamma}, {"xi", f.xi},       {"r", f.horizon},           {"degree", f.degree},
              {"alpha", f.alpha}, {"beta", f.beta}, {"products", std::move(products)}};
}

}  // namespace pathlyap::io
