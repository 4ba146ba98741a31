#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "pathlyap/error.hpp"

namespace pathlyap {

/// Index of a symbol in its alphabet. Canonical order is index order.
using Symbol = std::size_t;

/// A finite sequence of symbol indices, read chronologically.
using Word = std::vector<Symbol>;

inline Word mirror(Word w) {
  std::reverse(w.begin(), w.end());
  return w;
}

/// Shortlex order: shorter words first, then lexicographic by symbol index.
inline bool shortlex_less(const Word& a, const Word& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

class Alphabet {
 public:
  Alphabet() = default;

  explicit Alphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
    if (symbols_.empty()) throw Error(ErrorKind::invalid_argument, "alphabet must be nonempty");
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
      if (!index_.emplace(symbols_[i], i).second)
        throw Error(ErrorKind::duplicate_symbol, "'" + symbols_[i] + "'");
    }
  }

  std::size_t size() const noexcept { return symbols_.size(); }
  const std::vector<std::string>& symbols() const noexcept { return symbols_; }
  const std::string& name(Symbol s) const { return symbols_.at(s); }

  std::optional<Symbol> find(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  Symbol index_of(const std::string& name) const {
    if (auto s = find(name)) return *s;
    throw Error(ErrorKind::unknown_symbol, "'" + name + "'");
  }

  bool contains(const Word& w) const {
    return std::all_of(w.begin(), w.end(), [&](Symbol s) { return s < size(); });
  }

  Word parse_word(const std::vector<std::string>& names) const {
    Word w;
    w.reserve(names.size());
    for (const auto& n : names) w.push_back(index_of(n));
    return w;
  }

  std::vector<std::string> names(const Word& w) const {
    std::vector<std::string> out;
    out.reserve(w.size());
    for (Symbol s : w) out.push_back(name(s));
    return out;
  }

  /// Concatenated symbol names; separated by spaces if any symbol is longer
  /// than one character, so "1","2","1" prints as "121".
  std::string to_text(const Word& w) const {
    bool single = std::all_of(symbols_.begin(), symbols_.end(),
                              [](const std::string& s) { return s.size() == 1; });
    std::string out;
    for (std::size_t k = 0; k < w.size(); ++k) {
      if (!single && k > 0) out += ' ';
      out += name(w[k]);
    }
    return out;
  }

  friend bool operator==(const Alphabet& a, const Alphabet& b) { return a.symbols_ == b.symbols_; }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, Symbol> index_;
};

/// Edge i -> j with label u encodes V_j(A_{u_t} ... A_{u_1} x) < V_i(x).
struct Edge {
  std::size_t from = 0;
  std::size_t to = 0;
  Word label;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Directed labeled multigraph; nodes stand for Lyapunov functions and edges
/// for the inequalities between them. Immutable after construction.
class LabeledGraph {
 public:
  LabeledGraph() = default;

  LabeledGraph(Alphabet alphabet, std::vector<std::string> nodes, std::vector<Edge> edges)
      : alphabet_(std::move(alphabet)), nodes_(std::move(nodes)), edges_(std::move(edges)) {
    std::unordered_set<std::string> seen;
    for (const auto& n : nodes_)
      if (!seen.insert(n).second) throw Error(ErrorKind::duplicate_node, "'" + n + "'");
    for (const auto& e : edges_) {
      if (e.from >= nodes_.size() || e.to >= nodes_.size())
        throw Error(ErrorKind::unknown_node, "edge endpoint out of range");
      if (e.label.empty()) throw Error(ErrorKind::empty_label, "edge labels must be nonempty");
      if (!alphabet_.contains(e.label))
        throw Error(ErrorKind::unknown_symbol, "edge label symbol out of range");
    }
  }

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  const std::vector<std::string>& nodes() const noexcept { return nodes_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::size_t node_count() const noexcept { return nodes_.size(); }

  std::size_t node_index(const std::string& name) const {
    auto it = std::find(nodes_.begin(), nodes_.end(), name);
    if (it == nodes_.end()) throw Error(ErrorKind::unknown_node, "'" + name + "'");
    return static_cast<std::size_t>(it - nodes_.begin());
  }

  bool unit_labels() const {
    return std::all_of(edges_.begin(), edges_.end(), [](const Edge& e) { return e.label.size() == 1; });
  }

  LabeledGraph with_edge(Edge e) const {
    auto edges = edges_;
    edges.push_back(std::move(e));
    return LabeledGraph(alphabet_, nodes_, std::move(edges));
  }

  friend bool operator==(const LabeledGraph& a, const LabeledGraph& b) {
    return a.alphabet_ == b.alphabet_ && a.nodes_ == b.nodes_ && a.edges_ == b.edges_;
  }

 private:
  Alphabet alphabet_;
  std::vector<std::string> nodes_;
  std::vector<Edge> edges_;
};

struct UnitEdge {
  std::size_t from = 0;
  Symbol symbol = 0;
  std::size_t to = 0;
};

/// Where an auxiliary chain state came from: the source edge and how many
/// symbols of its label have been read on arrival.
struct AuxOrigin {
  std::size_t edge = 0;
  std::size_t offset = 0;
};

/// Unit-labeled expansion. States [0, original_count) are the graph nodes;
/// the rest are auxiliary chain states, one per interior label position.
struct ExpandedGraph {
  std::size_t original_count = 0;
  std::size_t alphabet_size = 0;
  std::vector<UnitEdge> edges;
  std::vector<AuxOrigin> aux;
  /// successors[state][symbol], sorted ascending.
  std::vector<std::vector<std::vector<std::size_t>>> successors;

  std::size_t state_count() const noexcept { return original_count + aux.size(); }
};

inline ExpandedGraph expand(const LabeledGraph& g) {
  ExpandedGraph x;
  x.original_count = g.node_count();
  x.alphabet_size = g.alphabet().size();
  for (std::size_t e = 0; e < g.edges().size(); ++e) {
    const Edge& edge = g.edges()[e];
    std::size_t current = edge.from;
    for (std::size_t k = 0; k < edge.label.size(); ++k) {
      std::size_t next;
      if (k + 1 == edge.label.size()) {
        next = edge.to;
      } else {
        next = x.original_count + x.aux.size();
        x.aux.push_back({e, k + 1});
      }
      x.edges.push_back({current, edge.label[k], next});
      current = next;
    }
  }
  x.successors.assign(x.state_count(), std::vector<std::vector<std::size_t>>(x.alphabet_size));
  for (const auto& u : x.edges) x.successors[u.from][u.symbol].push_back(u.to);
  for (auto& row : x.successors)
    for (auto& succ : row) {
      std::sort(succ.begin(), succ.end());
      succ.erase(std::unique(succ.begin(), succ.end()), succ.end());
    }
  return x;
}

struct Transition {
  std::size_t from = 0;
  Symbol symbol = 0;
  std::size_t to = 0;

  friend bool operator==(const Transition&, const Transition&) = default;
};

/// Nondeterministic automaton without epsilon moves.
struct Nfa {
  Alphabet alphabet;
  std::vector<std::string> states;
  std::vector<std::size_t> start;
  std::vector<std::size_t> accept;
  std::vector<Transition> transitions;

  void validate() const {
    std::unordered_set<std::string> seen;
    for (const auto& s : states)
      if (!seen.insert(s).second) throw Error(ErrorKind::duplicate_node, "'" + s + "'");
    auto in_range = [&](std::size_t s) { return s < states.size(); };
    if (!std::all_of(start.begin(), start.end(), in_range) ||
        !std::all_of(accept.begin(), accept.end(), in_range))
      throw Error(ErrorKind::unknown_node, "start/accept state out of range");
    for (const auto& t : transitions) {
      if (!in_range(t.from) || !in_range(t.to))
        throw Error(ErrorKind::unknown_node, "transition endpoint out of range");
      if (t.symbol >= alphabet.size()) throw Error(ErrorKind::unknown_symbol, "transition symbol out of range");
    }
  }

  friend bool operator==(const Nfa& a, const Nfa& b) {
    return a.alphabet == b.alphabet && a.states == b.states && a.start == b.start &&
           a.accept == b.accept && a.transitions == b.transitions;
  }
};

}  // namespace pathlyap
