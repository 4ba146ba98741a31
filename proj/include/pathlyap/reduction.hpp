#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "pathlyap/error.hpp"
#include "pathlyap/graph.hpp"
#include "pathlyap/path_complete.hpp"

namespace pathlyap {

/// "f" unless taken, then "f0", "f1", ...
inline std::string default_fresh_symbol(const Alphabet& alphabet) {
  if (!alphabet.find("f")) return "f";
  for (std::size_t k = 0;; ++k) {
    std::string candidate = "f" + std::to_string(k);
    if (!alphabet.find(candidate)) return candidate;
  }
}

/// Graph over alphabet + {fresh}: every transition becomes a unit edge and
/// every accepting state gets a fresh-labeled edge to every start state. The
/// graph is path-complete iff the automaton accepts every word.
///
/// An explicitly requested fresh symbol that already belongs to the alphabet
/// is an error; without one, a free name is picked.
inline LabeledGraph reduce_universality(const Nfa& nfa, const std::optional<std::string>& fresh = std::nullopt) {
  nfa.validate();
  std::string f;
  if (fresh) {
    if (nfa.alphabet.find(*fresh)) throw Error(ErrorKind::fresh_symbol_collision, "'" + *fresh + "'");
    f = *fresh;
  } else {
    f = default_fresh_symbol(nfa.alphabet);
  }
  auto symbols = nfa.alphabet.symbols();
  symbols.push_back(f);
  const Symbol f_index = symbols.size() - 1;

  std::vector<Edge> edges;
  edges.reserve(nfa.transitions.size() + nfa.accept.size() * nfa.start.size());
  for (const auto& t : nfa.transitions) edges.push_back({t.from, t.to, {t.symbol}});
  for (auto a : nfa.accept)
    for (auto s : nfa.start) edges.push_back({a, s, {f_index}});
  return LabeledGraph(Alphabet(std::move(symbols)), nfa.states, std::move(edges));
}

struct UniversalityResult {
  bool universal = false;
  /// Shortlex-least rejected word when not universal; empty when the empty
  /// word itself is rejected.
  Word counterexample;
  /// Shortlex-least rejected nonempty word, if any exists.
  std::optional<Word> nonempty_counterexample;
  std::size_t explored_subsets = 0;
};

/// Determinizes from the start set; universal iff every reachable subset
/// contains an accepting state. The search stops at the first rejected
/// nonempty word, so both counterexamples come out shortlex-least.
inline UniversalityResult nfa_universal_exact(const Nfa& nfa, std::size_t subset_budget = default_subset_budget) {
  nfa.validate();
  const std::size_t m = nfa.alphabet.size();
  std::vector<std::vector<std::vector<std::size_t>>> successors(nfa.states.size(),
                                                                std::vector<std::vector<std::size_t>>(m));
  for (const auto& t : nfa.transitions) successors[t.from][t.symbol].push_back(t.to);
  std::vector<char> accepting(nfa.states.size(), 0);
  for (auto a : nfa.accept) accepting[a] = 1;
  auto accepts = [&](const detail::StateSet& set) {
    for (auto s : set)
      if (accepting[s]) return true;
    return false;
  };

  detail::StateSet start;
  for (auto s : nfa.start) start.push_back(static_cast<std::uint32_t>(s));
  std::sort(start.begin(), start.end());
  start.erase(std::unique(start.begin(), start.end()), start.end());

  struct Discovered {
    std::size_t parent;
    Symbol symbol;
  };
  std::vector<detail::StateSet> sets{start};
  std::vector<Discovered> trail{{0, 0}};
  std::unordered_map<detail::StateSet, std::size_t, detail::StateSetHash> index{{start, 0}};
  UniversalityResult out;
  const bool empty_rejected = !accepts(start);

  auto word_to = [&](std::size_t at) {
    Word w;
    for (; at != 0; at = trail[at].parent) w.push_back(trail[at].symbol);
    return mirror(std::move(w));
  };
  auto finish = [&](Word rejected) {
    out.explored_subsets = sets.size();
    out.nonempty_counterexample = rejected;
    out.counterexample = empty_rejected ? Word{} : std::move(rejected);
    return out;
  };

  std::deque<std::size_t> queue{0};
  while (!queue.empty()) {
    const auto at = queue.front();
    queue.pop_front();
    for (Symbol a = 0; a < m; ++a) {
      auto next = detail::step(sets[at], a, successors);
      if (auto it = index.find(next); it != index.end()) {
        // Only the start set can be revisited while still rejecting.
        if (it->second == 0 && empty_rejected) {
          Word w = word_to(at);
          w.push_back(a);
          return finish(std::move(w));
        }
        continue;
      }
      if (sets.size() >= subset_budget)
        throw Error(ErrorKind::budget_exceeded,
                    "more than " + std::to_string(subset_budget) + " reachable subsets");
      index.emplace(next, sets.size());
      trail.push_back({at, a});
      sets.push_back(std::move(next));
      if (!accepts(sets.back())) return finish(word_to(sets.size() - 1));
      queue.push_back(sets.size() - 1);
    }
  }
  out.universal = !empty_rejected;
  out.explored_subsets = sets.size();
  return out;
}

}  // namespace pathlyap
