#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <string>
#include <unordered_map>
#include <vector>

#include "pathlyap/error.hpp"
#include "pathlyap/graph.hpp"

namespace pathlyap {

inline constexpr std::size_t default_subset_budget = 1'000'000;

struct PathCompleteness {
  bool complete = false;
  /// Shortest, then lexicographically least, unreadable word; empty when complete.
  Word missing_word;
  std::size_t explored_subsets = 0;
  std::size_t expanded_state_count = 0;
};

namespace detail {

using StateSet = std::vector<std::uint32_t>;

struct StateSetHash {
  std::size_t operator()(const StateSet& s) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (auto v : s) {
      h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

/// Image of a sorted state set under one symbol, again sorted and deduplicated.
template <class Successors>
StateSet step(const StateSet& from, Symbol a, const Successors& successors) {
  StateSet out;
  for (auto s : from)
    for (auto t : successors[s][a]) out.push_back(static_cast<std::uint32_t>(t));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace detail

/// Decides whether every word is a factor of some path label.
///
/// Runs the subset construction on the unit expansion starting from the set
/// of all states; a word is unreadable exactly when it drives that set to the
/// empty set. Breadth-first search with children in symbol order finds the
/// shortlex-least such word. Throws budget_exceeded once more than
/// `subset_budget` distinct subsets have been discovered.
inline PathCompleteness check_path_complete(const LabeledGraph& g,
                                            std::size_t subset_budget = default_subset_budget) {
  if (subset_budget < 1) throw Error(ErrorKind::invalid_argument, "subset budget must be at least 1");
  const ExpandedGraph x = expand(g);
  const std::size_t m = g.alphabet().size();

  PathCompleteness result;
  result.expanded_state_count = x.state_count();

  detail::StateSet all(x.state_count());
  for (std::size_t s = 0; s < all.size(); ++s) all[s] = static_cast<std::uint32_t>(s);

  struct Discovered {
    std::size_t parent;
    Symbol symbol;
  };
  std::vector<Discovered> trail;
  std::vector<detail::StateSet> sets;
  std::unordered_map<detail::StateSet, std::size_t, detail::StateSetHash> index;

  auto witness = [&](std::size_t parent, Symbol last) {
    Word w{last};
    for (std::size_t at = parent; at != 0; at = trail[at].parent) w.push_back(trail[at].symbol);
    return mirror(std::move(w));
  };

  if (all.empty()) {
    // Edgeless and stateless: the very first symbol is unreadable.
    result.explored_subsets = 1;
    result.missing_word = Word{0};
    return result;
  }

  sets.push_back(all);
  trail.push_back({0, 0});
  index.emplace(all, 0);

  std::deque<std::size_t> queue{0};
  while (!queue.empty()) {
    const std::size_t at = queue.front();
    queue.pop_front();
    for (Symbol a = 0; a < m; ++a) {
      detail::StateSet next = detail::step(sets[at], a, x.successors);
      if (next.empty()) {
        result.explored_subsets = sets.size();
        result.missing_word = witness(at, a);
        return result;
      }
      if (index.contains(next)) continue;
      if (sets.size() >= subset_budget)
        throw Error(ErrorKind::budget_exceeded,
                    "more than " + std::to_string(subset_budget) + " reachable subsets");
      index.emplace(next, sets.size());
      trail.push_back({at, a});
      sets.push_back(std::move(next));
      queue.push_back(sets.size() - 1);
    }
  }
  result.complete = true;
  result.explored_subsets = sets.size();
  return result;
}

/// Reference oracle: forward reachability over the unit expansion, one symbol
/// at a time. Linear in |w| times the number of expanded states.
inline bool readable_bruteforce(const LabeledGraph& g, const Word& w) {
  if (!g.alphabet().contains(w)) throw Error(ErrorKind::unknown_symbol, "word symbol out of range");
  if (w.empty()) return true;
  const ExpandedGraph x = expand(g);
  std::vector<char> current(x.state_count(), 1);
  for (Symbol a : w) {
    std::vector<char> next(x.state_count(), 0);
    bool any = false;
    for (std::size_t s = 0; s < x.state_count(); ++s) {
      if (!current[s]) continue;
      for (auto t : x.successors[s][a]) {
        next[t] = 1;
        any = true;
      }
    }
    if (!any) return false;
    current = std::move(next);
  }
  return true;
}

}  // namespace pathlyap
