#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "hestrace/automata.hpp"
#include "hestrace/error.hpp"

namespace hestrace {

/// Ultimately periodic sequence stem . cycle^omega. The cycle is never empty.
template <class T>
struct Lasso {
  std::vector<T> stem;
  std::vector<T> cycle;

  std::size_t length() const noexcept { return stem.size() + cycle.size(); }

  /// Element i of the infinite sequence.
  const T& at(std::size_t i) const {
    if (i < stem.size()) return stem[i];
    return cycle[(i - stem.size()) % cycle.size()];
  }

  /// Representation position reached after position p (positions are 0..length()-1).
  std::size_t successor(std::size_t p) const noexcept { return p + 1 < length() ? p + 1 : stem.size(); }

  friend bool operator==(const Lasso&, const Lasso&) = default;
  friend auto operator<=>(const Lasso&, const Lasso&) = default;
};

struct DecoratedLetter {
  std::string symbol;
  unsigned priority = 0;
  friend auto operator<=>(const DecoratedLetter&, const DecoratedLetter&) = default;
};

/// A run step: the state the run is in and the symbol it reads there.
struct RunLetter {
  std::string symbol;
  StateId state = 0;
  friend auto operator<=>(const RunLetter&, const RunLetter&) = default;
};

using LassoWord = Lasso<std::string>;
using DecoratedLassoWord = Lasso<DecoratedLetter>;
using RunLasso = Lasso<RunLetter>;

/// Shortest period, then shortest stem. The result is the unique canonical representative.
template <class T>
Lasso<T> normalize(Lasso<T> l) {
  if (l.cycle.empty()) throw ValidationError("lasso cycle must be nonempty");
  const std::size_t n = l.cycle.size();
  for (std::size_t d = 1; d <= n; ++d) {
    if (n % d) continue;
    bool periodic = true;
    for (std::size_t i = d; i < n && periodic; ++i) periodic = l.cycle[i] == l.cycle[i - d];
    if (periodic) {
      l.cycle.resize(d);
      break;
    }
  }
  while (!l.stem.empty() && l.stem.back() == l.cycle.back()) {
    std::rotate(l.cycle.rbegin(), l.cycle.rbegin() + 1, l.cycle.rend());
    l.stem.pop_back();
  }
  return l;
}

/// Same infinite sequence, decided on canonical forms.
template <class T>
bool same_sequence(const Lasso<T>& a, const Lasso<T>& b) {
  return normalize(a) == normalize(b);
}

/// (u . v^(k-1), v): the same sequence with a longer stem.
template <class T>
Lasso<T> unroll(const Lasso<T>& l, std::size_t k) {
  if (k < 1) throw ValidationError("unroll needs k >= 1");
  Lasso<T> r{l.stem, l.cycle};
  for (std::size_t i = 1; i < k; ++i) r.stem.insert(r.stem.end(), l.cycle.begin(), l.cycle.end());
  return r;
}

/// Concatenation of a nonempty finite prefix with an infinite word.
inline LassoWord concat_mu(const std::vector<std::string>& prefix, const LassoWord& tail) {
  if (prefix.empty()) throw ValidationError("concatenation needs a nonempty prefix");
  LassoWord r{prefix, tail.cycle};
  r.stem.insert(r.stem.end(), tail.stem.begin(), tail.stem.end());
  return r;
}

inline LassoWord flatten_word(const DecoratedLassoWord& d) {
  LassoWord w;
  for (const auto& l : d.stem) w.stem.push_back(l.symbol);
  for (const auto& l : d.cycle) w.cycle.push_back(l.symbol);
  return w;
}

/// Pairs each letter with the priority of the state it is read from.
inline DecoratedLassoWord decorate_run(const RunLasso& run, const std::vector<unsigned>& priority) {
  DecoratedLassoWord d;
  for (const auto& s : run.stem) d.stem.push_back({s.symbol, priority.at(s.state)});
  for (const auto& s : run.cycle) d.cycle.push_back({s.symbol, priority.at(s.state)});
  return d;
}

inline LassoWord run_word(const RunLasso& run) {
  LassoWord w;
  for (const auto& s : run.stem) w.stem.push_back(s.symbol);
  for (const auto& s : run.cycle) w.cycle.push_back(s.symbol);
  return w;
}

/// Grade of a decorated word: the priority of its first letter.
inline unsigned grade(const DecoratedLassoWord& d) { return d.at(0).priority; }

/// Accepts iff the first priority is `expected_grade` and the cycle maximum is even.
/// `max_priority`, when nonzero, bounds every priority.
inline Verdict check_decorated_invariant(const DecoratedLassoWord& d, unsigned expected_grade,
                                         unsigned max_priority = 0) {
  if (d.cycle.empty()) return Verdict::fail("empty cycle");
  for (const auto* part : {&d.stem, &d.cycle})
    for (const auto& l : *part)
      if (l.priority < 1 || (max_priority && l.priority > max_priority))
        return Verdict::fail("priority out of range: " + std::to_string(l.priority));
  if (grade(d) != expected_grade)
    return Verdict::fail("grade mismatch: first priority " + std::to_string(grade(d)) + ", expected " +
                         std::to_string(expected_grade));
  unsigned top = 0;
  for (const auto& l : d.cycle) top = std::max(top, l.priority);
  if (top % 2) return Verdict::fail("odd cycle maximum " + std::to_string(top));
  return Verdict::pass();
}

/// Root/first priority lowered from j to j-1; every other occurrence keeps its priority.
inline DecoratedLassoWord decomp(const DecoratedLassoWord& d) {
  unsigned j = grade(d);
  if (j < 2) throw ValidationError("decomp needs grade >= 2");
  DecoratedLassoWord r = d;
  if (r.stem.empty()) {
    r.stem.push_back(r.cycle.front());
    std::rotate(r.cycle.begin(), r.cycle.begin() + 1, r.cycle.end());
  }
  r.stem.front().priority = j - 1;
  return r;
}

template <class Child>
struct Unfolded {
  std::string symbol;
  std::vector<std::pair<unsigned, Child>> children;  ///< (grade, child)
};

/// Pops the first letter. The single child is returned normalized.
inline Unfolded<DecoratedLassoWord> unfold_step(const DecoratedLassoWord& d) {
  DecoratedLassoWord rest;
  if (!d.stem.empty()) {
    rest.stem.assign(d.stem.begin() + 1, d.stem.end());
    rest.cycle = d.cycle;
  } else {
    rest.cycle = d.cycle;
    std::rotate(rest.cycle.begin(), rest.cycle.begin() + 1, rest.cycle.end());
  }
  rest = normalize(std::move(rest));
  Unfolded<DecoratedLassoWord> u{d.at(0).symbol, {}};
  u.children.emplace_back(rest.at(0).priority, std::move(rest));
  return u;
}

/// Inverse of unfold_step: prepends a letter.
inline DecoratedLassoWord prepend(DecoratedLetter first, const DecoratedLassoWord& rest) {
  DecoratedLassoWord r{{std::move(first)}, rest.cycle};
  r.stem.insert(r.stem.end(), rest.stem.begin(), rest.stem.end());
  return r;
}

// Regular trees.

template <class Label>
struct RegularTreeT {
  struct Node {
    Label label;
    std::vector<std::size_t> children;
    friend bool operator==(const Node&, const Node&) = default;
  };
  std::vector<Node> nodes;
  std::size_t root = 0;
  std::vector<std::string> names;  ///< optional, parallel to nodes

  std::size_t size() const noexcept { return nodes.size(); }
  std::string name(std::size_t n) const { return n < names.size() ? names[n] : "n" + std::to_string(n); }
  friend bool operator==(const RegularTreeT&, const RegularTreeT&) = default;
};

using RegularTree = RegularTreeT<std::string>;
using DecoratedRegularTree = RegularTreeT<DecoratedLetter>;
using RunTree = RegularTreeT<RunLetter>;

inline const std::string& symbol_of(const std::string& s) { return s; }
inline const std::string& symbol_of(const DecoratedLetter& d) { return d.symbol; }
inline const std::string& symbol_of(const RunLetter& r) { return r.symbol; }

/// Nodes reachable from the root, renumbered in breadth-first order (root becomes 0).
template <class Label>
RegularTreeT<Label> reachable_part(const RegularTreeT<Label>& t) {
  std::vector<std::size_t> renum(t.size(), SIZE_MAX);
  std::vector<std::size_t> order{t.root};
  renum[t.root] = 0;
  for (std::size_t k = 0; k < order.size(); ++k)
    for (auto c : t.nodes[order[k]].children)
      if (renum[c] == SIZE_MAX) {
        renum[c] = order.size();
        order.push_back(c);
      }
  RegularTreeT<Label> r;
  for (auto n : order) {
    typename RegularTreeT<Label>::Node node{t.nodes[n].label, {}};
    for (auto c : t.nodes[n].children) node.children.push_back(renum[c]);
    r.nodes.push_back(std::move(node));
    if (!t.names.empty()) r.names.push_back(t.names[n]);
  }
  return r;
}

/// Child counts agree per symbol, indices are in range, every node is reachable.
template <class Label>
Verdict validate_tree(const RegularTreeT<Label>& t) {
  if (t.nodes.empty()) return Verdict::fail("tree has no nodes");
  if (t.root >= t.size()) return Verdict::fail("root out of range");
  std::map<std::string, std::size_t> arity;
  for (const auto& n : t.nodes) {
    for (auto c : n.children)
      if (c >= t.size()) return Verdict::fail("child index out of range");
    auto [it, fresh] = arity.emplace(symbol_of(n.label), n.children.size());
    if (!fresh && it->second != n.children.size())
      return Verdict::fail("symbol " + it->first + " used with different child counts");
  }
  if (reachable_part(t).size() != t.size()) return Verdict::fail("node unreachable from root");
  return Verdict::pass();
}

/// Child count per symbol must match the ranked alphabet.
template <class Label>
Verdict check_arities(const RegularTreeT<Label>& t, const RankedAlphabet& alphabet) {
  for (const auto& n : t.nodes) {
    auto f = alphabet.find(symbol_of(n.label));
    if (!f) return Verdict::fail("symbol " + symbol_of(n.label) + " not in the ranked alphabet");
    if (alphabet.arity[*f] != n.children.size())
      return Verdict::fail("symbol " + symbol_of(n.label) + " has arity " + std::to_string(alphabet.arity[*f]) +
                           " but " + std::to_string(n.children.size()) + " children");
  }
  return Verdict::pass();
}

/// Equality of the infinite unfoldings, under a label comparison.
template <class LA, class LB, class Eq>
bool same_unfolding(const RegularTreeT<LA>& a, const RegularTreeT<LB>& b, Eq&& eq) {
  std::map<std::pair<std::size_t, std::size_t>, bool> seen;
  std::deque<std::pair<std::size_t, std::size_t>> work{{a.root, b.root}};
  seen[{a.root, b.root}] = true;
  while (!work.empty()) {
    auto [x, y] = work.front();
    work.pop_front();
    const auto& nx = a.nodes[x];
    const auto& ny = b.nodes[y];
    if (!eq(nx.label, ny.label) || nx.children.size() != ny.children.size()) return false;
    for (std::size_t k = 0; k < nx.children.size(); ++k) {
      std::pair<std::size_t, std::size_t> p{nx.children[k], ny.children[k]};
      if (seen.emplace(p, true).second) work.push_back(p);
    }
  }
  return true;
}

template <class LA, class LB>
bool same_unfolding(const RegularTreeT<LA>& a, const RegularTreeT<LB>& b) {
  return same_unfolding(a, b, [](const LA& x, const LB& y) { return x == y; });
}

/// Label projection to the symbol; graph shape is kept.
template <class Label>
RegularTree delst(const RegularTreeT<Label>& t) {
  RegularTree r;
  r.root = t.root;
  r.names = t.names;
  for (const auto& n : t.nodes) r.nodes.push_back({symbol_of(n.label), n.children});
  return r;
}

inline DecoratedRegularTree decorate_run(const RunTree& run, const std::vector<unsigned>& priority) {
  DecoratedRegularTree d;
  d.root = run.root;
  d.names = run.names;
  for (const auto& n : run.nodes) d.nodes.push_back({{n.label.symbol, priority.at(n.label.state)}, n.children});
  return d;
}

inline unsigned grade(const DecoratedRegularTree& t) { return t.nodes.at(t.root).label.priority; }

namespace detail {

// Tarjan over the nodes allowed by `keep`; returns per-node component id and whether each
// component contains a cycle.
template <class Succ>
std::pair<std::vector<std::size_t>, std::vector<bool>> cyclic_components(std::size_t n, Succ&& succ,
                                                                           const std::vector<bool>& keep) {
  std::vector<std::size_t> index(n, SIZE_MAX), low(n, 0), comp(n, SIZE_MAX);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<bool> cyclic;
  std::size_t counter = 0;
  struct Frame {
    std::size_t v, next;
  };
  for (std::size_t s = 0; s < n; ++s) {
    if (!keep[s] || index[s] != SIZE_MAX) continue;
    std::vector<Frame> call{{s, 0}};
    index[s] = low[s] = counter++;
    stack.push_back(s);
    on_stack[s] = true;
    while (!call.empty()) {
      auto& f = call.back();
      const auto& out = succ(f.v);
      if (f.next < out.size()) {
        auto w = out[f.next++];
        if (!keep[w]) continue;
        if (index[w] == SIZE_MAX) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      auto v = f.v;
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      if (low[v] == index[v]) {
        std::size_t id = cyclic.size();
        std::size_t members = 0;
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = id;
          ++members;
        } while (w != v);
        bool self_loop = false;
        for (auto x : succ(v))
          if (x == v) self_loop = true;
        cyclic.push_back(members > 1 || self_loop);
      }
    }
  }
  return {std::move(comp), std::move(cyclic)};
}

}  // namespace detail

/// Accepts iff the root priority is `expected_grade` and no cycle reachable from the root has
/// an odd maximum priority (for every odd d: no cyclic component among nodes of priority <= d
/// contains a node of priority d).
inline Verdict check_decorated_invariant(const DecoratedRegularTree& t0, unsigned expected_grade,
                                         unsigned max_priority = 0) {
  if (auto v = validate_tree(t0); !v) return v;
  auto t = reachable_part(t0);
  for (const auto& n : t.nodes)
    if (n.label.priority < 1 || (max_priority && n.label.priority > max_priority))
      return Verdict::fail("priority out of range: " + std::to_string(n.label.priority));
  if (grade(t) != expected_grade)
    return Verdict::fail("grade mismatch: root priority " + std::to_string(grade(t)) + ", expected " +
                         std::to_string(expected_grade));
  unsigned top = 0;
  for (const auto& n : t.nodes) top = std::max(top, n.label.priority);
  auto succ = [&](std::size_t v) -> const std::vector<std::size_t>& { return t.nodes[v].children; };
  for (unsigned d = 1; d <= top; d += 2) {
    std::vector<bool> keep(t.size());
    for (std::size_t v = 0; v < t.size(); ++v) keep[v] = t.nodes[v].label.priority <= d;
    auto [comp, cyclic] = detail::cyclic_components(t.size(), succ, keep);
    for (std::size_t v = 0; v < t.size(); ++v)
      if (keep[v] && t.nodes[v].label.priority == d && cyclic[comp[v]])
        return Verdict::fail("reachable cycle with odd maximum " + std::to_string(d));
  }
  return Verdict::pass();
}

/// Pops the root. Each child is the subtree rooted at that child, trimmed to its reachable part.
template <class Label>
Unfolded<RegularTreeT<Label>> unfold_step(const RegularTreeT<Label>& t) {
  Unfolded<RegularTreeT<Label>> u{symbol_of(t.nodes[t.root].label), {}};
  for (auto c : t.nodes[t.root].children) {
    auto sub = t;
    sub.root = c;
    sub = reachable_part(sub);
    unsigned g = 0;
    if constexpr (std::is_same_v<Label, DecoratedLetter>) g = sub.nodes[sub.root].label.priority;
    u.children.emplace_back(g, std::move(sub));
  }
  return u;
}

/// Root priority lowered from j to j-1. The root is split off so that other occurrences of
/// the root's node (via cycles) keep priority j.
inline DecoratedRegularTree decomp(const DecoratedRegularTree& t) {
  unsigned j = grade(t);
  if (j < 2) throw ValidationError("decomp needs grade >= 2");
  auto r = t;
  auto fresh = r.nodes[r.root];
  fresh.label.priority = j - 1;
  r.nodes.push_back(std::move(fresh));
  if (!r.names.empty()) r.names.push_back(r.names[r.root] + "'");
  r.root = r.nodes.size() - 1;
  return reachable_part(r);
}

}  // namespace hestrace
