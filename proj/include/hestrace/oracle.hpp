#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hestrace/automata.hpp"
#include "hestrace/error.hpp"
#include "hestrace/omega_input.hpp"

// Graph-theoretic deciders, written independently of the equation-system engine and used as
// its ground truth.

namespace hestrace::oracle {

/// Synchronized graph of automaton states and lasso positions. Vertex (x, p) has index
/// x * positions + p; its infinite paths are the runs over the input.
struct ProductGraph {
  std::size_t states = 0;
  std::size_t positions = 0;
  std::vector<std::vector<std::size_t>> succ;
  std::vector<unsigned> priority;

  std::size_t vertex(StateId x, std::size_t p) const noexcept { return x * positions + p; }
  StateId state_of(std::size_t v) const noexcept { return v / positions; }
  std::size_t position_of(std::size_t v) const noexcept { return v % positions; }
  std::size_t size() const noexcept { return succ.size(); }
};

inline ProductGraph build_product_graph(const ParityWordAutomaton& aut, const LassoWord& w) {
  if (w.cycle.empty()) throw ValidationError("lasso cycle must be nonempty");
  ProductGraph g;
  g.states = aut.num_states();
  g.positions = w.length();
  g.succ.resize(g.states * g.positions);
  g.priority.resize(g.states * g.positions);
  std::vector<SymbolId> letter(g.positions);
  for (std::size_t p = 0; p < g.positions; ++p) {
    auto id = index_of(aut.alphabet, w.at(p));
    if (!id) throw AlphabetMismatch("letter " + w.at(p) + " is not in the automaton's alphabet");
    letter[p] = *id;
  }
  for (StateId x = 0; x < g.states; ++x)
    for (std::size_t p = 0; p < g.positions; ++p) g.priority[g.vertex(x, p)] = aut.priority[x];
  for (const auto& t : aut.transitions)
    for (std::size_t p = 0; p < g.positions; ++p)
      if (t.letter == letter[p]) g.succ[g.vertex(t.from, p)].push_back(g.vertex(t.to, w.successor(p)));
  return g;
}

namespace detail {

inline std::vector<bool> reachable_from(const std::vector<std::vector<std::size_t>>& succ, std::size_t start) {
  std::vector<bool> seen(succ.size(), false);
  std::vector<std::size_t> stack{start};
  seen[start] = true;
  while (!stack.empty()) {
    auto v = stack.back();
    stack.pop_back();
    for (auto w : succ[v])
      if (!seen[w]) {
        seen[w] = true;
        stack.push_back(w);
      }
  }
  return seen;
}

// Shortest path from `from` to `to` (both included) through vertices allowed by `keep`,
// using at least one edge.
inline std::optional<std::vector<std::size_t>> shortest_path(const std::vector<std::vector<std::size_t>>& succ,
                                                             std::size_t from, std::size_t to,
                                                             const std::vector<bool>& keep) {
  std::vector<std::size_t> parent(succ.size(), SIZE_MAX);
  std::deque<std::size_t> q;
  for (auto w : succ[from])
    if (keep[w] && parent[w] == SIZE_MAX) {
      parent[w] = from;
      q.push_back(w);
    }
  while (!q.empty()) {
    auto v = q.front();
    q.pop_front();
    if (v == to) {
      std::vector<std::size_t> path{to};
      auto cur = to;
      do {
        cur = parent[cur];
        path.push_back(cur);
      } while (cur != from);
      std::reverse(path.begin(), path.end());
      return path;
    }
    for (auto w : succ[v])
      if (keep[w] && parent[w] == SIZE_MAX) {
        parent[w] = v;
        q.push_back(w);
      }
  }
  return std::nullopt;
}

}  // namespace detail

/// Accepting lasso in a graph with vertex priorities: a path from `start` to a vertex v of
/// even priority d, then a cycle through v using only priorities <= d.
struct GraphLasso {
  std::vector<std::size_t> stem;   ///< vertices before the cycle
  std::vector<std::size_t> cycle;  ///< starts at the max-priority vertex
};

inline std::optional<GraphLasso> find_even_lasso(const std::vector<std::vector<std::size_t>>& succ,
                                                 const std::vector<unsigned>& priority, std::size_t start) {
  const std::size_t n = succ.size();
  auto reach = detail::reachable_from(succ, start);
  unsigned top = 0;
  for (std::size_t v = 0; v < n; ++v)
    if (reach[v]) top = std::max(top, priority[v]);
  for (unsigned d = 0; d <= top; d += 2) {
    std::vector<bool> keep(n);
    for (std::size_t v = 0; v < n; ++v) keep[v] = reach[v] && priority[v] <= d;
    auto [comp, cyclic] =
        hestrace::detail::cyclic_components(n, [&](std::size_t v) -> const auto& { return succ[v]; }, keep);
    for (std::size_t v = 0; v < n; ++v) {
      if (!keep[v] || priority[v] != d || !cyclic[comp[v]]) continue;
      std::vector<bool> same(n);
      for (std::size_t u = 0; u < n; ++u) same[u] = keep[u] && comp[u] == comp[v];
      auto loop = detail::shortest_path(succ, v, v, same);
      GraphLasso l;
      if (v != start) {
        auto stem = detail::shortest_path(succ, start, v, std::vector<bool>(n, true));
        l.stem.assign(stem->begin(), stem->end() - 1);
      }
      l.cycle.assign(loop->begin(), loop->end() - 1);
      return l;
    }
  }
  return std::nullopt;
}

struct LassoVerdict {
  bool accepted = false;
  std::optional<RunLasso> run;  ///< an accepting run when accepted
};

/// Some run from x over w has an even limsup of priorities.
inline LassoVerdict lasso_acceptance(const ParityWordAutomaton& aut, StateId x, const LassoWord& w) {
  if (x >= aut.num_states()) throw ValidationError("state out of range");
  auto g = build_product_graph(aut, w);
  auto lasso = find_even_lasso(g.succ, g.priority, g.vertex(x, 0));
  if (!lasso) return {false, std::nullopt};
  RunLasso run;
  auto step = [&](std::size_t v) { return RunLetter{w.at(g.position_of(v)), g.state_of(v)}; };
  for (auto v : lasso->stem) run.stem.push_back(step(v));
  for (auto v : lasso->cycle) run.cycle.push_back(step(v));
  return {true, std::move(run)};
}

// Parity games: max-parity, even priorities win for the existential player. A vertex without
// successors loses for its owner.

enum class Player : std::uint8_t { exists = 0, forall = 1 };

inline Player opponent(Player p) { return p == Player::exists ? Player::forall : Player::exists; }

struct ParityGame {
  std::vector<Player> owner;
  std::vector<unsigned> priority;
  std::vector<std::vector<std::size_t>> succ;

  std::size_t add_vertex(Player p, unsigned prio) {
    owner.push_back(p);
    priority.push_back(prio);
    succ.emplace_back();
    return owner.size() - 1;
  }
  void add_edge(std::size_t from, std::size_t to) { succ[from].push_back(to); }
  std::size_t size() const noexcept { return owner.size(); }
};

struct GameSolution {
  std::vector<Player> winner;
  /// For existential vertices in the existential region: the chosen successor.
  std::vector<std::optional<std::size_t>> strategy;
};

namespace detail {

class Zielonka {
public:
  explicit Zielonka(const ParityGame& g) : g_(g), n_(g.size()) {
    // Dead ends lead to a sink that loses for their owner.
    owner_ = g.owner;
    priority_ = g.priority;
    succ_ = g.succ;
    lose_exists_ = add_sink(Player::exists, 1);
    lose_forall_ = add_sink(Player::forall, 2);
    for (std::size_t v = 0; v < n_; ++v)
      if (succ_[v].empty()) succ_[v].push_back(g.owner[v] == Player::exists ? lose_exists_ : lose_forall_);
    pred_.resize(succ_.size());
    for (std::size_t v = 0; v < succ_.size(); ++v)
      for (auto w : succ_[v]) pred_[w].push_back(v);
    strategy_.assign(succ_.size(), std::nullopt);
  }

  GameSolution run() {
    std::vector<bool> all(succ_.size(), true);
    auto win = solve(all);
    GameSolution s;
    for (std::size_t v = 0; v < n_; ++v) {
      s.winner.push_back(win[0][v] ? Player::exists : Player::forall);
      bool keep = win[0][v] && owner_[v] == Player::exists && strategy_[v] && *strategy_[v] < n_;
      s.strategy.push_back(keep ? strategy_[v] : std::nullopt);
    }
    return s;
  }

private:
  using Set = std::vector<bool>;

  std::size_t add_sink(Player p, unsigned prio) {
    owner_.push_back(p);
    priority_.push_back(prio);
    succ_.emplace_back();
    auto v = owner_.size() - 1;
    succ_[v].push_back(v);
    return v;
  }

  static bool empty(const Set& s) { return std::none_of(s.begin(), s.end(), [](bool b) { return b; }); }

  // Attractor of `target` for `p` inside `alive`; records p's attracting moves.
  Set attractor(const Set& alive, const Set& target, Player p, bool record) {
    Set attr = target;
    std::vector<std::size_t> count(succ_.size(), 0);
    std::deque<std::size_t> q;
    for (std::size_t v = 0; v < succ_.size(); ++v) {
      if (!alive[v]) continue;
      for (auto w : succ_[v])
        if (alive[w]) ++count[v];
      if (attr[v]) q.push_back(v);
    }
    while (!q.empty()) {
      auto v = q.front();
      q.pop_front();
      for (auto u : pred_[v]) {
        if (!alive[u] || attr[u]) continue;
        if (owner_[u] == p) {
          attr[u] = true;
          if (record && p == Player::exists) strategy_[u] = v;
          q.push_back(u);
        } else if (--count[u] == 0) {
          attr[u] = true;
          q.push_back(u);
        }
      }
    }
    return attr;
  }

  // Returns {W_exists, W_forall}; writes existential strategies for W_exists.
  std::array<Set, 2> solve(const Set& alive) {
    const std::size_t n = succ_.size();
    std::array<Set, 2> win{Set(n, false), Set(n, false)};
    if (empty(alive)) return win;
    unsigned d = 0;
    for (std::size_t v = 0; v < n; ++v)
      if (alive[v]) d = std::max(d, priority_[v]);
    const Player p = d % 2 == 0 ? Player::exists : Player::forall;
    const auto pi = static_cast<std::size_t>(p), qi = 1 - pi;
    Set top(n, false);
    for (std::size_t v = 0; v < n; ++v) top[v] = alive[v] && priority_[v] == d;
    Set a = attractor(alive, top, p, p == Player::exists);
    Set sub(n);
    for (std::size_t v = 0; v < n; ++v) sub[v] = alive[v] && !a[v];
    auto inner = solve(sub);
    if (empty(inner[qi])) {
      win[pi] = alive;
      if (p == Player::exists)
        for (std::size_t v = 0; v < n; ++v)
          if (top[v] && owner_[v] == Player::exists)
            for (auto w : succ_[v])
              if (alive[w]) {
                strategy_[v] = w;
                break;
              }
      return win;
    }
    Set b = attractor(alive, inner[qi], opponent(p), opponent(p) == Player::exists);
    Set rest(n);
    for (std::size_t v = 0; v < n; ++v) rest[v] = alive[v] && !b[v];
    auto outer = solve(rest);
    win[pi] = outer[pi];
    for (std::size_t v = 0; v < n; ++v) win[qi][v] = outer[qi][v] || b[v];
    return win;
  }

  const ParityGame& g_;
  std::size_t n_;
  std::vector<Player> owner_;
  std::vector<unsigned> priority_;
  std::vector<std::vector<std::size_t>> succ_, pred_;
  std::size_t lose_exists_ = 0, lose_forall_ = 0;
  std::vector<std::optional<std::size_t>> strategy_;
};

}  // namespace detail

/// Recursive Zielonka algorithm. Exact winning regions plus a positional existential strategy.
inline GameSolution zielonka_solve(const ParityGame& g) { return detail::Zielonka(g).run(); }

/// Does the existential strategy win from every vertex of its claimed region? The strategy's
/// one-player residue is checked for a reachable odd-max cycle or existential dead end.
inline bool verify_exists_strategy(const ParityGame& g, const GameSolution& s) {
  const std::size_t n = g.size();
  std::vector<std::vector<std::size_t>> succ(n);
  std::vector<unsigned> flipped(n);
  for (std::size_t v = 0; v < n; ++v) {
    flipped[v] = g.priority[v] + 1;  // odd cycles of g become even ones here
    if (g.owner[v] == Player::exists) {
      if (s.winner[v] == Player::exists) {
        if (!s.strategy[v]) return false;
        succ[v].push_back(*s.strategy[v]);
      } else {
        succ[v] = g.succ[v];
      }
    } else {
      succ[v] = g.succ[v];
    }
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (s.winner[v] != Player::exists) continue;
    auto reach = detail::reachable_from(succ, v);
    for (std::size_t u = 0; u < n; ++u)
      if (reach[u] && g.owner[u] == Player::exists && succ[u].empty()) return false;
    if (find_even_lasso(succ, flipped, v)) return false;
  }
  return true;
}

struct TreeVerdict {
  bool accepted = false;
  std::optional<RunTree> run;  ///< regular accepting run tree when accepted
};

/// Membership of the unfolding of t in the language of x, decided by the acceptance game:
/// the existential player picks transitions at (state, node), the universal player a child.
inline TreeVerdict tree_membership_oracle(const ParityTreeAutomaton& aut, StateId x, const RegularTree& t) {
  if (x >= aut.num_states()) throw ValidationError("state out of range");
  if (auto v = check_arities(t, aut.alphabet); !v) throw AlphabetMismatch(v.reason);
  const std::size_t nodes = t.size();
  ParityGame g;
  for (StateId s = 0; s < aut.num_states(); ++s)
    for (std::size_t n = 0; n < nodes; ++n) g.add_vertex(Player::exists, aut.priority[s]);
  auto pick = [&](StateId s, std::size_t n) { return s * nodes + n; };
  struct Choice {
    std::size_t transition, node;
  };
  std::vector<Choice> choice_of(g.size());
  for (std::size_t k = 0; k < aut.transitions.size(); ++k) {
    const auto& tr = aut.transitions[k];
    for (std::size_t n = 0; n < nodes; ++n) {
      if (aut.alphabet.symbols[tr.symbol] != t.nodes[n].label) continue;
      auto f = g.add_vertex(Player::forall, aut.priority[tr.from]);
      choice_of.push_back({k, n});
      g.add_edge(pick(tr.from, n), f);
      for (std::size_t c = 0; c < tr.children.size(); ++c) g.add_edge(f, pick(tr.children[c], t.nodes[n].children[c]));
    }
  }
  auto sol = zielonka_solve(g);
  auto start = pick(x, t.root);
  if (sol.winner[start] != Player::exists) return {false, std::nullopt};

  RunTree run;
  std::vector<std::size_t> id(g.size(), SIZE_MAX);
  std::vector<std::size_t> order{start};
  id[start] = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    auto v = order[k];
    const auto& ch = choice_of[*sol.strategy[v]];
    const auto& tr = aut.transitions[ch.transition];
    RunTree::Node node{{t.nodes[ch.node].label, tr.from}, {}};
    for (std::size_t c = 0; c < tr.children.size(); ++c) {
      auto w = pick(tr.children[c], t.nodes[ch.node].children[c]);
      if (id[w] == SIZE_MAX) {
        id[w] = order.size();
        order.push_back(w);
      }
      node.children.push_back(id[w]);
    }
    run.nodes.push_back(std::move(node));
  }
  return {true, std::move(run)};
}

/// Is there an infinite run from x over flatten(d) whose state priorities equal d's
/// decorations? Product search restricted to matching vertices.
inline bool decorated_lasso_realizable(const ParityWordAutomaton& aut, StateId x, const DecoratedLassoWord& d) {
  LassoWord w;
  for (const auto& l : d.stem) w.stem.push_back(l.symbol);
  for (const auto& l : d.cycle) w.cycle.push_back(l.symbol);
  auto g = build_product_graph(aut, w);
  auto matches = [&](std::size_t v) { return aut.priority[g.state_of(v)] == d.at(g.position_of(v)).priority; };
  if (!matches(g.vertex(x, 0))) return false;
  std::vector<std::vector<std::size_t>> succ(g.size());
  for (std::size_t v = 0; v < g.size(); ++v)
    if (matches(v))
      for (auto w2 : g.succ[v])
        if (matches(w2)) succ[v].push_back(w2);
  return find_even_lasso(succ, std::vector<unsigned>(g.size(), 0), g.vertex(x, 0)).has_value();
}

inline constexpr std::size_t kMaxFiniteTraceLength = 12;

/// Words of length <= maxlen readable from x into a terminating state, by breadth-first
/// search over (state, word read so far).
inline std::set<std::vector<std::string>> finite_run_enumeration(const ParityWordAutomaton& aut, StateId x,
                                                                 std::size_t maxlen) {
  if (maxlen > kMaxFiniteTraceLength) throw Error("maximum finite trace length exceeds cap");
  if (x >= aut.num_states()) throw ValidationError("state out of range");
  std::set<std::vector<std::string>> out;
  std::set<std::pair<StateId, std::vector<std::string>>> frontier{{x, {}}};
  for (std::size_t len = 0; len <= maxlen; ++len) {
    std::set<std::pair<StateId, std::vector<std::string>>> next;
    for (const auto& [s, word] : frontier) {
      if (aut.is_final(s)) out.insert(word);
      if (len == maxlen) continue;
      for (const auto& t : aut.transitions)
        if (t.from == s) {
          auto w = word;
          w.push_back(aut.alphabet[t.letter]);
          next.emplace(t.to, std::move(w));
        }
    }
    frontier = std::move(next);
  }
  return out;
}

}  // namespace hestrace::oracle
