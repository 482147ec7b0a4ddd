#pragma once

// Brute-force deciders used as ground truth by the tests and the acceptance binary. None of
// them calls into the solver, the restriction construction or the oracle module.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "hestrace/hestrace.hpp"

namespace support {

using namespace hestrace;

// ---- equation systems -------------------------------------------------------------------

/// l^(i)_1..l^(i)_i at `outer`, straight from the mutual recursion, with each extremal
/// fixpoint found by enumerating the lattice.
template <EnumerableLattice L>
std::vector<typename L::value_type> brute_intermediate(const HierEqSystem<L>& h, std::size_t i,
                                                       const std::vector<typename L::value_type>& outer) {
  using V = typename L::value_type;
  if (i == 0) return {};
  const auto& eq = h.equation(i - 1);
  auto with = [&](const V& u) {
    std::vector<V> args{u};
    args.insert(args.end(), outer.begin(), outer.end());
    return args;
  };
  auto f = [&](const V& u) {
    auto args = with(u);
    auto full = brute_intermediate(h, i - 1, args);
    full.insert(full.end(), args.begin(), args.end());
    return eq.body(std::span<const V>(full));
  };
  auto x = brute_force_extremal_fixpoint(eq.lattice, f, eq.sign == Sign::mu ? Extremum::least : Extremum::greatest);
  auto out = brute_intermediate(h, i - 1, with(x));
  out.push_back(x);
  return out;
}

template <EnumerableLattice L>
std::vector<typename L::value_type> brute_solve(const HierEqSystem<L>& h) {
  return brute_intermediate(h, h.size(), {});
}

/// Positive DNF per output bit: monotone in every variable by construction.
struct MonotoneBody {
  // clauses[bit] = list of conjunctions; a literal is (variable, bit).
  std::vector<std::vector<std::vector<std::pair<std::size_t, std::size_t>>>> clauses;
  std::size_t width = 0;

  BitSet operator()(std::span<const BitSet> env) const {
    BitSet out(width);
    for (std::size_t b = 0; b < width; ++b)
      for (const auto& conj : clauses[b])
        if (std::all_of(conj.begin(), conj.end(), [&](auto lit) { return env[lit.first].test(lit.second); })) {
          out.set(b);
          break;
        }
    return out;
  }
};

/// Up to `max_eqs` equations over powersets of at most `max_ground` elements, random signs.
inline HierEqSystem<PowersetLattice> random_powerset_hes(std::mt19937_64& rng, std::size_t max_eqs = 3,
                                                         std::size_t max_ground = 4) {
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  std::size_t m = 1 + pick(max_eqs);
  std::vector<std::size_t> ground(m);
  for (auto& g : ground) g = 1 + pick(max_ground);
  HierEqSystem<PowersetLattice> h;
  for (std::size_t k = 0; k < m; ++k) {
    MonotoneBody body;
    body.width = ground[k];
    body.clauses.resize(ground[k]);
    for (auto& cl : body.clauses) {
      std::size_t n = pick(4);
      for (std::size_t c = 0; c < n; ++c) {
        std::vector<std::pair<std::size_t, std::size_t>> conj;
        std::size_t lits = pick(3);
        for (std::size_t l = 0; l < lits; ++l) {
          auto var = pick(m);
          conj.emplace_back(var, pick(ground[var]));
        }
        cl.push_back(std::move(conj));
      }
    }
    h.add("u" + std::to_string(k + 1), PowersetLattice(ground[k]), rng() % 2 ? Sign::mu : Sign::nu, body);
  }
  return h;
}

// ---- graphs -----------------------------------------------------------------------------

using Graph = std::vector<std::vector<std::size_t>>;

inline std::vector<bool> reachable(const Graph& g, std::size_t start) {
  std::vector<bool> seen(g.size(), false);
  std::vector<std::size_t> todo{start};
  seen[start] = true;
  while (!todo.empty()) {
    auto v = todo.back();
    todo.pop_back();
    for (auto w : g[v])
      if (!seen[w]) {
        seen[w] = true;
        todo.push_back(w);
      }
  }
  return seen;
}

/// Every simple cycle among `allowed` vertices, each reported once (rooted at its least vertex).
/// Stops after `cap` cycles.
inline std::vector<std::vector<std::size_t>> simple_cycles(const Graph& g, const std::vector<bool>& allowed,
                                                           std::size_t cap = 200000) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> path;
  std::vector<bool> on_path(g.size(), false);
  std::function<void(std::size_t, std::size_t)> dfs = [&](std::size_t root, std::size_t v) {
    if (out.size() >= cap) return;
    for (auto w : g[v]) {
      if (!allowed[w] || w < root) continue;
      if (w == root) {
        out.push_back(path);
      } else if (!on_path[w]) {
        on_path[w] = true;
        path.push_back(w);
        dfs(root, w);
        path.pop_back();
        on_path[w] = false;
      }
    }
  };
  for (std::size_t r = 0; r < g.size(); ++r) {
    if (!allowed[r]) continue;
    path = {r};
    on_path[r] = true;
    dfs(r, r);
    on_path[r] = false;
  }
  return out;
}

inline unsigned cycle_max(const std::vector<std::size_t>& cycle, const std::vector<unsigned>& priority) {
  unsigned m = 0;
  for (auto v : cycle) m = std::max(m, priority[v]);
  return m;
}

/// Product of a word automaton with a lasso, built from scratch: vertex x*P + p.
struct Product {
  Graph succ;
  std::vector<unsigned> priority;
  std::size_t positions = 0;
};

inline Product product(const ParityWordAutomaton& a, const LassoWord& w) {
  Product g;
  std::vector<std::string> letters = w.stem;
  letters.insert(letters.end(), w.cycle.begin(), w.cycle.end());
  g.positions = letters.size();
  const std::size_t P = g.positions;
  g.succ.resize(a.num_states() * P);
  g.priority.resize(a.num_states() * P);
  for (std::size_t x = 0; x < a.num_states(); ++x)
    for (std::size_t p = 0; p < P; ++p) g.priority[x * P + p] = a.priority[x];
  for (const auto& t : a.transitions)
    for (std::size_t p = 0; p < P; ++p)
      if (a.alphabet[t.letter] == letters[p]) {
        std::size_t next = p + 1 < P ? p + 1 : w.stem.size();
        g.succ[t.from * P + p].push_back(t.to * P + next);
      }
  return g;
}

/// Some reachable simple cycle of the product has an even maximum.
inline bool accepts_by_cycles(const ParityWordAutomaton& a, StateId x, const LassoWord& w) {
  auto g = product(a, w);
  auto reach = reachable(g.succ, x * g.positions);
  for (const auto& c : simple_cycles(g.succ, reach))
    if (cycle_max(c, g.priority) % 2 == 0) return true;
  return false;
}

/// Every branch of the decorated tree's unfolding has an even limsup: no reachable simple
/// cycle of the node graph has an odd maximum.
inline bool tree_branches_even(const DecoratedRegularTree& t) {
  Graph g(t.size());
  std::vector<unsigned> pr(t.size());
  for (std::size_t n = 0; n < t.size(); ++n) {
    g[n] = t.nodes[n].children;
    pr[n] = t.nodes[n].label.priority;
  }
  auto reach = reachable(g, t.root);
  for (const auto& c : simple_cycles(g, reach))
    if (cycle_max(c, pr) % 2) return false;
  return true;
}

// ---- parity games -----------------------------------------------------------------------

/// Winning regions by trying every positional strategy of both players. Dead ends lose for
/// their owner. Games up to about 8 vertices with small out-degree.
inline std::vector<oracle::Player> exhaustive_winners(const oracle::ParityGame& g) {
  using oracle::Player;
  const std::size_t n = g.size();
  auto choices_of = [&](Player p) {
    std::vector<std::size_t> vs;
    for (std::size_t v = 0; v < n; ++v)
      if (g.owner[v] == p && !g.succ[v].empty()) vs.push_back(v);
    return vs;
  };
  auto all_strategies = [&](const std::vector<std::size_t>& vs) {
    std::vector<std::vector<std::size_t>> out{{}};
    for (auto v : vs) {
      std::vector<std::vector<std::size_t>> next;
      for (const auto& s : out)
        for (auto w : g.succ[v]) {
          auto t = s;
          t.push_back(w);
          next.push_back(std::move(t));
        }
      out = std::move(next);
    }
    return out;
  };
  auto ev = choices_of(Player::exists), fv = choices_of(Player::forall);
  auto es = all_strategies(ev), fs = all_strategies(fv);
  auto play_won_by_exists = [&](std::size_t start, const std::vector<std::size_t>& se,
                                const std::vector<std::size_t>& sf) {
    std::vector<std::size_t> move(n, SIZE_MAX);
    for (std::size_t k = 0; k < ev.size(); ++k) move[ev[k]] = se[k];
    for (std::size_t k = 0; k < fv.size(); ++k) move[fv[k]] = sf[k];
    std::vector<std::size_t> seen_at(n, SIZE_MAX);
    std::vector<std::size_t> play;
    std::size_t v = start;
    while (seen_at[v] == SIZE_MAX) {
      if (move[v] == SIZE_MAX) return g.owner[v] == Player::forall;
      seen_at[v] = play.size();
      play.push_back(v);
      v = move[v];
    }
    unsigned m = 0;
    for (std::size_t k = seen_at[v]; k < play.size(); ++k) m = std::max(m, g.priority[play[k]]);
    return m % 2 == 0;
  };
  std::vector<Player> win(n, Player::forall);
  for (std::size_t v = 0; v < n; ++v)
    for (const auto& se : es) {
      bool all = true;
      for (const auto& sf : fs)
        if (!play_won_by_exists(v, se, sf)) {
          all = false;
          break;
        }
      if (all) {
        win[v] = Player::exists;
        break;
      }
    }
  return win;
}

inline oracle::ParityGame random_game(std::mt19937_64& rng, std::size_t max_vertices = 8, unsigned max_priority = 4) {
  oracle::ParityGame g;
  std::size_t n = 1 + rng() % max_vertices;
  for (std::size_t v = 0; v < n; ++v)
    g.add_vertex(rng() % 2 ? oracle::Player::exists : oracle::Player::forall,
                 static_cast<unsigned>(1 + rng() % max_priority));
  for (std::size_t v = 0; v < n; ++v) {
    std::size_t deg = rng() % 3;  // 0 makes a dead end
    for (std::size_t k = 0; k < deg; ++k) {
      auto w = rng() % n;
      if (std::find(g.succ[v].begin(), g.succ[v].end(), w) == g.succ[v].end()) g.add_edge(v, w);
    }
  }
  return g;
}

// ---- finite words -----------------------------------------------------------------------

inline void finite_words_dfs(const ParityWordAutomaton& a, StateId s, std::vector<std::string>& word,
                             std::size_t maxlen, std::set<std::vector<std::string>>& out) {
  if (a.is_final(s)) out.insert(word);
  if (word.size() == maxlen) return;
  for (const auto& t : a.transitions)
    if (t.from == s) {
      word.push_back(a.alphabet[t.letter]);
      finite_words_dfs(a, t.to, word, maxlen, out);
      word.pop_back();
    }
}

inline std::set<std::vector<std::string>> finite_words(const ParityWordAutomaton& a, StateId x, std::size_t maxlen) {
  std::set<std::vector<std::string>> out;
  std::vector<std::string> w;
  finite_words_dfs(a, x, w, maxlen, out);
  return out;
}

inline ParityWordAutomaton random_final_automaton(std::mt19937_64& rng, std::size_t states, std::size_t letters) {
  RandomWordParams p;
  p.states = states;
  p.letters = letters;
  p.final_probability = 0.35;
  return random_word_automaton(p, rng());
}

// ---- the two worked automata ------------------------------------------------------------

/// Cycle of a lasso contains b and no c.
inline bool cycle_b_no_c(const LassoWord& w) {
  bool b = false;
  for (const auto& s : w.cycle) {
    if (s == "c") return false;
    b |= s == "b";
  }
  return b;
}

/// Acceptance of the appendix automaton from x, derived from its transition structure: a
/// run dies on an ac or ca factor or on a leading c; otherwise it is accepted iff the
/// cycle holds a b and no c.
inline bool appendix_language(const LassoWord& w) {
  std::vector<std::string> seq = w.stem;
  for (int k = 0; k < 2; ++k) seq.insert(seq.end(), w.cycle.begin(), w.cycle.end());
  if (!seq.empty() && seq.front() == "c") return false;
  for (std::size_t i = 0; i + 1 < seq.size(); ++i)
    if ((seq[i] == "a" && seq[i + 1] == "c") || (seq[i] == "c" && seq[i + 1] == "a")) return false;
  return cycle_b_no_c(w);
}

}  // namespace support
