#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "hestrace/automata.hpp"
#include "hestrace/automata_io.hpp"
#include "hestrace/error.hpp"
#include "hestrace/hes.hpp"
#include "hestrace/lattice.hpp"
#include "hestrace/omega_input.hpp"
#include "hestrace/omega_io.hpp"
#include "hestrace/oracle.hpp"
#include "hestrace/phi.hpp"

// Trace semantics evaluated on finite generators. Every query restricts the variables of the
// trace equation system to maps X_i -> P(positions of the input) and solves the result.

namespace hestrace {

enum class TraceMode { ordinary, decorated };

struct TraceOptions {
  SolveOptions solve{};
  /// Mutation hook: solve every equation with the opposite sign.
  bool flip_signs = false;
};

struct RestrictedHes {
  HierEqSystem<PointwisePowersetLattice> system;
  StateLayout layout;
  std::size_t positions = 0;
  TraceMode mode = TraceMode::ordinary;

  /// Is position p in the value of x's variable under `values`?
  bool contains(const std::vector<BitSet>& values, StateId x, std::size_t p) const {
    return values[layout.equation_of[x]].test(layout.local_index[x] * positions + p);
  }
};

using Witness = std::variant<DecoratedLassoWord, DecoratedRegularTree>;

struct MembershipVerdict {
  bool member = false;
  std::optional<Witness> witness;
  std::vector<EquationStats> stats;
  std::size_t memo_hits = 0;
};

namespace detail {

inline void require_valid(const Verdict& v) {
  if (!v) throw ValidationError(v.reason);
}

inline CPart c_part(const ParityWordAutomaton& a) {
  CPart c;
  c.moves.resize(a.num_states());
  c.priorities = a.priority;
  for (const auto& t : a.transitions) c.moves[t.from].push_back({t.letter, {t.to}});
  return c;
}

inline CPart c_part(const ParityTreeAutomaton& a) {
  CPart c;
  c.moves.resize(a.num_states());
  c.priorities = a.priority;
  for (const auto& t : a.transitions) c.moves[t.from].push_back({t.symbol, t.children});
  return c;
}

inline std::size_t letter_id(const std::vector<std::string>& alphabet, const std::string& s) {
  auto id = index_of(alphabet, s);
  if (!id) throw AlphabetMismatch("letter " + s + " is not in the automaton's alphabet");
  return *id;
}

template <class T>
SigmaPart sigma_part(const Lasso<T>& w, const std::vector<std::string>& alphabet) {
  if (w.cycle.empty()) throw ValidationError("lasso cycle must be nonempty");
  SigmaPart s;
  for (std::size_t p = 0; p < w.length(); ++p) {
    s.steps.push_back({letter_id(alphabet, symbol_of(w.at(p))), {w.successor(p)}});
    if constexpr (std::is_same_v<T, DecoratedLetter>) s.decorations.push_back(w.at(p).priority);
  }
  return s;
}

template <class Label>
SigmaPart sigma_part(const RegularTreeT<Label>& t, const RankedAlphabet& alphabet) {
  require_valid(validate_tree(t));
  if (auto v = check_arities(t, alphabet); !v) throw AlphabetMismatch(v.reason);
  SigmaPart s;
  for (const auto& n : t.nodes) {
    s.steps.push_back({*alphabet.find(symbol_of(n.label)), n.children});
    if constexpr (std::is_same_v<Label, DecoratedLetter>) s.decorations.push_back(n.label.priority);
  }
  return s;
}

inline RestrictedHes assemble(const CPart& c, const SigmaPart& sigma, unsigned max_priority, TraceMode mode,
                              bool flip_signs) {
  RestrictedHes r;
  r.positions = sigma.positions();
  r.mode = mode;
  r.layout = StateLayout::by_priority(c.priorities, max_priority);
  for (std::size_t i = 0; i < max_priority; ++i) {
    Sign s = mode == TraceMode::decorated ? Sign::nu : (i % 2 == 0 ? Sign::mu : Sign::nu);
    if (flip_signs) s = flipped(s);
    PointwisePowersetLattice lat(r.layout.states_of[i].size(), PowersetLattice(r.positions));
    r.system.add("u" + std::to_string(i + 1), lat, s, make_phi_body(c, sigma, r.layout, i));
  }
  return r;
}

inline MembershipVerdict answer(const RestrictedHes& r, StateId x, std::size_t position, const SolveOptions& opts) {
  auto sol = solve(r.system, opts);
  return {r.contains(sol.values, x, position), std::nullopt, std::move(sol.stats), sol.memo_hits};
}

inline void require_state(std::size_t states, StateId x) {
  if (x >= states) throw ValidationError("state out of range");
}

}  // namespace detail

/// Ordinary mode: 2n equations, mu for odd index and nu for even index. Decorated mode: all
/// nu, and a move only counts when its source and target priorities match the decorations.
inline RestrictedHes build_restricted_hes(const ParityWordAutomaton& aut, const LassoWord& w,
                                          const TraceOptions& opts = {}) {
  detail::require_valid(validate(aut));
  return detail::assemble(detail::c_part(aut), detail::sigma_part(w, aut.alphabet), aut.max_priority,
                          TraceMode::ordinary, opts.flip_signs);
}

inline RestrictedHes build_restricted_hes(const ParityWordAutomaton& aut, const DecoratedLassoWord& w,
                                          const TraceOptions& opts = {}) {
  detail::require_valid(validate(aut));
  return detail::assemble(detail::c_part(aut), detail::sigma_part(w, aut.alphabet), aut.max_priority,
                          TraceMode::decorated, opts.flip_signs);
}

inline RestrictedHes build_restricted_hes(const ParityTreeAutomaton& aut, const RegularTree& t,
                                          const TraceOptions& opts = {}) {
  detail::require_valid(validate(aut));
  return detail::assemble(detail::c_part(aut), detail::sigma_part(t, aut.alphabet), aut.max_priority,
                          TraceMode::ordinary, opts.flip_signs);
}

inline RestrictedHes build_restricted_hes(const ParityTreeAutomaton& aut, const DecoratedRegularTree& t,
                                          const TraceOptions& opts = {}) {
  detail::require_valid(validate(aut));
  return detail::assemble(detail::c_part(aut), detail::sigma_part(t, aut.alphabet), aut.max_priority,
                          TraceMode::decorated, opts.flip_signs);
}

/// Some run from x over w has an even limsup of priorities.
inline MembershipVerdict parity_trace_membership(const ParityWordAutomaton& aut, StateId x, const LassoWord& w,
                                                 const TraceOptions& opts = {}) {
  detail::require_state(aut.num_states(), x);
  return detail::answer(build_restricted_hes(aut, w, opts), x, 0, opts.solve);
}

/// Some run from x over w visits accepting states infinitely often.
inline MembershipVerdict buchi_trace_membership(const BuchiWordAutomaton& aut, StateId x, const LassoWord& w,
                                                const TraceOptions& opts = {}) {
  return parity_trace_membership(buchi_to_parity(aut), x, w, opts);
}

namespace detail {

template <class Input>
void check_decorated_input(const Input& xi, unsigned state_priority, unsigned max_priority) {
  if (grade(xi) != state_priority)
    throw GradeMismatch("grade " + std::to_string(grade(xi)) + " differs from the state's priority " +
                        std::to_string(state_priority));
  if (auto v = check_decorated_invariant(xi, state_priority, max_priority); !v)
    throw ValidationError("decorated input violates its invariant: " + v.reason);
}

}  // namespace detail

/// A run from x over flatten(xi) whose priorities are exactly xi's decorations.
inline MembershipVerdict decorated_trace_membership(const ParityWordAutomaton& aut, StateId x,
                                                    const DecoratedLassoWord& xi, const TraceOptions& opts = {}) {
  detail::require_state(aut.num_states(), x);
  detail::check_decorated_input(xi, aut.priority[x], aut.max_priority);
  auto v = detail::answer(build_restricted_hes(aut, xi, opts), x, 0, opts.solve);
  if (v.member) v.witness = xi;
  return v;
}

inline MembershipVerdict decorated_trace_membership(const ParityTreeAutomaton& aut, StateId x,
                                                    const DecoratedRegularTree& xi, const TraceOptions& opts = {}) {
  detail::require_state(aut.num_states(), x);
  detail::check_decorated_input(xi, aut.priority[x], aut.max_priority);
  auto v = detail::answer(build_restricted_hes(aut, xi, opts), x, xi.root, opts.solve);
  if (v.member) v.witness = xi;
  return v;
}

/// The unfolding of t is accepted from x: some run tree has an even limsup on every branch.
inline MembershipVerdict tree_language_membership(const ParityTreeAutomaton& aut, StateId x, const RegularTree& t,
                                                  const TraceOptions& opts = {}) {
  detail::require_state(aut.num_states(), x);
  return detail::answer(build_restricted_hes(aut, t, opts), x, t.root, opts.solve);
}

// Finite and infinitary traces use the functor {tick} + A x (-): the tick is encoded as one
// extra nullary symbol after the letters.

namespace detail {

inline CPart tick_c_part(const ParityWordAutomaton& a) {
  auto c = c_part(a);
  for (StateId x = 0; x < a.num_states(); ++x)
    if (a.is_final(x)) c.moves[x].push_back({a.alphabet.size(), {}});
  return c;
}

inline std::set<std::vector<std::string>> decode(const BitSet& image, const std::vector<std::vector<std::string>>& words) {
  std::set<std::vector<std::string>> out;
  image.for_each_set([&](std::size_t k) { out.insert(words[k]); });
  return out;
}

}  // namespace detail

/// Is the finite word accepted from x, i.e. read along a run ending in a terminating state?
inline bool finite_trace_membership(const ParityWordAutomaton& aut, StateId x, const std::vector<std::string>& word,
                                    const TraceOptions& opts = {}) {
  detail::require_valid(validate(aut));
  detail::require_state(aut.num_states(), x);
  // Positions are the suffixes word[p..]; the last one is the empty word.
  SigmaPart sigma;
  for (std::size_t p = 0; p < word.size(); ++p) sigma.steps.push_back({detail::letter_id(aut.alphabet, word[p]), {p + 1}});
  sigma.steps.push_back({aut.alphabet.size(), {}});
  auto layout = StateLayout::single_block(aut.num_states());
  HierEqSystem<PointwisePowersetLattice> hes;
  hes.add("u", PointwisePowersetLattice(aut.num_states(), PowersetLattice(sigma.positions())),
          opts.flip_signs ? Sign::nu : Sign::mu, make_phi_body(detail::tick_c_part(aut), sigma, layout, 0));
  auto sol = solve(hes, opts.solve);
  return sol.values[0].test(x * sigma.positions());
}

/// All accepted finite words of length <= maxlen, as the least fixpoint over X -> P(A^{<=maxlen}).
inline std::set<std::vector<std::string>> finite_trace_enum(const ParityWordAutomaton& aut, StateId x,
                                                            std::size_t maxlen, const TraceOptions& opts = {}) {
  detail::require_valid(validate(aut));
  detail::require_state(aut.num_states(), x);
  if (maxlen > oracle::kMaxFiniteTraceLength) throw Error("maximum finite trace length exceeds cap");
  const std::size_t letters = aut.alphabet.size();
  std::vector<std::vector<std::string>> words{{}};
  SigmaPart sigma;
  sigma.steps.push_back({letters, {}});
  std::size_t layer_begin = 0, layer_end = 1;
  for (std::size_t len = 1; len <= maxlen; ++len) {
    for (std::size_t t = layer_begin; t < layer_end; ++t)
      for (std::size_t a = 0; a < letters; ++a) {
        if (words.size() * aut.num_states() >= kMaxPowersetGround)
          throw LatticeTooLarge("finite trace lattice exceeds " + std::to_string(kMaxPowersetGround) + " bits");
        std::vector<std::string> w{aut.alphabet[a]};
        w.insert(w.end(), words[t].begin(), words[t].end());
        words.push_back(std::move(w));
        sigma.steps.push_back({a, {t}});
      }
    layer_begin = layer_end;
    layer_end = words.size();
  }
  auto layout = StateLayout::single_block(aut.num_states());
  PointwisePowersetLattice lat(aut.num_states(), PowersetLattice(words.size()));
  HierEqSystem<PointwisePowersetLattice> hes;
  hes.add("u", lat, opts.flip_signs ? Sign::nu : Sign::mu, make_phi_body(detail::tick_c_part(aut), sigma, layout, 0));
  auto sol = solve(hes, opts.solve);
  return detail::decode(lat.image(sol.values[0], x), words);
}

/// Some infinite run over w exists from x; acceptance is ignored.
inline bool infinitary_trace_membership(const ParityWordAutomaton& aut, StateId x, const LassoWord& w,
                                        const TraceOptions& opts = {}) {
  detail::require_valid(validate(aut));
  detail::require_state(aut.num_states(), x);
  auto sigma = detail::sigma_part(w, aut.alphabet);
  auto layout = StateLayout::single_block(aut.num_states());
  HierEqSystem<PointwisePowersetLattice> hes;
  hes.add("u", PointwisePowersetLattice(aut.num_states(), PowersetLattice(sigma.positions())),
          opts.flip_signs ? Sign::mu : Sign::nu, make_phi_body(detail::c_part(aut), sigma, layout, 0));
  auto sol = solve(hes, opts.solve);
  return sol.values[0].test(x * sigma.positions());
}

/// Decorated behavior of a deterministic automaton with exceptions: the decoration of its
/// unique run, or bottom.
struct DetBehavior {
  std::optional<Witness> value;  ///< empty means bottom
  std::string reason;            ///< why the result is bottom

  bool bottom() const noexcept { return !value.has_value(); }
};

inline DetBehavior det_exception_behavior(const DeterministicExceptionAutomaton& aut, StateId x) {
  detail::require_valid(validate(aut));
  detail::require_state(aut.num_states(), x);
  const auto& sym = aut.alphabet.symbols;
  if (aut.word) {
    std::vector<StateId> run;
    std::vector<std::size_t> first_seen(aut.num_states(), SIZE_MAX);
    StateId cur = x;
    while (first_seen[cur] == SIZE_MAX) {
      if (!aut.delta[cur]) return {std::nullopt, "exception at state " + aut.states[cur]};
      first_seen[cur] = run.size();
      run.push_back(cur);
      cur = aut.delta[cur]->children.at(0);
    }
    DecoratedLassoWord d;
    for (std::size_t k = 0; k < run.size(); ++k) {
      DecoratedLetter l{sym[aut.delta[run[k]]->symbol], aut.priority[run[k]]};
      (k < first_seen[cur] ? d.stem : d.cycle).push_back(std::move(l));
    }
    if (auto v = check_decorated_invariant(d, aut.priority[x]); !v) return {std::nullopt, v.reason};
    return {Witness{std::move(d)}, {}};
  }
  // Tree case: the reachable states form the run generator, one node per state.
  std::vector<std::size_t> node_of(aut.num_states(), SIZE_MAX);
  std::vector<StateId> order{x};
  node_of[x] = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& t = aut.delta[order[k]];
    if (!t) return {std::nullopt, "exception at state " + aut.states[order[k]]};
    for (auto c : t->children)
      if (node_of[c] == SIZE_MAX) {
        node_of[c] = order.size();
        order.push_back(c);
      }
  }
  DecoratedRegularTree d;
  for (auto s : order) {
    DecoratedRegularTree::Node n{{sym[aut.delta[s]->symbol], aut.priority[s]}, {}};
    for (auto c : aut.delta[s]->children) n.children.push_back(node_of[c]);
    d.nodes.push_back(std::move(n));
    d.names.push_back(aut.states[s]);
  }
  if (auto v = check_decorated_invariant(d, aut.priority[x]); !v) return {std::nullopt, v.reason};
  return {Witness{std::move(d)}, {}};
}

/// Both sides of the flattening theorem at membership level for one (automaton, state, input).
struct FlatteningVerdict {
  bool left = false;   ///< ordinary trace membership
  bool right = false;  ///< a decorated witness exists, flattens to the input, and is a member
  std::optional<Witness> witness;
  std::string note;    ///< which check rejected the candidate witness, if any

  bool agree() const noexcept { return left == right; }
};

inline FlatteningVerdict flattening_theorem_check(const ParityWordAutomaton& aut, StateId x, const LassoWord& w,
                                                  const TraceOptions& opts = {}) {
  FlatteningVerdict v;
  v.left = parity_trace_membership(aut, x, w, opts).member;
  auto run = oracle::lasso_acceptance(aut, x, w);
  if (!run.accepted) return v;
  auto xi = decorate_run(*run.run, aut.priority);
  if (auto inv = check_decorated_invariant(xi, aut.priority[x], aut.max_priority); !inv) {
    v.note = "witness invariant: " + inv.reason;
    return v;
  }
  if (!same_sequence(flatten_word(xi), w)) {
    v.note = "witness does not flatten to the input";
    return v;
  }
  if (!decorated_trace_membership(aut, x, xi, opts).member) {
    v.note = "witness is not a decorated trace";
    return v;
  }
  v.right = true;
  v.witness = std::move(xi);
  return v;
}

inline FlatteningVerdict flattening_theorem_check(const ParityTreeAutomaton& aut, StateId x, const RegularTree& t,
                                                  const TraceOptions& opts = {}) {
  FlatteningVerdict v;
  v.left = tree_language_membership(aut, x, t, opts).member;
  auto run = oracle::tree_membership_oracle(aut, x, t);
  if (!run.accepted) return v;
  auto xi = decorate_run(*run.run, aut.priority);
  if (auto inv = check_decorated_invariant(xi, aut.priority[x], aut.max_priority); !inv) {
    v.note = "witness invariant: " + inv.reason;
    return v;
  }
  if (!same_unfolding(delst(xi), t)) {
    v.note = "witness does not flatten to the input";
    return v;
  }
  if (!decorated_trace_membership(aut, x, xi, opts).member) {
    v.note = "witness is not a decorated trace";
    return v;
  }
  v.right = true;
  v.witness = std::move(xi);
  return v;
}

// JSON verdict records.

inline nlohmann::json to_json(const Witness& w) {
  return std::visit([](const auto& x) { return to_json(x); }, w);
}

inline nlohmann::json to_json(const MembershipVerdict& v) {
  nlohmann::json j{{"schema_version", kSchemaVersion}, {"verdict", v.member}};
  j["witness"] = v.witness ? to_json(*v.witness) : nlohmann::json(nullptr);
  auto eqs = nlohmann::json::array();
  for (const auto& s : v.stats)
    eqs.push_back({{"inner_solves", s.inner_solves},
                   {"body_evaluations", s.body_evaluations},
                   {"longest_chain", s.longest_chain}});
  j["iterations"] = eqs;
  j["memo_hits"] = v.memo_hits;
  return j;
}

inline nlohmann::json to_json(const FlatteningVerdict& v) {
  nlohmann::json j{{"schema_version", kSchemaVersion}, {"agree", v.agree()}, {"left", v.left}, {"right", v.right}};
  j["witness"] = v.witness ? to_json(*v.witness) : nlohmann::json(nullptr);
  if (!v.note.empty()) j["note"] = v.note;
  return j;
}

inline nlohmann::json to_json(const DetBehavior& b) {
  nlohmann::json j{{"schema_version", kSchemaVersion}, {"bottom", b.bottom()}};
  j["value"] = b.value ? to_json(*b.value) : nlohmann::json(nullptr);
  if (b.bottom()) j["reason"] = b.reason;
  return j;
}

}  // namespace hestrace
