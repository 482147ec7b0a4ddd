#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include "hestrace/error.hpp"

namespace hestrace {

using StateId = std::size_t;
using SymbolId = std::size_t;

/// Smallest even number >= p (and >= 2): the 2n of a priority assignment.
inline unsigned even_ceiling(unsigned p) { return p <= 2 ? 2 : p + (p & 1u); }

inline std::optional<std::size_t> index_of(const std::vector<std::string>& names, const std::string& name) {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names.begin());
}

struct RankedAlphabet {
  std::vector<std::string> symbols;
  std::vector<unsigned> arity;

  std::size_t size() const noexcept { return symbols.size(); }
  std::optional<SymbolId> find(const std::string& s) const { return index_of(symbols, s); }
  SymbolId add(std::string s, unsigned a) {
    symbols.push_back(std::move(s));
    arity.push_back(a);
    return symbols.size() - 1;
  }
  friend bool operator==(const RankedAlphabet&, const RankedAlphabet&) = default;
};

struct WordTransition {
  StateId from = 0;
  SymbolId letter = 0;
  StateId to = 0;
  friend auto operator<=>(const WordTransition&, const WordTransition&) = default;
};

struct TreeTransition {
  StateId from = 0;
  SymbolId symbol = 0;
  std::vector<StateId> children;
  friend auto operator<=>(const TreeTransition&, const TreeTransition&) = default;
};

/// Nondeterministic word automaton with a priority per state. `final_flags`, when non-empty,
/// marks the states that may terminate a finite trace.
struct ParityWordAutomaton {
  std::vector<std::string> states;
  std::vector<std::string> alphabet;
  std::vector<WordTransition> transitions;
  std::vector<unsigned> priority;
  unsigned max_priority = 2;  ///< the even bound 2n of the priority range [1, 2n]
  std::vector<bool> final_flags;

  std::size_t num_states() const noexcept { return states.size(); }
  bool is_final(StateId x) const { return !final_flags.empty() && final_flags[x]; }
  friend bool operator==(const ParityWordAutomaton&, const ParityWordAutomaton&) = default;
};

/// Büchi word automaton: the two-priority special case with an accepting set.
struct BuchiWordAutomaton {
  std::vector<std::string> states;
  std::vector<std::string> alphabet;
  std::vector<WordTransition> transitions;
  std::vector<bool> accepting;
  std::vector<bool> final_flags;

  std::size_t num_states() const noexcept { return states.size(); }
};

struct ParityTreeAutomaton {
  std::vector<std::string> states;
  RankedAlphabet alphabet;
  std::vector<TreeTransition> transitions;
  std::vector<unsigned> priority;
  unsigned max_priority = 2;

  std::size_t num_states() const noexcept { return states.size(); }
  friend bool operator==(const ParityTreeAutomaton&, const ParityTreeAutomaton&) = default;
};

/// At most one transition per state; a missing transition is the exception.
/// Word automata are the case where every symbol is unary.
struct DeterministicExceptionAutomaton {
  bool word = false;
  std::vector<std::string> states;
  RankedAlphabet alphabet;
  std::vector<std::optional<TreeTransition>> delta;  ///< indexed by state
  std::vector<unsigned> priority;
  unsigned max_priority = 2;

  std::size_t num_states() const noexcept { return states.size(); }
  friend bool operator==(const DeterministicExceptionAutomaton&, const DeterministicExceptionAutomaton&) = default;
};

using Automaton = std::variant<ParityWordAutomaton, ParityTreeAutomaton, DeterministicExceptionAutomaton>;

struct Verdict {
  bool ok = true;
  std::string reason;
  explicit operator bool() const noexcept { return ok; }
  static Verdict pass() { return {}; }
  static Verdict fail(std::string why) { return {false, std::move(why)}; }
};

namespace detail {

inline Verdict check_priorities(const std::vector<std::string>& states, const std::vector<unsigned>& priority,
                                unsigned max_priority) {
  if (max_priority < 2 || max_priority % 2 != 0) return Verdict::fail("priority range bound must be even and >= 2");
  if (priority.size() != states.size()) return Verdict::fail("every state needs a priority");
  for (std::size_t x = 0; x < states.size(); ++x)
    if (priority[x] < 1 || priority[x] > max_priority)
      return Verdict::fail("priority out of [1,2n] at state " + states[x] + ": " + std::to_string(priority[x]));
  return Verdict::pass();
}

inline Verdict check_distinct(const std::vector<std::string>& names, const char* what) {
  for (std::size_t i = 0; i < names.size(); ++i)
    for (std::size_t j = i + 1; j < names.size(); ++j)
      if (names[i] == names[j]) return Verdict::fail(std::string("duplicate ") + what + " " + names[i]);
  return Verdict::pass();
}

}  // namespace detail

inline Verdict validate(const RankedAlphabet& a) {
  if (a.symbols.empty()) return Verdict::fail("alphabet must contain at least one symbol");
  if (a.arity.size() != a.symbols.size()) return Verdict::fail("every symbol needs an arity");
  return detail::check_distinct(a.symbols, "symbol");
}

inline Verdict validate(const ParityWordAutomaton& a) {
  if (a.states.empty()) return Verdict::fail("automaton needs at least one state");
  if (a.alphabet.empty()) return Verdict::fail("alphabet must contain at least one symbol");
  if (auto v = detail::check_distinct(a.states, "state"); !v) return v;
  if (auto v = detail::check_distinct(a.alphabet, "letter"); !v) return v;
  if (auto v = detail::check_priorities(a.states, a.priority, a.max_priority); !v) return v;
  if (!a.final_flags.empty() && a.final_flags.size() != a.states.size())
    return Verdict::fail("final flags must cover every state");
  for (const auto& t : a.transitions)
    if (t.from >= a.states.size() || t.to >= a.states.size() || t.letter >= a.alphabet.size())
      return Verdict::fail("transition references an undeclared state or letter");
  return Verdict::pass();
}

inline Verdict validate(const ParityTreeAutomaton& a) {
  if (a.states.empty()) return Verdict::fail("automaton needs at least one state");
  if (auto v = validate(a.alphabet); !v) return v;
  if (auto v = detail::check_distinct(a.states, "state"); !v) return v;
  if (auto v = detail::check_priorities(a.states, a.priority, a.max_priority); !v) return v;
  for (const auto& t : a.transitions) {
    if (t.from >= a.states.size() || t.symbol >= a.alphabet.size())
      return Verdict::fail("transition references an undeclared state or symbol");
    if (t.children.size() != a.alphabet.arity[t.symbol])
      return Verdict::fail("arity error: " + a.alphabet.symbols[t.symbol] + " expects " +
                           std::to_string(a.alphabet.arity[t.symbol]) + " children, got " +
                           std::to_string(t.children.size()));
    for (auto c : t.children)
      if (c >= a.states.size()) return Verdict::fail("transition references an undeclared state");
  }
  return Verdict::pass();
}

inline Verdict validate(const DeterministicExceptionAutomaton& a) {
  if (a.states.empty()) return Verdict::fail("automaton needs at least one state");
  if (auto v = validate(a.alphabet); !v) return v;
  if (auto v = detail::check_distinct(a.states, "state"); !v) return v;
  if (auto v = detail::check_priorities(a.states, a.priority, a.max_priority); !v) return v;
  if (a.delta.size() != a.states.size()) return Verdict::fail("transition table must cover every state");
  if (a.word)
    for (auto ar : a.alphabet.arity)
      if (ar != 1) return Verdict::fail("word automata need unary letters");
  for (std::size_t x = 0; x < a.delta.size(); ++x) {
    if (!a.delta[x]) continue;
    const auto& t = *a.delta[x];
    if (t.from != x) return Verdict::fail("transition stored under the wrong state");
    if (t.symbol >= a.alphabet.size()) return Verdict::fail("transition references an undeclared symbol");
    if (t.children.size() != a.alphabet.arity[t.symbol])
      return Verdict::fail("arity error: " + a.alphabet.symbols[t.symbol] + " expects " +
                           std::to_string(a.alphabet.arity[t.symbol]) + " children, got " +
                           std::to_string(t.children.size()));
    for (auto c : t.children)
      if (c >= a.states.size()) return Verdict::fail("transition references an undeclared state");
  }
  return Verdict::pass();
}

inline Verdict validate(const Automaton& a) {
  return std::visit([](const auto& x) { return validate(x); }, a);
}

/// Sorted, duplicate-free transition lists. States and symbols keep their declared order.
inline ParityWordAutomaton normalize(ParityWordAutomaton a) {
  std::sort(a.transitions.begin(), a.transitions.end());
  a.transitions.erase(std::unique(a.transitions.begin(), a.transitions.end()), a.transitions.end());
  if (!a.final_flags.empty() && std::none_of(a.final_flags.begin(), a.final_flags.end(), [](bool b) { return b; }))
    a.final_flags.clear();
  return a;
}

inline ParityTreeAutomaton normalize(ParityTreeAutomaton a) {
  std::sort(a.transitions.begin(), a.transitions.end());
  a.transitions.erase(std::unique(a.transitions.begin(), a.transitions.end()), a.transitions.end());
  return a;
}

inline DeterministicExceptionAutomaton normalize(DeterministicExceptionAutomaton a) { return a; }

inline Automaton normalize(Automaton a) {
  return std::visit([](auto x) -> Automaton { return normalize(std::move(x)); }, std::move(a));
}

/// Accepting states get priority 2, the rest priority 1.
inline ParityWordAutomaton buchi_to_parity(const BuchiWordAutomaton& b) {
  ParityWordAutomaton p;
  p.states = b.states;
  p.alphabet = b.alphabet;
  p.transitions = b.transitions;
  p.final_flags = b.final_flags;
  p.max_priority = 2;
  for (std::size_t x = 0; x < b.states.size(); ++x) p.priority.push_back(b.accepting[x] ? 2u : 1u);
  return p;
}

/// Inverse of buchi_to_parity; fails when a priority is outside {1,2}.
inline BuchiWordAutomaton parity_to_buchi(const ParityWordAutomaton& p) {
  if (p.max_priority != 2) throw ValidationError("not a two-priority automaton");
  BuchiWordAutomaton b;
  b.states = p.states;
  b.alphabet = p.alphabet;
  b.transitions = p.transitions;
  b.final_flags = p.final_flags;
  for (auto pr : p.priority) b.accepting.push_back(pr == 2);
  return b;
}

/// Shifts every priority by `delta` (an even delta keeps limsup parity).
inline ParityWordAutomaton shift_priorities(ParityWordAutomaton a, unsigned delta) {
  for (auto& p : a.priority) p += delta;
  a.max_priority += delta;
  return a;
}

inline ParityTreeAutomaton shift_priorities(ParityTreeAutomaton a, unsigned delta) {
  for (auto& p : a.priority) p += delta;
  a.max_priority += delta;
  return a;
}

/// Tree view of a word automaton: each letter becomes a unary symbol.
inline ParityTreeAutomaton as_tree_automaton(const ParityWordAutomaton& w) {
  ParityTreeAutomaton t;
  t.states = w.states;
  for (const auto& l : w.alphabet) t.alphabet.add(l, 1);
  for (const auto& tr : w.transitions) t.transitions.push_back({tr.from, tr.letter, {tr.to}});
  t.priority = w.priority;
  t.max_priority = w.max_priority;
  return t;
}

// Random generation. Counts are exact; callers draw them within their bounds.

struct RandomWordParams {
  std::size_t states = 4;
  std::size_t letters = 2;
  unsigned max_priority = 4;
  double density = 0.5;
  double final_probability = 0.0;  ///< > 0 attaches termination flags
};

struct RandomTreeParams {
  std::size_t states = 3;
  std::size_t symbols = 3;
  unsigned max_arity = 2;
  unsigned max_priority = 4;
  double density = 0.3;
};

struct RandomDetParams {
  bool word = true;
  std::size_t states = 4;
  std::size_t symbols = 2;
  unsigned max_arity = 2;  ///< ignored for words
  unsigned max_priority = 4;
  double exception_probability = 0.15;
};

namespace detail {

inline double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
inline std::size_t below(std::mt19937_64& rng, std::size_t n) { return n == 0 ? 0 : static_cast<std::size_t>(rng() % n); }

inline std::vector<std::string> state_names(std::size_t n) {
  std::vector<std::string> s;
  for (std::size_t i = 0; i < n; ++i) s.push_back("q" + std::to_string(i));
  return s;
}

inline std::vector<std::string> letter_names(std::size_t n) {
  std::vector<std::string> s;
  for (std::size_t i = 0; i < n; ++i)
    s.push_back(i < 26 ? std::string(1, static_cast<char>('a' + i)) : "l" + std::to_string(i));
  return s;
}

inline RankedAlphabet random_ranked_alphabet(std::mt19937_64& rng, std::size_t symbols, unsigned max_arity) {
  RankedAlphabet a;
  for (std::size_t i = 0; i < symbols; ++i) {
    auto ar = static_cast<unsigned>(below(rng, max_arity + 1));
    a.add(std::string(1, static_cast<char>('f' + (i % 20))) + std::to_string(i / 20), ar);
  }
  return a;
}

}  // namespace detail

inline ParityWordAutomaton random_word_automaton(const RandomWordParams& p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ParityWordAutomaton a;
  a.states = detail::state_names(p.states);
  a.alphabet = detail::letter_names(p.letters);
  a.max_priority = even_ceiling(p.max_priority);
  for (std::size_t x = 0; x < p.states; ++x)
    a.priority.push_back(1 + static_cast<unsigned>(detail::below(rng, a.max_priority)));
  for (StateId x = 0; x < p.states; ++x)
    for (SymbolId l = 0; l < p.letters; ++l)
      for (StateId y = 0; y < p.states; ++y)
        if (detail::unit(rng) < p.density) a.transitions.push_back({x, l, y});
  if (p.final_probability > 0)
    for (std::size_t x = 0; x < p.states; ++x) a.final_flags.push_back(detail::unit(rng) < p.final_probability);
  return normalize(std::move(a));
}

inline ParityTreeAutomaton random_tree_automaton(const RandomTreeParams& p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ParityTreeAutomaton a;
  a.states = detail::state_names(p.states);
  a.alphabet = detail::random_ranked_alphabet(rng, p.symbols, p.max_arity);
  a.max_priority = even_ceiling(p.max_priority);
  for (std::size_t x = 0; x < p.states; ++x)
    a.priority.push_back(1 + static_cast<unsigned>(detail::below(rng, a.max_priority)));
  for (StateId x = 0; x < p.states; ++x)
    for (SymbolId f = 0; f < a.alphabet.size(); ++f) {
      const unsigned k = a.alphabet.arity[f];
      std::vector<StateId> tuple(k, 0);
      while (true) {
        if (detail::unit(rng) < p.density) a.transitions.push_back({x, f, tuple});
        std::size_t pos = 0;
        while (pos < k && ++tuple[pos] == p.states) tuple[pos++] = 0;
        if (pos == k) break;
      }
    }
  return normalize(std::move(a));
}

inline DeterministicExceptionAutomaton random_det_automaton(const RandomDetParams& p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  DeterministicExceptionAutomaton a;
  a.word = p.word;
  a.states = detail::state_names(p.states);
  if (p.word) {
    for (const auto& l : detail::letter_names(p.symbols)) a.alphabet.add(l, 1);
  } else {
    a.alphabet = detail::random_ranked_alphabet(rng, p.symbols, p.max_arity);
  }
  a.max_priority = even_ceiling(p.max_priority);
  for (std::size_t x = 0; x < p.states; ++x)
    a.priority.push_back(1 + static_cast<unsigned>(detail::below(rng, a.max_priority)));
  for (StateId x = 0; x < p.states; ++x) {
    if (detail::unit(rng) < p.exception_probability) {
      a.delta.emplace_back(std::nullopt);
      continue;
    }
    TreeTransition t{x, detail::below(rng, a.alphabet.size()), {}};
    for (unsigned k = 0; k < a.alphabet.arity[t.symbol]; ++k) t.children.push_back(detail::below(rng, p.states));
    a.delta.emplace_back(std::move(t));
  }
  return a;
}

}  // namespace hestrace
