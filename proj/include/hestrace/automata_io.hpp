#pragma once

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "hestrace/automata.hpp"
#include "hestrace/error.hpp"
#include "hestrace/text.hpp"

namespace hestrace {

inline constexpr int kSchemaVersion = 1;

enum class AutomatonKind { word_parity, tree_parity, word_det_exc, tree_det_exc };

inline const char* header_of(AutomatonKind k) {
  switch (k) {
    case AutomatonKind::word_parity: return "word-parity";
    case AutomatonKind::tree_parity: return "tree-parity";
    case AutomatonKind::word_det_exc: return "word-det-exc";
    case AutomatonKind::tree_det_exc: return "tree-det-exc";
  }
  return "";
}

inline std::optional<AutomatonKind> kind_from_header(std::string_view h) {
  for (auto k : {AutomatonKind::word_parity, AutomatonKind::tree_parity, AutomatonKind::word_det_exc,
                 AutomatonKind::tree_det_exc})
    if (h == header_of(k)) return k;
  return std::nullopt;
}

inline AutomatonKind kind_of(const Automaton& a) {
  if (std::holds_alternative<ParityWordAutomaton>(a)) return AutomatonKind::word_parity;
  if (std::holds_alternative<ParityTreeAutomaton>(a)) return AutomatonKind::tree_parity;
  return std::get<DeterministicExceptionAutomaton>(a).word ? AutomatonKind::word_det_exc
                                                           : AutomatonKind::tree_det_exc;
}

namespace detail {

// Uniform intermediate form shared by the text and JSON readers.
struct RawAutomaton {
  AutomatonKind kind{};
  std::vector<std::string> states;
  RankedAlphabet alphabet;
  std::map<std::string, unsigned> priorities;
  std::optional<std::vector<std::string>> accepting;
  std::optional<unsigned> priority_range;
  std::vector<std::string> finals;
  struct Trans {
    std::string from, symbol;
    std::vector<std::string> children;
    std::size_t line = 0, column = 0;
  };
  std::vector<Trans> transitions;
};

inline bool is_word_kind(AutomatonKind k) { return k == AutomatonKind::word_parity || k == AutomatonKind::word_det_exc; }

inline Automaton build_automaton(const RawAutomaton& raw) {
  auto fail_at = [](std::size_t line, std::size_t col, const std::string& what) {
    if (line == 0) throw ValidationError(what);
    throw ParseError(line, col, what);
  };
  auto state_id = [&](const std::string& s, std::size_t line, std::size_t col) {
    auto id = index_of(raw.states, s);
    if (!id) fail_at(line, col, "undeclared state " + s);
    return *id;
  };

  std::vector<unsigned> priority(raw.states.size(), 0);
  if (raw.accepting) {
    for (auto& p : priority) p = 1;
    for (const auto& s : *raw.accepting) priority[state_id(s, 0, 0)] = 2;
  }
  for (const auto& [s, p] : raw.priorities) priority[state_id(s, 0, 0)] = p;
  unsigned top = 0;
  for (std::size_t x = 0; x < priority.size(); ++x) {
    if (priority[x] == 0 && !raw.priorities.count(raw.states[x]))
      throw ValidationError("state " + raw.states[x] + " has no priority");
    top = std::max(top, priority[x]);
  }
  unsigned range = raw.priority_range.value_or(even_ceiling(top));

  std::vector<bool> finals;
  if (!raw.finals.empty()) {
    finals.assign(raw.states.size(), false);
    for (const auto& s : raw.finals) finals[state_id(s, 0, 0)] = true;
  }

  auto symbol_id = [&](const RawAutomaton::Trans& t) {
    auto id = raw.alphabet.find(t.symbol);
    if (!id) fail_at(t.line, t.column, "undeclared symbol " + t.symbol);
    return *id;
  };

  Automaton result;
  switch (raw.kind) {
    case AutomatonKind::word_parity: {
      ParityWordAutomaton a;
      a.states = raw.states;
      a.alphabet = raw.alphabet.symbols;
      a.priority = priority;
      a.max_priority = range;
      a.final_flags = finals;
      for (const auto& t : raw.transitions) {
        if (t.children.size() != 1) fail_at(t.line, t.column, "word transitions have exactly one target");
        a.transitions.push_back({state_id(t.from, t.line, t.column), symbol_id(t),
                                 state_id(t.children[0], t.line, t.column)});
      }
      result = normalize(std::move(a));
      break;
    }
    case AutomatonKind::tree_parity: {
      ParityTreeAutomaton a;
      a.states = raw.states;
      a.alphabet = raw.alphabet;
      a.priority = priority;
      a.max_priority = range;
      for (const auto& t : raw.transitions) {
        TreeTransition tr{state_id(t.from, t.line, t.column), symbol_id(t), {}};
        for (const auto& c : t.children) tr.children.push_back(state_id(c, t.line, t.column));
        if (tr.children.size() != a.alphabet.arity[tr.symbol])
          fail_at(t.line, t.column,
                        "arity error: " + t.symbol + " expects " + std::to_string(a.alphabet.arity[tr.symbol]) +
                            " children, got " + std::to_string(tr.children.size()));
        a.transitions.push_back(std::move(tr));
      }
      result = normalize(std::move(a));
      break;
    }
    case AutomatonKind::word_det_exc:
    case AutomatonKind::tree_det_exc: {
      DeterministicExceptionAutomaton a;
      a.word = raw.kind == AutomatonKind::word_det_exc;
      a.states = raw.states;
      a.alphabet = raw.alphabet;
      a.priority = priority;
      a.max_priority = range;
      a.delta.assign(raw.states.size(), std::nullopt);
      for (const auto& t : raw.transitions) {
        TreeTransition tr{state_id(t.from, t.line, t.column), symbol_id(t), {}};
        for (const auto& c : t.children) tr.children.push_back(state_id(c, t.line, t.column));
        if (tr.children.size() != a.alphabet.arity[tr.symbol])
          fail_at(t.line, t.column, "arity error: " + t.symbol + " expects " +
                                              std::to_string(a.alphabet.arity[tr.symbol]) + " children");
        if (a.delta[tr.from]) fail_at(t.line, t.column, "second transition for deterministic state " + t.from);
        a.delta[tr.from] = std::move(tr);
      }
      result = std::move(a);
      break;
    }
  }
  if (auto v = validate(result); !v) throw ValidationError(v.reason);
  return result;
}

inline RawAutomaton read_text(std::string_view src) {
  auto lines = text::significant_lines(src);
  if (lines.empty()) throw ParseError(1, 1, "empty automaton file");
  RawAutomaton raw;
  {
    auto cur = text::cursor_for(lines[0]);
    auto col = cur.column();
    auto header = cur.expect_ident("header");
    auto kind = kind_from_header(header);
    if (!kind) throw ParseError(lines[0].number, col, "unknown header " + header);
    cur.expect_end();
    raw.kind = *kind;
  }
  const bool word = is_word_kind(raw.kind);
  bool have_states = false, have_alphabet = false;

  for (std::size_t li = 1; li < lines.size(); ++li) {
    auto cur = text::cursor_for(lines[li]);
    auto key_col = cur.column();
    auto key = cur.expect_ident("directive");
    cur.expect_punct(":");
    if (key == "alphabet") {
      while (!cur.at_end()) raw.alphabet.add(cur.expect_ident("letter"), 1);
      have_alphabet = true;
    } else if (key == "ranked-alphabet") {
      while (!cur.at_end()) {
        auto s = cur.expect_ident("symbol");
        cur.expect_punct("/");
        raw.alphabet.add(s, cur.expect_number("arity"));
      }
      have_alphabet = true;
    } else if (key == "states") {
      while (!cur.at_end()) raw.states.push_back(cur.expect_ident("state"));
      have_states = true;
    } else if (key == "priorities") {
      while (!cur.at_end()) {
        auto s = cur.expect_ident("state");
        cur.expect_punct(":");
        auto col = cur.column();
        auto p = cur.expect_number("priority");
        if (p == 0) throw ParseError(lines[li].number, col, "priority out of [1,2n]");
        raw.priorities[s] = p;
      }
    } else if (key == "accepting") {
      raw.accepting.emplace();
      while (!cur.at_end()) raw.accepting->push_back(cur.expect_ident("state"));
    } else if (key == "priority-range") {
      auto col = cur.column();
      auto r = cur.expect_number("priority range");
      if (r < 2 || r % 2) throw ParseError(lines[li].number, col, "priority range must be even and >= 2");
      raw.priority_range = r;
      cur.expect_end();
    } else if (key == "final") {
      while (!cur.at_end()) raw.finals.push_back(cur.expect_ident("state"));
    } else if (key == "trans") {
      while (!cur.at_end()) {
        RawAutomaton::Trans t;
        t.line = lines[li].number;
        t.column = cur.column();
        t.from = cur.expect_ident("source state");
        if (word && !cur.peek_punct("->")) {
          t.symbol = cur.expect_ident("letter");
          t.children.push_back(cur.expect_ident("target state"));
        } else {
          cur.expect_punct("->");
          t.symbol = cur.expect_ident("symbol");
          if (cur.accept_punct("(")) {
            if (!cur.accept_punct(")")) {
              do t.children.push_back(cur.expect_ident("child state"));
              while (cur.accept_punct(","));
              cur.expect_punct(")");
            }
          }
        }
        raw.transitions.push_back(std::move(t));
        if (!cur.accept_punct(";")) cur.expect_end();
      }
    } else {
      throw ParseError(lines[li].number, key_col, "unknown directive " + key);
    }
  }
  if (!have_states) throw ParseError(lines.back().number, 1, "missing states: line");
  if (!have_alphabet) throw ParseError(lines.back().number, 1, "missing alphabet line");
  if (word)
    for (auto ar : raw.alphabet.arity)
      if (ar != 1) throw ParseError(lines.back().number, 1, "word automata take a plain alphabet");
  return raw;
}

inline RawAutomaton read_json(const nlohmann::json& j) {
  RawAutomaton raw;
  try {
    auto kind = kind_from_header(j.at("kind").get<std::string>());
    if (!kind) throw ValidationError("unknown automaton kind " + j.at("kind").get<std::string>());
    raw.kind = *kind;
    if (j.contains("alphabet"))
      for (const auto& s : j.at("alphabet")) raw.alphabet.add(s.get<std::string>(), 1);
    if (j.contains("ranked_alphabet"))
      for (const auto& s : j.at("ranked_alphabet"))
        raw.alphabet.add(s.at("symbol").get<std::string>(), s.at("arity").get<unsigned>());
    raw.states = j.at("states").get<std::vector<std::string>>();
    if (j.contains("priorities"))
      for (const auto& [k, v] : j.at("priorities").items()) raw.priorities[k] = v.get<unsigned>();
    if (j.contains("accepting")) raw.accepting = j.at("accepting").get<std::vector<std::string>>();
    if (j.contains("priority_range")) raw.priority_range = j.at("priority_range").get<unsigned>();
    if (j.contains("final")) raw.finals = j.at("final").get<std::vector<std::string>>();
    for (const auto& t : j.value("transitions", nlohmann::json::array())) {
      RawAutomaton::Trans tr;
      tr.from = t.at("from").get<std::string>();
      tr.symbol = t.at("symbol").get<std::string>();
      if (t.contains("to")) tr.children.push_back(t.at("to").get<std::string>());
      if (t.contains("children")) tr.children = t.at("children").get<std::vector<std::string>>();
      raw.transitions.push_back(std::move(tr));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed automaton JSON: ") + e.what());
  }
  return raw;
}

}  // namespace detail

/// Parses the line-based text format, or its JSON mirror when the input starts with '{'.
inline Automaton parse_automaton(std::string_view src) {
  auto body = text::trim(src);
  if (!body.empty() && body.front() == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(1, e.byte, e.what());
    }
    return detail::build_automaton(detail::read_json(j));
  }
  return detail::build_automaton(detail::read_text(src));
}

template <class A>
A parse_as(std::string_view src) {
  auto a = parse_automaton(src);
  if (!std::holds_alternative<A>(a)) throw ValidationError("automaton has the wrong kind for this operation");
  return std::get<A>(std::move(a));
}

namespace detail {

inline std::string join(const std::vector<std::string>& xs, const char* sep = " ") {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? sep : "") + xs[i];
  return out;
}

template <class A>
void write_common_header(std::ostringstream& os, const A& a) {
  os << "states: " << join(a.states) << "\n";
  os << "priorities:";
  for (std::size_t x = 0; x < a.states.size(); ++x) os << " " << a.states[x] << ":" << a.priority[x];
  os << "\n";
  unsigned top = 0;
  for (auto p : a.priority) top = std::max(top, p);
  if (a.max_priority != even_ceiling(top)) os << "priority-range: " << a.max_priority << "\n";
}

inline void write_ranked(std::ostringstream& os, const RankedAlphabet& al) {
  os << "ranked-alphabet:";
  for (std::size_t f = 0; f < al.size(); ++f) os << " " << al.symbols[f] << "/" << al.arity[f];
  os << "\n";
}

inline void write_tree_transition(std::ostringstream& os, const std::vector<std::string>& states,
                                  const RankedAlphabet& al, const TreeTransition& t) {
  os << "trans: " << states[t.from] << " -> " << al.symbols[t.symbol] << "(";
  for (std::size_t k = 0; k < t.children.size(); ++k) os << (k ? "," : "") << states[t.children[k]];
  os << ");\n";
}

}  // namespace detail

inline std::string serialize(const ParityWordAutomaton& a0) {
  auto a = normalize(a0);
  std::ostringstream os;
  os << "word-parity\n";
  os << "alphabet: " << detail::join(a.alphabet) << "\n";
  detail::write_common_header(os, a);
  if (!a.final_flags.empty()) {
    std::vector<std::string> f;
    for (std::size_t x = 0; x < a.states.size(); ++x)
      if (a.final_flags[x]) f.push_back(a.states[x]);
    os << "final: " << detail::join(f) << "\n";
  }
  for (const auto& t : a.transitions)
    os << "trans: " << a.states[t.from] << " " << a.alphabet[t.letter] << " " << a.states[t.to] << ";\n";
  return os.str();
}

inline std::string serialize(const ParityTreeAutomaton& a0) {
  auto a = normalize(a0);
  std::ostringstream os;
  os << "tree-parity\n";
  detail::write_ranked(os, a.alphabet);
  detail::write_common_header(os, a);
  for (const auto& t : a.transitions) detail::write_tree_transition(os, a.states, a.alphabet, t);
  return os.str();
}

inline std::string serialize(const DeterministicExceptionAutomaton& a) {
  std::ostringstream os;
  os << (a.word ? "word-det-exc\n" : "tree-det-exc\n");
  if (a.word)
    os << "alphabet: " << detail::join(a.alphabet.symbols) << "\n";
  else
    detail::write_ranked(os, a.alphabet);
  detail::write_common_header(os, a);
  for (const auto& t : a.delta) {
    if (!t) continue;
    if (a.word)
      os << "trans: " << a.states[t->from] << " " << a.alphabet.symbols[t->symbol] << " " << a.states[t->children[0]]
         << ";\n";
    else
      detail::write_tree_transition(os, a.states, a.alphabet, *t);
  }
  return os.str();
}

inline std::string serialize(const Automaton& a) {
  return std::visit([](const auto& x) { return serialize(x); }, a);
}

namespace detail {

template <class A>
void json_common(nlohmann::json& j, const A& a) {
  j["states"] = a.states;
  nlohmann::json pr = nlohmann::json::object();
  for (std::size_t x = 0; x < a.states.size(); ++x) pr[a.states[x]] = a.priority[x];
  j["priorities"] = pr;
  j["priority_range"] = a.max_priority;
}

inline nlohmann::json json_ranked(const RankedAlphabet& al) {
  auto arr = nlohmann::json::array();
  for (std::size_t f = 0; f < al.size(); ++f) arr.push_back({{"symbol", al.symbols[f]}, {"arity", al.arity[f]}});
  return arr;
}

inline nlohmann::json json_tree_transition(const std::vector<std::string>& states, const RankedAlphabet& al,
                                           const TreeTransition& t) {
  std::vector<std::string> ch;
  for (auto c : t.children) ch.push_back(states[c]);
  return {{"from", states[t.from]}, {"symbol", al.symbols[t.symbol]}, {"children", ch}};
}

}  // namespace detail

inline nlohmann::json to_json(const ParityWordAutomaton& a0) {
  auto a = normalize(a0);
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "word-parity";
  j["alphabet"] = a.alphabet;
  detail::json_common(j, a);
  if (!a.final_flags.empty()) {
    std::vector<std::string> f;
    for (std::size_t x = 0; x < a.states.size(); ++x)
      if (a.final_flags[x]) f.push_back(a.states[x]);
    j["final"] = f;
  }
  auto ts = nlohmann::json::array();
  for (const auto& t : a.transitions)
    ts.push_back({{"from", a.states[t.from]}, {"symbol", a.alphabet[t.letter]}, {"to", a.states[t.to]}});
  j["transitions"] = ts;
  return j;
}

inline nlohmann::json to_json(const ParityTreeAutomaton& a0) {
  auto a = normalize(a0);
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "tree-parity";
  j["ranked_alphabet"] = detail::json_ranked(a.alphabet);
  detail::json_common(j, a);
  auto ts = nlohmann::json::array();
  for (const auto& t : a.transitions) ts.push_back(detail::json_tree_transition(a.states, a.alphabet, t));
  j["transitions"] = ts;
  return j;
}

inline nlohmann::json to_json(const DeterministicExceptionAutomaton& a) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = a.word ? "word-det-exc" : "tree-det-exc";
  if (a.word)
    j["alphabet"] = a.alphabet.symbols;
  else
    j["ranked_alphabet"] = detail::json_ranked(a.alphabet);
  detail::json_common(j, a);
  auto ts = nlohmann::json::array();
  for (const auto& t : a.delta)
    if (t) ts.push_back(detail::json_tree_transition(a.states, a.alphabet, *t));
  j["transitions"] = ts;
  return j;
}

inline nlohmann::json to_json(const Automaton& a) {
  return std::visit([](const auto& x) { return to_json(x); }, a);
}

}  // namespace hestrace
