#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "hestrace/bitset.hpp"
#include "hestrace/error.hpp"
#include "hestrace/hes.hpp"
#include "hestrace/lattice.hpp"
#include "hestrace/text.hpp"

// Standalone equation systems over one powerset lattice:
//
//   ground: p q r
//   u1 =mu u2 | {p}
//   u2 =nu u1 & (u2 | {q, r})
//
// Equations are listed innermost first. `|` (or ∪) binds weaker than `&` (or ∩). Atoms are
// declared variables, ground-element sets `{p, q}` and parenthesized expressions.

namespace hestrace {

struct TextHes {
  std::vector<std::string> ground;
  HierEqSystem<PowersetLattice> system;

  std::string format(const BitSet& s) const {
    std::string out = "{";
    bool first = true;
    s.for_each_set([&](std::size_t i) {
      out += (first ? "" : ", ") + ground[i];
      first = false;
    });
    return out + "}";
  }
};

namespace detail {

struct SetExpr {
  enum class Kind { var, literal, join, meet } kind = Kind::literal;
  std::size_t var = 0;
  BitSet literal;
  std::unique_ptr<SetExpr> lhs, rhs;

  BitSet eval(std::span<const BitSet> env) const {
    switch (kind) {
      case Kind::var: return env[var];
      case Kind::literal: return literal;
      case Kind::join: return lhs->eval(env) | rhs->eval(env);
      case Kind::meet: return lhs->eval(env) & rhs->eval(env);
    }
    return literal;
  }
};

class SetExprParser {
public:
  SetExprParser(text::LineCursor& cur, const std::map<std::string, std::size_t>& vars,
                const std::vector<std::string>& ground)
      : cur_(cur), vars_(vars), ground_(ground) {}

  std::unique_ptr<SetExpr> expr() {
    auto e = term();
    while (cur_.accept_punct("|")) e = binary(SetExpr::Kind::join, std::move(e), term());
    return e;
  }

private:
  static std::unique_ptr<SetExpr> binary(SetExpr::Kind k, std::unique_ptr<SetExpr> a, std::unique_ptr<SetExpr> b) {
    auto e = std::make_unique<SetExpr>();
    e->kind = k;
    e->lhs = std::move(a);
    e->rhs = std::move(b);
    return e;
  }

  std::unique_ptr<SetExpr> term() {
    auto e = atom();
    while (cur_.accept_punct("&")) e = binary(SetExpr::Kind::meet, std::move(e), atom());
    return e;
  }

  std::unique_ptr<SetExpr> atom() {
    if (cur_.accept_punct("(")) {
      auto e = expr();
      cur_.expect_punct(")");
      return e;
    }
    auto e = std::make_unique<SetExpr>();
    if (cur_.accept_punct("{")) {
      e->literal = BitSet(ground_.size());
      if (!cur_.accept_punct("}")) {
        do {
          auto col = cur_.column();
          auto name = cur_.expect_ident("ground element");
          auto idx = position_of(ground_, name);
          if (!idx) throw ParseError(cur_.line(), col, "undeclared ground element " + name);
          e->literal.set(*idx);
        } while (cur_.accept_punct(","));
        cur_.expect_punct("}");
      }
      return e;
    }
    auto col = cur_.column();
    auto name = cur_.expect_ident("variable, '{' or '('");
    auto it = vars_.find(name);
    if (it == vars_.end()) throw ParseError(cur_.line(), col, "undeclared variable " + name);
    e->kind = SetExpr::Kind::var;
    e->var = it->second;
    return e;
  }

  static std::optional<std::size_t> position_of(const std::vector<std::string>& xs, std::string_view s) {
    for (std::size_t i = 0; i < xs.size(); ++i)
      if (xs[i] == s) return i;
    return std::nullopt;
  }

  text::LineCursor& cur_;
  const std::map<std::string, std::size_t>& vars_;
  const std::vector<std::string>& ground_;
};

// ∪ and ∩ become their ASCII forms; padding keeps byte columns stable.
inline std::string ascii_operators(std::string_view line) {
  std::string s(line);
  for (auto [from, to] : {std::pair<const char*, const char*>{"∪", "|  "}, {"∩", "&  "}}) {
    for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos)) s.replace(pos, 3, to);
  }
  return s;
}

}  // namespace detail

inline TextHes parse_hes(std::string_view src) {
  auto lines = text::significant_lines(src);
  if (lines.empty()) throw ParseError(1, 1, "empty equation system");
  TextHes out;
  std::map<std::string, std::size_t> vars;
  std::vector<std::string> owned;
  owned.reserve(lines.size());
  for (const auto& l : lines) owned.push_back(detail::ascii_operators(l.content));

  // First pass: the ground line and the variable names, so bodies may refer forward.
  bool have_ground = false;
  std::vector<std::size_t> equation_lines;
  for (std::size_t k = 0; k < lines.size(); ++k) {
    text::LineCursor cur(text::tokenize_line(owned[k], lines[k].number), lines[k].number, owned[k].size());
    auto col = cur.column();
    auto head = cur.expect_ident("'ground:' or an equation");
    if (head == "ground" && cur.peek_punct(":")) {
      if (have_ground) throw ParseError(lines[k].number, col, "duplicate ground line");
      cur.expect_punct(":");
      while (!cur.at_end()) {
        auto c = cur.column();
        auto g = cur.expect_ident("ground element");
        for (const auto& e : out.ground)
          if (e == g) throw ParseError(lines[k].number, c, "duplicate ground element " + g);
        out.ground.push_back(g);
        cur.accept_punct(",");
      }
      have_ground = true;
      continue;
    }
    if (!vars.emplace(head, vars.size()).second) throw ParseError(lines[k].number, col, "duplicate variable " + head);
    equation_lines.push_back(k);
  }
  if (!have_ground) throw ParseError(lines.front().number, 1, "missing 'ground:' line");
  if (equation_lines.empty()) throw ParseError(lines.back().number, 1, "no equations");

  PowersetLattice lat(out.ground.size());
  for (auto k : equation_lines) {
    text::LineCursor cur(text::tokenize_line(owned[k], lines[k].number), lines[k].number, owned[k].size());
    auto name = cur.expect_ident("variable");
    cur.expect_punct("=");
    auto col = cur.column();
    auto sign_text = cur.expect_ident("'mu' or 'nu'");
    if (sign_text != "mu" && sign_text != "nu") throw ParseError(lines[k].number, col, "expected 'mu' or 'nu'");
    std::shared_ptr<detail::SetExpr> body = detail::SetExprParser(cur, vars, out.ground).expr();
    cur.expect_end();
    out.system.add(name, lat, sign_text == "mu" ? Sign::mu : Sign::nu,
                   [body](std::span<const BitSet> env) { return body->eval(env); });
  }
  return out;
}

inline nlohmann::json solution_json(const TextHes& h, const Solution<PowersetLattice>& s) {
  nlohmann::json vals = nlohmann::json::object();
  auto iters = nlohmann::json::array();
  for (std::size_t k = 0; k < h.system.size(); ++k) {
    std::vector<std::string> members;
    s.values[k].for_each_set([&](std::size_t i) { members.push_back(h.ground[i]); });
    vals[h.system.equation(k).variable] = members;
    iters.push_back({{"variable", h.system.equation(k).variable},
                     {"inner_solves", s.stats[k].inner_solves},
                     {"body_evaluations", s.stats[k].body_evaluations}});
  }
  return {{"schema_version", 1}, {"solution", vals}, {"iterations", iters}};
}

}  // namespace hestrace
