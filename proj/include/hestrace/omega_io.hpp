#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include <nlohmann/json.hpp>

#include "hestrace/error.hpp"
#include "hestrace/omega_input.hpp"
#include "hestrace/text.hpp"

namespace hestrace {

namespace detail {

// Letters of a plain lasso half: comma-separated when a comma is present, otherwise one
// letter per (UTF-8) character.
inline std::vector<std::string> split_letters(std::string_view part) {
  std::vector<std::string> out;
  auto body = text::trim(part);
  if (body.empty()) return out;
  if (body.find(',') != std::string::npos) {
    std::size_t start = 0;
    while (true) {
      auto comma = body.find(',', start);
      auto tok = text::trim(std::string_view(body).substr(start, comma == std::string::npos ? std::string::npos
                                                                                           : comma - start));
      if (tok.empty()) throw ParseError(1, start + 1, "empty letter");
      out.push_back(tok);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return out;
  }
  for (std::size_t i = 0; i < body.size();) {
    unsigned char c = static_cast<unsigned char>(body[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    std::size_t len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3 : 4;
    out.push_back(body.substr(i, len));
    i += len;
  }
  return out;
}

inline std::pair<std::string_view, std::string_view> split_lasso(std::string_view s) {
  auto semi = s.find(';');
  if (semi == std::string_view::npos) throw ParseError(1, s.size() + 1, "expected ';' between stem and cycle");
  if (s.find(';', semi + 1) != std::string_view::npos) throw ParseError(1, semi + 2, "more than one ';'");
  return {s.substr(0, semi), s.substr(semi + 1)};
}

inline std::vector<DecoratedLetter> parse_decorated_part(std::string_view part, std::size_t offset) {
  std::vector<DecoratedLetter> out;
  auto body = text::trim(part);
  if (body.empty()) return out;
  std::size_t start = 0;
  while (true) {
    auto comma = body.find(',', start);
    auto item = std::string_view(body).substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    auto colon = item.rfind(':');
    if (colon == std::string_view::npos)
      throw ParseError(1, offset + start + 1, "expected symbol:priority");
    auto sym = text::trim(item.substr(0, colon));
    auto pr = text::trim(item.substr(colon + 1));
    if (sym.empty()) throw ParseError(1, offset + start + 1, "empty symbol");
    if (pr.empty() || !std::all_of(pr.begin(), pr.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
      throw ParseError(1, offset + start + colon + 2, "expected a priority");
    auto value = std::stoul(pr);
    if (value == 0) throw ParseError(1, offset + start + colon + 2, "priority must be >= 1");
    out.push_back({sym, static_cast<unsigned>(value)});
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace detail

/// "u;v", e.g. "b;ab" for b(ab)^omega.
inline LassoWord parse_lasso(std::string_view s) {
  auto [u, v] = detail::split_lasso(s);
  LassoWord l{detail::split_letters(u), detail::split_letters(v)};
  if (l.cycle.empty()) throw ParseError(1, s.size() + 1, "lasso cycle must be nonempty");
  return l;
}

/// "b:1;a:2,b:1".
inline DecoratedLassoWord parse_decorated_lasso(std::string_view s) {
  auto [u, v] = detail::split_lasso(s);
  DecoratedLassoWord l{detail::parse_decorated_part(u, 0), detail::parse_decorated_part(v, u.size() + 1)};
  if (l.cycle.empty()) throw ParseError(1, s.size() + 1, "lasso cycle must be nonempty");
  return l;
}

inline std::string to_text(const LassoWord& l) {
  bool compact = true;
  for (const auto* part : {&l.stem, &l.cycle})
    for (const auto& s : *part)
      if (detail::split_letters(s).size() != 1 || s.find(',') != std::string::npos) compact = false;
  auto render = [&](const std::vector<std::string>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) out += (compact || i == 0 ? "" : ",") + xs[i];
    return out;
  };
  return render(l.stem) + ";" + render(l.cycle);
}

inline std::string to_text(const DecoratedLassoWord& l) {
  auto render = [](const std::vector<DecoratedLetter>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i)
      out += (i ? "," : "") + xs[i].symbol + ":" + std::to_string(xs[i].priority);
    return out;
  };
  return render(l.stem) + ";" + render(l.cycle);
}

inline nlohmann::json to_json(const DecoratedLassoWord& l) {
  auto part = [](const std::vector<DecoratedLetter>& xs) {
    auto a = nlohmann::json::array();
    for (const auto& x : xs) a.push_back({{"symbol", x.symbol}, {"priority", x.priority}});
    return a;
  };
  return {{"stem", part(l.stem)}, {"cycle", part(l.cycle)}};
}

inline nlohmann::json to_json(const LassoWord& l) { return {{"stem", l.stem}, {"cycle", l.cycle}}; }

// Node-graph files:
//   regular-tree | decorated-tree
//   root: n0
//   node n0 = f(n0, n1);
//   node n1 = c;
// Decorated labels carry a priority: node n0 = f:2(n0, n1);

namespace detail {

template <class Label>
RegularTreeT<Label> read_tree(std::string_view src, bool decorated) {
  auto lines = text::significant_lines(src);
  if (lines.empty()) throw ParseError(1, 1, "empty tree file");
  {
    auto cur = text::cursor_for(lines[0]);
    auto col = cur.column();
    auto header = cur.expect_ident("header");
    const char* want = decorated ? "decorated-tree" : "regular-tree";
    if (header != want) throw ParseError(lines[0].number, col, std::string("expected header ") + want);
    cur.expect_end();
  }
  struct Raw {
    std::string name;
    Label label;
    std::vector<std::string> children;
    std::size_t line, column;
  };
  std::vector<Raw> raw;
  std::string root;
  std::size_t root_line = 0, root_col = 0;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    auto cur = text::cursor_for(lines[li]);
    auto col = cur.column();
    auto key = cur.expect_ident("'root' or 'node'");
    if (key == "root") {
      cur.expect_punct(":");
      root_line = lines[li].number;
      root_col = cur.column();
      root = cur.expect_ident("root node");
      cur.expect_end();
      continue;
    }
    if (key != "node") throw ParseError(lines[li].number, col, "unknown directive " + key);
    while (true) {
      Raw r;
      r.line = lines[li].number;
      r.column = cur.column();
      r.name = cur.expect_ident("node name");
      cur.expect_punct("=");
      auto sym = cur.expect_ident("symbol");
      if constexpr (std::is_same_v<Label, DecoratedLetter>) {
        cur.expect_punct(":");
        auto pcol = cur.column();
        auto p = cur.expect_number("priority");
        if (p == 0) throw ParseError(lines[li].number, pcol, "priority must be >= 1");
        r.label = DecoratedLetter{sym, p};
      } else {
        r.label = sym;
      }
      if (cur.accept_punct("(")) {
        if (!cur.accept_punct(")")) {
          do r.children.push_back(cur.expect_ident("child node"));
          while (cur.accept_punct(","));
          cur.expect_punct(")");
        }
      }
      raw.push_back(std::move(r));
      if (!cur.accept_punct(";")) {
        cur.expect_end();
        break;
      }
      if (cur.at_end()) break;
      if (cur.peek().text == "node") cur.expect_ident("node");
    }
  }
  if (root.empty()) throw ParseError(lines.back().number, 1, "missing root: line");
  RegularTreeT<Label> t;
  std::map<std::string, std::size_t> ids;
  for (const auto& r : raw) {
    if (!ids.emplace(r.name, t.nodes.size()).second) throw ParseError(r.line, r.column, "duplicate node " + r.name);
    t.nodes.push_back({r.label, {}});
    t.names.push_back(r.name);
  }
  for (std::size_t k = 0; k < raw.size(); ++k)
    for (const auto& c : raw[k].children) {
      auto it = ids.find(c);
      if (it == ids.end()) throw ParseError(raw[k].line, raw[k].column, "undeclared node " + c);
      t.nodes[k].children.push_back(it->second);
    }
  auto it = ids.find(root);
  if (it == ids.end()) throw ParseError(root_line, root_col, "undeclared root " + root);
  t.root = it->second;
  if (auto v = validate_tree(t); !v) throw ValidationError(v.reason);
  return t;
}

inline std::string label_text(const std::string& s) { return s; }
inline std::string label_text(const DecoratedLetter& d) { return d.symbol + ":" + std::to_string(d.priority); }

}  // namespace detail

inline RegularTree parse_regular_tree(std::string_view src) { return detail::read_tree<std::string>(src, false); }
inline DecoratedRegularTree parse_decorated_tree(std::string_view src) {
  return detail::read_tree<DecoratedLetter>(src, true);
}

template <class Label>
std::string to_text(const RegularTreeT<Label>& t) {
  std::ostringstream os;
  os << (std::is_same_v<Label, DecoratedLetter> ? "decorated-tree\n" : "regular-tree\n");
  os << "root: " << t.name(t.root) << "\n";
  for (std::size_t n = 0; n < t.size(); ++n) {
    os << "node " << t.name(n) << " = " << detail::label_text(t.nodes[n].label);
    if (!t.nodes[n].children.empty()) {
      os << "(";
      for (std::size_t k = 0; k < t.nodes[n].children.size(); ++k)
        os << (k ? ", " : "") << t.name(t.nodes[n].children[k]);
      os << ")";
    }
    os << ";\n";
  }
  return os.str();
}

template <class Label>
nlohmann::json to_json(const RegularTreeT<Label>& t) {
  auto nodes = nlohmann::json::array();
  for (std::size_t n = 0; n < t.size(); ++n) {
    nlohmann::json node;
    node["name"] = t.name(n);
    node["symbol"] = symbol_of(t.nodes[n].label);
    if constexpr (std::is_same_v<Label, DecoratedLetter>) node["priority"] = t.nodes[n].label.priority;
    std::vector<std::string> ch;
    for (auto c : t.nodes[n].children) ch.push_back(t.name(c));
    node["children"] = ch;
    nodes.push_back(node);
  }
  return {{"root", t.name(t.root)}, {"nodes", nodes}};
}

}  // namespace hestrace
