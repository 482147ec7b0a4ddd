#pragma once

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "hestrace/error.hpp"

namespace hestrace::text {

enum class TokenKind { ident, punct, end };

struct Token {
  TokenKind kind = TokenKind::end;
  std::string text;
  std::size_t line = 0;
  std::size_t column = 0;
};

inline bool is_ident_byte(unsigned char ch) { return std::isalnum(ch) || ch == '_' || ch == '\'' || ch >= 0x80; }

/// Splits one line into identifiers and punctuation. `#` starts a comment.
/// Recognized punctuation: -> : ; , ( ) / = { } | &. UTF-8 bytes and inner '-' count as identifier bytes.
inline std::vector<Token> tokenize_line(std::string_view line, std::size_t line_no) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    unsigned char ch = static_cast<unsigned char>(line[i]);
    if (ch == '#') break;
    if (std::isspace(ch)) {
      ++i;
      continue;
    }
    if (ch == '-' && i + 1 < line.size() && line[i + 1] == '>') {
      out.push_back({TokenKind::punct, "->", line_no, i + 1});
      i += 2;
      continue;
    }
    if (std::string_view(":;,()/={}|&").find(static_cast<char>(ch)) != std::string_view::npos) {
      out.push_back({TokenKind::punct, std::string(1, static_cast<char>(ch)), line_no, i + 1});
      ++i;
      continue;
    }
    if (is_ident_byte(ch) || ch == '-') {
      // '-' joins identifiers (priority-range) unless it starts an arrow
      auto ident_at = [&](std::size_t j) {
        unsigned char c = static_cast<unsigned char>(line[j]);
        return is_ident_byte(c) || (c == '-' && !(j + 1 < line.size() && line[j + 1] == '>'));
      };
      std::size_t j = i;
      while (j < line.size() && ident_at(j)) ++j;
      out.push_back({TokenKind::ident, std::string(line.substr(i, j - i)), line_no, i + 1});
      i = j;
      continue;
    }
    throw ParseError(line_no, i + 1, std::string("unexpected character '") + static_cast<char>(ch) + "'");
  }
  return out;
}

/// Cursor over the tokens of one line.
class LineCursor {
public:
  LineCursor(std::vector<Token> tokens, std::size_t line_no, std::size_t line_len)
      : tokens_(std::move(tokens)), line_(line_no), eol_column_(line_len + 1) {}

  bool at_end() const { return pos_ >= tokens_.size(); }
  const Token& peek() const {
    static const Token end_token{};
    return at_end() ? end_token : tokens_[pos_];
  }
  bool peek_punct(std::string_view p) const { return !at_end() && peek().kind == TokenKind::punct && peek().text == p; }

  std::size_t column() const { return at_end() ? eol_column_ : peek().column; }
  std::size_t line() const { return line_; }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(line_, column(), what); }

  std::string expect_ident(const char* what) {
    if (at_end() || peek().kind != TokenKind::ident) fail(std::string("expected ") + what);
    return tokens_[pos_++].text;
  }
  void expect_punct(std::string_view p) {
    if (!peek_punct(p)) fail("expected '" + std::string(p) + "'");
    ++pos_;
  }
  bool accept_punct(std::string_view p) {
    if (!peek_punct(p)) return false;
    ++pos_;
    return true;
  }
  unsigned expect_number(const char* what) {
    std::size_t col = column();
    auto s = expect_ident(what);
    for (char c : s)
      if (!std::isdigit(static_cast<unsigned char>(c))) throw ParseError(line_, col, std::string("expected ") + what);
    try {
      return static_cast<unsigned>(std::stoul(s));
    } catch (const std::exception&) {
      throw ParseError(line_, col, std::string(what) + " out of range");
    }
  }
  void expect_end() {
    if (!at_end()) fail("unexpected '" + peek().text + "'");
  }

private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::size_t line_;
  std::size_t eol_column_;
};

struct SourceLine {
  std::size_t number;
  std::string_view content;
};

/// Non-blank, non-comment lines with their 1-based numbers.
inline std::vector<SourceLine> significant_lines(std::string_view src) {
  std::vector<SourceLine> out;
  std::size_t line_no = 1, start = 0;
  while (start <= src.size()) {
    auto nl = src.find('\n', start);
    auto end = nl == std::string_view::npos ? src.size() : nl;
    auto line = src.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::size_t k = 0;
    while (k < line.size() && std::isspace(static_cast<unsigned char>(line[k]))) ++k;
    if (k < line.size() && line[k] != '#') out.push_back({line_no, line});
    if (nl == std::string_view::npos) break;
    start = nl + 1;
    ++line_no;
  }
  return out;
}

inline LineCursor cursor_for(const SourceLine& l) {
  return LineCursor(tokenize_line(l.content, l.number), l.number, l.content.size());
}

inline std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

}  // namespace hestrace::text
