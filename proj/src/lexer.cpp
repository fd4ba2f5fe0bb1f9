#include "lexer.hpp"

#include <array>
#include <cctype>

namespace aara::detail {

namespace {
constexpr std::array<std::string_view, 25> kKeywords = {
    "let", "in", "share", "as", "case", "rec", "with", "fun", "def", "main", "lambda", "fn",
    "if", "then", "else", "inl", "inr", "tick", "error", "true", "false", "unit", "bool", "L", "_"};

bool ident_start(unsigned char c) { return std::isalpha(c) || c == '_'; }
bool ident_char(unsigned char c) { return std::isalnum(c) || c == '_' || c == '\''; }
}  // namespace

bool is_keyword(std::string_view s) {
  for (auto k : kKeywords)
    if (k == s) return true;
  return false;
}

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    unsigned char c = src[i];
    if (std::isspace(c)) {
      advance(1);
      continue;
    }
    Span sp{line, col};
    if (src.substr(i, 2) == "(*") {
      int depth = 0;
      while (i < src.size()) {
        if (src.substr(i, 2) == "(*") {
          ++depth;
          advance(2);
        } else if (src.substr(i, 2) == "*)") {
          --depth;
          advance(2);
          if (depth == 0) break;
        } else {
          advance(1);
        }
      }
      if (depth != 0) throw ParseError("unterminated comment", sp);
      continue;
    }
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      out.push_back({Token::Kind::Ident, std::string(src.substr(i, j - i)), sp});
      advance(j - i);
      continue;
    }
    if (std::isdigit(c)) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j + 1 < src.size() && (src[j] == '.' || src[j] == '/') &&
          std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      out.push_back({Token::Kind::Number, std::string(src.substr(i, j - i)), sp});
      advance(j - i);
      continue;
    }
    // UTF-8 lambda
    if (src.substr(i, 2) == "\xCE\xBB") {
      out.push_back({Token::Kind::Sym, "\\", sp});
      advance(2);
      continue;
    }
    static constexpr std::array<std::string_view, 4> kTwo = {"::", "->", ";;", "[]"};
    bool matched = false;
    for (auto t : kTwo) {
      if (src.substr(i, t.size()) == t) {
        out.push_back({Token::Kind::Sym, std::string(t), sp});
        advance(t.size());
        matched = true;
        break;
      }
    }
    if (matched) continue;
    static constexpr std::string_view kOne = "<>,(){}[]|=:.*+-\\;^";
    if (kOne.find(static_cast<char>(c)) != std::string_view::npos) {
      out.push_back({Token::Kind::Sym, std::string(1, static_cast<char>(c)), sp});
      advance(1);
      continue;
    }
    throw ParseError(std::string("unexpected character '") + static_cast<char>(c) + "'", sp);
  }
  out.push_back({Token::Kind::End, "", Span{line, col}});
  return out;
}

std::string TokenStream::ident() {
  const Token& t = peek();
  if (t.kind != Token::Kind::Ident || (is_keyword(t.text) && t.text != "_")) fail("expected identifier");
  return next().text;
}

void TokenStream::fail(const std::string& msg) const {
  const Token& t = peek();
  std::string found = t.kind == Token::Kind::End ? "end of input" : "'" + t.text + "'";
  throw ParseError(msg + ", found " + found, t.span);
}

namespace {
TypePtr parse_sum(TokenStream& ts);

TypePtr parse_atom_type(TokenStream& ts) {
  if (ts.accept("unit")) return BaseType::unit();
  if (ts.accept("bool")) return BaseType::sum(BaseType::unit(), BaseType::unit());
  if (ts.accept("L")) {
    ts.expect("(");
    auto e = parse_sum(ts);
    ts.expect(")");
    return BaseType::list(e);
  }
  if (ts.accept("(")) {
    auto t = parse_sum(ts);
    ts.expect(")");
    return t;
  }
  ts.fail("expected a type");
}

TypePtr parse_prod(TokenStream& ts) {
  auto a = parse_atom_type(ts);
  if (ts.accept("*")) return BaseType::prod(a, parse_prod(ts));
  return a;
}

TypePtr parse_sum(TokenStream& ts) {
  auto a = parse_prod(ts);
  if (ts.accept("+")) return BaseType::sum(a, parse_sum(ts));
  return a;
}
}  // namespace

TypePtr parse_type(TokenStream& ts) { return parse_sum(ts); }

}  // namespace aara::detail
