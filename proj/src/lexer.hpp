#pragma once

#include "aara/syntax.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace aara::detail {

struct Token {
  enum class Kind { Ident, Number, Sym, End };
  Kind kind;
  std::string text;
  Span span;
};

std::vector<Token> lex(std::string_view src);

class TokenStream {
 public:
  explicit TokenStream(std::vector<Token> toks) : toks_(std::move(toks)) {}

  const Token& peek(std::size_t k = 0) const {
    std::size_t i = std::min(pos_ + k, toks_.size() - 1);
    return toks_[i];
  }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool at_end() const { return peek().kind == Token::Kind::End; }
  bool is(std::string_view s, std::size_t k = 0) const {
    const Token& t = peek(k);
    return (t.kind == Token::Kind::Sym || t.kind == Token::Kind::Ident) && t.text == s;
  }
  bool accept(std::string_view s) {
    if (!is(s)) return false;
    next();
    return true;
  }
  const Token& expect(std::string_view s) {
    if (!is(s)) fail("expected '" + std::string(s) + "'");
    return next();
  }
  std::string ident();
  [[noreturn]] void fail(const std::string& msg) const;

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

bool is_keyword(std::string_view s);

TypePtr parse_type(TokenStream& ts);

}  // namespace aara::detail
