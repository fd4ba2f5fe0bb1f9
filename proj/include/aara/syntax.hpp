#pragma once

#include "aara/rational.hpp"

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace aara {

struct BaseType;
using TypePtr = std::shared_ptr<const BaseType>;

struct BaseType {
  enum class Kind { Unit, Sum, Prod, List };
  Kind kind;
  TypePtr left;   // Sum/Prod first component, List element
  TypePtr right;  // Sum/Prod second component

  static TypePtr unit();
  static TypePtr sum(TypePtr a, TypePtr b);
  static TypePtr prod(TypePtr a, TypePtr b);
  static TypePtr list(TypePtr elem);

  bool is_list() const { return kind == Kind::List; }
  const TypePtr& elem() const { return left; }
};

bool type_equal(const BaseType& a, const BaseType& b);
inline bool type_equal(const TypePtr& a, const TypePtr& b) { return type_equal(*a, *b); }
std::string to_string(const BaseType& t);
inline std::string to_string(const TypePtr& t) { return to_string(*t); }
int list_nesting_depth(const BaseType& t);
bool contains_list(const BaseType& t);

struct SimpleType {
  TypePtr dom;  // the base type itself when not an arrow
  TypePtr cod;  // null for base types

  static SimpleType base(TypePtr b) { return {std::move(b), nullptr}; }
  static SimpleType arrow(TypePtr d, TypePtr c) { return {std::move(d), std::move(c)}; }
  bool is_arrow() const { return cod != nullptr; }
};

bool type_equal(const SimpleType& a, const SimpleType& b);
std::string to_string(const SimpleType& t);

struct Span {
  int line = 0;
  int col = 0;
};

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(const std::string& msg, Span at)
      : std::runtime_error(at.line > 0 ? std::to_string(at.line) + ":" + std::to_string(at.col) + ": " + msg
                                       : msg),
        span(at) {}
  Span span;
};

class ParseError : public SyntaxError {
 public:
  using SyntaxError::SyntaxError;
};

class LetNormalError : public ParseError {
 public:
  using ParseError::ParseError;
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Field usage per kind:
//   Var x | Inl x | Inr x | Pair x y | Cons x y | App f x | Tick amount
//   CaseSum x {inl y1 -> e1 | inr y2 -> e2}
//   CasePair x {<y1, y2> -> e1}
//   CaseList x {[] -> e1 | y1 :: y2 -> e2}
//   Fun f y1 = e1           Lambda (y1 : type). e1
//   Let y1 = e1 in e2       Share x as y1, y2 in e1
//   Rec x {[] -> e1 | (y1 :: y2) with y3 -> e2}
struct Expr {
  enum class Kind {
    Var, Triv, Inl, Inr, CaseSum, Pair, CasePair, Nil, Cons, CaseList,
    Fun, App, Tick, Let, Share, Lambda, Rec, Error
  };
  Kind kind;
  std::string x, y, f;
  std::string y1, y2, y3;
  ExprPtr e1, e2;
  Rational amount;
  TypePtr type;
  Span span;
  // Source names of curried parameters, used when rendering bounds.
  std::vector<std::string> param_names;
};

namespace ast {
ExprPtr var(std::string x, Span s = {});
ExprPtr triv(Span s = {});
ExprPtr inl(std::string x, Span s = {});
ExprPtr inr(std::string x, Span s = {});
ExprPtr case_sum(std::string x, std::string yl, ExprPtr el, std::string yr, ExprPtr er, Span s = {});
ExprPtr pair(std::string a, std::string b, Span s = {});
ExprPtr case_pair(std::string x, std::string a, std::string b, ExprPtr body, Span s = {});
ExprPtr nil(Span s = {});
ExprPtr cons(std::string h, std::string t, Span s = {});
ExprPtr case_list(std::string x, ExprPtr enil, std::string h, std::string t, ExprPtr econs, Span s = {});
ExprPtr fun(std::string f, std::string param, ExprPtr body, Span s = {});
ExprPtr app(std::string f, std::string x, Span s = {});
ExprPtr tick(Rational q, Span s = {});
ExprPtr let(std::string x, ExprPtr e1, ExprPtr e2, Span s = {});
ExprPtr share(std::string x, std::string a, std::string b, ExprPtr body, Span s = {});
ExprPtr lambda(std::string param, TypePtr type, ExprPtr body, Span s = {});
ExprPtr rec(std::string x, ExprPtr enil, std::string y, std::string ys, std::string z, ExprPtr estep,
            Span s = {});
ExprPtr error(Span s = {});
}  // namespace ast

bool expr_equal(const Expr& a, const Expr& b);
std::string pretty(const Expr& e);
inline std::string pretty(const ExprPtr& e) { return pretty(*e); }

// Free variables in first-occurrence order.
std::vector<std::string> free_vars(const Expr& e);

struct Definition {
  std::string name;
  ExprPtr fn;  // Fun or Lambda
};

struct Program {
  std::vector<Definition> defs;
  std::vector<std::pair<std::string, TypePtr>> params;  // main's inputs
  ExprPtr main;                                          // null: the last definition is the entry

  const Definition* find(const std::string& name) const;
  // let f1 = d1 in ... in main (or the entry function variable).
  ExprPtr to_expr() const;
};

std::string pretty(const Program& p);

}  // namespace aara
