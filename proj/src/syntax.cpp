#include "aara/syntax.hpp"

#include <algorithm>
#include <sstream>

namespace aara {

TypePtr BaseType::unit() {
  static const TypePtr u = std::make_shared<BaseType>(BaseType{Kind::Unit, nullptr, nullptr});
  return u;
}
TypePtr BaseType::sum(TypePtr a, TypePtr b) {
  return std::make_shared<BaseType>(BaseType{Kind::Sum, std::move(a), std::move(b)});
}
TypePtr BaseType::prod(TypePtr a, TypePtr b) {
  return std::make_shared<BaseType>(BaseType{Kind::Prod, std::move(a), std::move(b)});
}
TypePtr BaseType::list(TypePtr elem) {
  return std::make_shared<BaseType>(BaseType{Kind::List, std::move(elem), nullptr});
}

bool type_equal(const BaseType& a, const BaseType& b) {
  if (&a == &b) return true;
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case BaseType::Kind::Unit: return true;
    case BaseType::Kind::List: return type_equal(*a.left, *b.left);
    default: return type_equal(*a.left, *b.left) && type_equal(*a.right, *b.right);
  }
}

namespace {
// precedence: 0 = sum, 1 = product, 2 = atom
void print_type(std::ostream& os, const BaseType& t, int ctx) {
  switch (t.kind) {
    case BaseType::Kind::Unit: os << "unit"; return;
    case BaseType::Kind::List:
      os << "L(";
      print_type(os, *t.left, 0);
      os << ")";
      return;
    case BaseType::Kind::Sum:
      if (ctx > 0) os << "(";
      print_type(os, *t.left, 1);
      os << " + ";
      print_type(os, *t.right, 0);
      if (ctx > 0) os << ")";
      return;
    case BaseType::Kind::Prod:
      if (ctx > 1) os << "(";
      print_type(os, *t.left, 2);
      os << " * ";
      print_type(os, *t.right, 1);
      if (ctx > 1) os << ")";
      return;
  }
}
}  // namespace

std::string to_string(const BaseType& t) {
  std::ostringstream os;
  print_type(os, t, 0);
  return os.str();
}

int list_nesting_depth(const BaseType& t) {
  switch (t.kind) {
    case BaseType::Kind::Unit: return 0;
    case BaseType::Kind::List: return 1 + list_nesting_depth(*t.left);
    default: return std::max(list_nesting_depth(*t.left), list_nesting_depth(*t.right));
  }
}

bool contains_list(const BaseType& t) { return list_nesting_depth(t) > 0; }

bool type_equal(const SimpleType& a, const SimpleType& b) {
  if (a.is_arrow() != b.is_arrow()) return false;
  if (!type_equal(*a.dom, *b.dom)) return false;
  return !a.is_arrow() || type_equal(*a.cod, *b.cod);
}

std::string to_string(const SimpleType& t) {
  if (!t.is_arrow()) return to_string(*t.dom);
  auto side = [](const BaseType& b) {
    std::string s = to_string(b);
    return b.kind == BaseType::Kind::Sum || b.kind == BaseType::Kind::Prod ? "(" + s + ")" : s;
  };
  return side(*t.dom) + " -> " + side(*t.cod);
}

namespace ast {
namespace {
std::shared_ptr<Expr> mk(Expr::Kind k, Span s) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->span = s;
  return e;
}
}  // namespace

using K = Expr::Kind;

ExprPtr var(std::string x, Span s) {
  auto e = mk(K::Var, s);
  e->x = std::move(x);
  return e;
}
ExprPtr triv(Span s) { return mk(K::Triv, s); }
ExprPtr inl(std::string x, Span s) {
  auto e = mk(K::Inl, s);
  e->x = std::move(x);
  return e;
}
ExprPtr inr(std::string x, Span s) {
  auto e = mk(K::Inr, s);
  e->x = std::move(x);
  return e;
}
ExprPtr case_sum(std::string x, std::string yl, ExprPtr el, std::string yr, ExprPtr er, Span s) {
  auto e = mk(K::CaseSum, s);
  e->x = std::move(x);
  e->y1 = std::move(yl);
  e->e1 = std::move(el);
  e->y2 = std::move(yr);
  e->e2 = std::move(er);
  return e;
}
ExprPtr pair(std::string a, std::string b, Span s) {
  auto e = mk(K::Pair, s);
  e->x = std::move(a);
  e->y = std::move(b);
  return e;
}
ExprPtr case_pair(std::string x, std::string a, std::string b, ExprPtr body, Span s) {
  auto e = mk(K::CasePair, s);
  e->x = std::move(x);
  e->y1 = std::move(a);
  e->y2 = std::move(b);
  e->e1 = std::move(body);
  return e;
}
ExprPtr nil(Span s) { return mk(K::Nil, s); }
ExprPtr cons(std::string h, std::string t, Span s) {
  auto e = mk(K::Cons, s);
  e->x = std::move(h);
  e->y = std::move(t);
  return e;
}
ExprPtr case_list(std::string x, ExprPtr enil, std::string h, std::string t, ExprPtr econs, Span s) {
  auto e = mk(K::CaseList, s);
  e->x = std::move(x);
  e->e1 = std::move(enil);
  e->y1 = std::move(h);
  e->y2 = std::move(t);
  e->e2 = std::move(econs);
  return e;
}
ExprPtr fun(std::string f, std::string param, ExprPtr body, Span s) {
  auto e = mk(K::Fun, s);
  e->f = std::move(f);
  e->y1 = std::move(param);
  e->e1 = std::move(body);
  return e;
}
ExprPtr app(std::string f, std::string x, Span s) {
  auto e = mk(K::App, s);
  e->f = std::move(f);
  e->x = std::move(x);
  return e;
}
ExprPtr tick(Rational q, Span s) {
  auto e = mk(K::Tick, s);
  e->amount = std::move(q);
  return e;
}
ExprPtr let(std::string x, ExprPtr e1, ExprPtr e2, Span s) {
  auto e = mk(K::Let, s);
  e->y1 = std::move(x);
  e->e1 = std::move(e1);
  e->e2 = std::move(e2);
  return e;
}
ExprPtr share(std::string x, std::string a, std::string b, ExprPtr body, Span s) {
  auto e = mk(K::Share, s);
  e->x = std::move(x);
  e->y1 = std::move(a);
  e->y2 = std::move(b);
  e->e1 = std::move(body);
  return e;
}
ExprPtr lambda(std::string param, TypePtr type, ExprPtr body, Span s) {
  auto e = mk(K::Lambda, s);
  e->y1 = std::move(param);
  e->type = std::move(type);
  e->e1 = std::move(body);
  return e;
}
ExprPtr rec(std::string x, ExprPtr enil, std::string y, std::string ys, std::string z, ExprPtr estep, Span s) {
  auto e = mk(K::Rec, s);
  e->x = std::move(x);
  e->e1 = std::move(enil);
  e->y1 = std::move(y);
  e->y2 = std::move(ys);
  e->y3 = std::move(z);
  e->e2 = std::move(estep);
  return e;
}
ExprPtr error(Span s) { return mk(K::Error, s); }
}  // namespace ast

bool expr_equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  if (a.x != b.x || a.y != b.y || a.f != b.f || a.y1 != b.y1 || a.y2 != b.y2 || a.y3 != b.y3) return false;
  if (a.amount != b.amount) return false;
  if ((a.type == nullptr) != (b.type == nullptr)) return false;
  if (a.type && !type_equal(*a.type, *b.type)) return false;
  if ((a.e1 == nullptr) != (b.e1 == nullptr) || (a.e2 == nullptr) != (b.e2 == nullptr)) return false;
  if (a.e1 && !expr_equal(*a.e1, *b.e1)) return false;
  if (a.e2 && !expr_equal(*a.e2, *b.e2)) return false;
  return true;
}

namespace {

class Printer {
 public:
  std::ostringstream os;

  void nl(int ind) {
    os << "\n";
    for (int i = 0; i < ind; ++i) os << "  ";
  }

  void print(const Expr& e, int ind) {
    using K = Expr::Kind;
    switch (e.kind) {
      case K::Var: os << e.x; return;
      case K::Triv: os << "<>"; return;
      case K::Inl: os << "inl " << e.x; return;
      case K::Inr: os << "inr " << e.x; return;
      case K::Pair: os << "<" << e.x << ", " << e.y << ">"; return;
      case K::Nil: os << "[]"; return;
      case K::Cons: os << e.x << " :: " << e.y; return;
      case K::App: os << e.f << " " << e.x; return;
      case K::Tick: os << "tick " << to_string(e.amount); return;
      case K::Error: os << "error"; return;
      case K::CaseSum:
        os << "case " << e.x << " {";
        nl(ind + 1);
        os << "inl " << e.y1 << " -> ";
        print(*e.e1, ind + 2);
        nl(ind + 1);
        os << "| inr " << e.y2 << " -> ";
        print(*e.e2, ind + 2);
        nl(ind);
        os << "}";
        return;
      case K::CasePair:
        os << "case " << e.x << " { <" << e.y1 << ", " << e.y2 << "> -> ";
        print(*e.e1, ind + 1);
        os << " }";
        return;
      case K::CaseList:
        os << "case " << e.x << " {";
        nl(ind + 1);
        os << "[] -> ";
        print(*e.e1, ind + 2);
        nl(ind + 1);
        os << "| " << e.y1 << " :: " << e.y2 << " -> ";
        print(*e.e2, ind + 2);
        nl(ind);
        os << "}";
        return;
      case K::Rec:
        os << "rec " << e.x << " {";
        nl(ind + 1);
        os << "[] -> ";
        print(*e.e1, ind + 2);
        nl(ind + 1);
        os << "| (" << e.y1 << " :: " << e.y2 << ") with " << e.y3 << " -> ";
        print(*e.e2, ind + 2);
        nl(ind);
        os << "}";
        return;
      case K::Fun:
        os << "(fun " << e.f << " " << e.y1 << " =";
        nl(ind + 1);
        print(*e.e1, ind + 1);
        os << ")";
        return;
      case K::Lambda:
        os << "(lambda (" << e.y1 << " : " << to_string(*e.type) << ").";
        nl(ind + 1);
        print(*e.e1, ind + 1);
        os << ")";
        return;
      case K::Let:
        os << "let " << e.y1 << " = ";
        print(*e.e1, ind + 1);
        os << " in";
        nl(ind);
        print(*e.e2, ind);
        return;
      case K::Share:
        os << "share " << e.x << " as " << e.y1 << ", " << e.y2 << " in";
        nl(ind);
        print(*e.e1, ind);
        return;
    }
  }
};

void add_unique(std::vector<std::string>& out, const std::string& v) {
  if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
}

void collect_fv(const Expr& e, std::vector<std::string>& bound, std::vector<std::string>& out) {
  using K = Expr::Kind;
  auto use = [&](const std::string& v) {
    if (std::find(bound.begin(), bound.end(), v) == bound.end()) add_unique(out, v);
  };
  auto under = [&](const Expr& body, std::initializer_list<const std::string*> names) {
    std::size_t n = bound.size();
    for (auto* s : names) bound.push_back(*s);
    collect_fv(body, bound, out);
    bound.resize(n);
  };
  switch (e.kind) {
    case K::Var:
    case K::Inl:
    case K::Inr: use(e.x); return;
    case K::Pair:
    case K::Cons:
      use(e.x);
      use(e.y);
      return;
    case K::App:
      use(e.f);
      use(e.x);
      return;
    case K::Triv:
    case K::Nil:
    case K::Tick:
    case K::Error: return;
    case K::CaseSum:
      use(e.x);
      under(*e.e1, {&e.y1});
      under(*e.e2, {&e.y2});
      return;
    case K::CasePair:
      use(e.x);
      under(*e.e1, {&e.y1, &e.y2});
      return;
    case K::CaseList:
      use(e.x);
      collect_fv(*e.e1, bound, out);
      under(*e.e2, {&e.y1, &e.y2});
      return;
    case K::Fun: under(*e.e1, {&e.f, &e.y1}); return;
    case K::Lambda: under(*e.e1, {&e.y1}); return;
    case K::Let:
      collect_fv(*e.e1, bound, out);
      under(*e.e2, {&e.y1});
      return;
    case K::Share:
      use(e.x);
      under(*e.e1, {&e.y1, &e.y2});
      return;
    case K::Rec:
      use(e.x);
      collect_fv(*e.e1, bound, out);
      under(*e.e2, {&e.y1, &e.y2, &e.y3});
      return;
  }
}

}  // namespace

std::string pretty(const Expr& e) {
  Printer p;
  p.print(e, 0);
  return p.os.str();
}

std::vector<std::string> free_vars(const Expr& e) {
  std::vector<std::string> bound, out;
  collect_fv(e, bound, out);
  return out;
}

const Definition* Program::find(const std::string& name) const {
  for (const auto& d : defs)
    if (d.name == name) return &d;
  return nullptr;
}

ExprPtr Program::to_expr() const {
  ExprPtr body = main;
  if (!body) {
    if (defs.empty()) throw std::invalid_argument("empty program");
    body = ast::var(defs.back().name);
  }
  for (auto it = defs.rbegin(); it != defs.rend(); ++it) body = ast::let(it->name, it->fn, body);
  return body;
}

std::string pretty(const Program& p) {
  std::ostringstream os;
  for (const auto& d : p.defs) {
    const Expr& fn = *d.fn;
    if (fn.kind == Expr::Kind::Fun) {
      os << "fun " << d.name << " " << fn.y1 << " =\n  ";
      Printer pr;
      pr.print(*fn.e1, 1);
      os << pr.os.str() << "\n\n";
    } else {
      os << "def " << d.name << " =\n  ";
      Printer pr;
      pr.print(fn, 1);
      os << pr.os.str() << "\n\n";
    }
  }
  if (p.main) {
    os << "main";
    for (const auto& [n, t] : p.params) os << " (" << n << " : " << to_string(*t) << ")";
    os << " =\n  ";
    Printer pr;
    pr.print(*p.main, 1);
    os << pr.os.str() << "\n";
  }
  return os.str();
}

}  // namespace aara
