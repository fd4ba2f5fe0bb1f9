#include "aara/parser.hpp"

#include "lexer.hpp"

#include <set>

namespace aara {

using detail::Token;
using detail::TokenStream;

namespace {

class Parser {
 public:
  Parser(std::string_view src, std::set<std::string> reserved)
      : ts_(detail::lex(src)), used_(std::move(reserved)) {}

  ExprPtr expression_only() {
    auto e = expr();
    if (!ts_.at_end()) ts_.fail("expected end of input");
    return e;
  }

  Program program() {
    Program p;
    while (!ts_.at_end()) {
      if (ts_.accept(";;")) continue;
      if (ts_.is("fun")) {
        Span sp = ts_.next().span;
        std::string src = ts_.ident();
        std::string name = bind(src);
        auto fn = fun_rest(name, sp);
        p.defs.push_back({name, fn});
      } else if (ts_.accept("def")) {
        std::string src = ts_.ident();
        ts_.expect("=");
        auto fn = expr();
        if (fn->kind != Expr::Kind::Fun && fn->kind != Expr::Kind::Lambda)
          throw ParseError("'def' expects a function", fn->span);
        p.defs.push_back({bind(src), fn});
      } else if (ts_.accept("main")) {
        while (ts_.accept("(")) {
          std::string src = ts_.ident();
          ts_.expect(":");
          auto t = detail::parse_type(ts_);
          ts_.expect(")");
          p.params.emplace_back(bind(src), t);
        }
        ts_.expect("=");
        p.main = expr();
        while (ts_.accept(";;")) {
        }
        if (!ts_.at_end()) ts_.fail("expected end of input after main");
      } else if (p.defs.empty() && !p.main) {
        p.main = expr();
        if (!ts_.at_end()) ts_.fail("expected end of input");
      } else {
        ts_.fail("expected 'fun', 'def' or 'main'");
      }
    }
    if (p.defs.empty() && !p.main) throw ParseError("empty program", {1, 1});
    return p;
  }

 private:
  TokenStream ts_;
  std::set<std::string> used_;
  std::vector<std::pair<std::string, std::string>> scope_;

  std::string fresh(const std::string& base) {
    if (!used_.count(base)) {
      used_.insert(base);
      return base;
    }
    for (int k = 1;; ++k) {
      std::string cand = base + "_" + std::to_string(k);
      if (!used_.count(cand)) {
        used_.insert(cand);
        return cand;
      }
    }
  }

  std::string bind(const std::string& src) {
    if (src == "_") return fresh("_w");
    std::string u = fresh(src);
    scope_.emplace_back(src, u);
    return u;
  }

  std::string lookup(const std::string& src) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (it->first == src) return it->second;
    return src;
  }

  bool at_ident() const {
    const Token& t = ts_.peek();
    return t.kind == Token::Kind::Ident && !detail::is_keyword(t.text);
  }

  std::string binder_name() {
    if (ts_.is("_")) {
      ts_.next();
      return "_";
    }
    return ts_.ident();
  }

  // A variable in argument position; anything else violates let-normal form.
  std::string var_arg(const char* what) {
    if (!at_ident()) {
      const Token& t = ts_.peek();
      if (t.kind == Token::Kind::End) ts_.fail(std::string("expected ") + what);
      throw LetNormalError(std::string(what) + " must be a variable (let-normal form), found '" + t.text + "'",
                           t.span);
    }
    return lookup(ts_.next().text);
  }

  bool starts_argument() const {
    const Token& t = ts_.peek();
    if (t.kind == Token::Kind::Number) return true;
    if (t.kind == Token::Kind::Ident)
      return t.text == "inl" || t.text == "inr" || t.text == "true" || t.text == "false" || t.text == "tick";
    return t.text == "(" || t.text == "<" || t.text == "[" || t.text == "[]";
  }

  // <a1, ..., ak> built from variables; k >= 2 nests to the right.
  ExprPtr tuple(const std::vector<std::string>& vars, Span sp) {
    if (vars.size() == 2) return ast::pair(vars[0], vars[1], sp);
    std::string t = fresh("_t");
    std::vector<std::string> rest(vars.begin() + 1, vars.end());
    return ast::let(t, tuple(rest, sp), ast::pair(vars[0], t, sp), sp);
  }

  ExprPtr apply(const std::string& f, const std::vector<std::string>& args, Span sp) {
    if (args.size() == 1) return ast::app(f, args[0], sp);
    std::string a = fresh("_a");
    return ast::let(a, tuple(args, sp), ast::app(f, a, sp), sp);
  }

  // case p {<x1, r1> -> case r1 {<x2, r2> -> ... body}}
  ExprPtr untuple(const std::string& p, const std::vector<std::string>& names, ExprPtr body, Span sp) {
    if (names.size() == 2) return ast::case_pair(p, names[0], names[1], body, sp);
    std::string r = fresh("_r");
    std::vector<std::string> rest(names.begin() + 1, names.end());
    return ast::case_pair(p, names[0], r, untuple(r, rest, body, sp), sp);
  }

  ExprPtr expr() {
    const Token& t = ts_.peek();
    Span sp = t.span;
    if (ts_.accept("let")) return let_rest(sp);
    if (ts_.accept("share")) return share_rest(sp);
    if (ts_.accept("case")) return case_rest(sp);
    if (ts_.accept("rec")) return rec_rest(sp);
    if (ts_.accept("fun")) {
      std::string src = ts_.ident();
      std::size_t mark = scope_.size();
      std::string name = bind(src);
      auto fn = fun_rest(name, sp);
      scope_.resize(mark);
      return fn;
    }
    if (ts_.accept("lambda") || ts_.accept("fn") || ts_.accept("\\")) return lambda_rest(sp);
    if (ts_.accept("if")) {
      std::string c = var_arg("condition");
      ts_.expect("then");
      auto a = expr();
      ts_.expect("else");
      auto b = expr();
      return ast::case_sum(c, fresh("_w"), a, fresh("_w"), b, sp);
    }
    return simple();
  }

  ExprPtr let_rest(Span sp) {
    if (ts_.accept("<")) {
      std::vector<std::string> srcs{binder_name()};
      while (ts_.accept(",")) srcs.push_back(binder_name());
      ts_.expect(">");
      if (srcs.size() < 2) ts_.fail("tuple pattern needs two components");
      ts_.expect("=");
      auto e1 = expr();
      ts_.expect("in");
      std::size_t mark = scope_.size();
      std::string p = fresh("_p");
      std::vector<std::string> names;
      for (auto& s : srcs) names.push_back(bind(s));
      auto e2 = expr();
      scope_.resize(mark);
      return ast::let(p, e1, untuple(p, names, e2, sp), sp);
    }
    std::string src = binder_name();
    ts_.expect("=");
    auto e1 = expr();
    ts_.expect("in");
    std::size_t mark = scope_.size();
    std::string x = bind(src);
    auto e2 = expr();
    scope_.resize(mark);
    return ast::let(x, e1, e2, sp);
  }

  ExprPtr share_rest(Span sp) {
    std::string x = var_arg("shared variable");
    ts_.expect("as");
    std::vector<std::string> srcs{binder_name()};
    ts_.expect(",");
    srcs.push_back(binder_name());
    while (ts_.accept(",")) srcs.push_back(binder_name());
    ts_.expect("in");
    std::size_t mark = scope_.size();
    // share x as a, b, c  ==  share x as a, t in share t as b, c
    std::vector<std::string> names;
    std::vector<std::string> links;
    for (std::size_t i = 0; i + 2 < srcs.size(); ++i) {
      names.push_back(bind(srcs[i]));
      links.push_back(fresh("_s"));
    }
    names.push_back(bind(srcs[srcs.size() - 2]));
    names.push_back(bind(srcs.back()));
    auto body = expr();
    scope_.resize(mark);
    std::size_t k = links.size();
    std::string inner_src = k == 0 ? x : links[k - 1];
    ExprPtr e = ast::share(inner_src, names[k], names[k + 1], body, sp);
    for (std::size_t i = k; i-- > 0;) {
      std::string from = i == 0 ? x : links[i - 1];
      e = ast::share(from, names[i], links[i], e, sp);
    }
    return e;
  }

  ExprPtr case_rest(Span sp) {
    std::string x = var_arg("scrutinee");
    ts_.expect("{");
    ts_.accept("|");
    ExprPtr result;
    if (ts_.is("inl") || ts_.is("inr") || ts_.is("true") || ts_.is("false")) {
      ExprPtr left, right;
      std::string yl, yr;
      for (int i = 0; i < 2; ++i) {
        if (i == 1) ts_.expect("|");
        bool is_left;
        std::string src = "_";
        if (ts_.accept("inl")) {
          is_left = true;
          src = binder_name();
        } else if (ts_.accept("inr")) {
          is_left = false;
          src = binder_name();
        } else if (ts_.accept("true")) {
          is_left = true;
        } else if (ts_.accept("false")) {
          is_left = false;
        } else {
          ts_.fail("expected a sum pattern");
        }
        ts_.expect("->");
        std::size_t mark = scope_.size();
        std::string y = bind(src);
        auto body = expr();
        scope_.resize(mark);
        if ((is_left && left) || (!is_left && right)) throw ParseError("duplicate case alternative", sp);
        (is_left ? yl : yr) = y;
        (is_left ? left : right) = body;
      }
      result = ast::case_sum(x, yl, left, yr, right, sp);
    } else if (ts_.accept("<")) {
      std::vector<std::string> srcs{binder_name()};
      while (ts_.accept(",")) srcs.push_back(binder_name());
      ts_.expect(">");
      if (srcs.size() < 2) ts_.fail("tuple pattern needs two components");
      ts_.expect("->");
      std::size_t mark = scope_.size();
      std::vector<std::string> names;
      for (auto& s : srcs) names.push_back(bind(s));
      auto body = expr();
      scope_.resize(mark);
      result = untuple(x, names, body, sp);
    } else {
      ExprPtr enil, econs;
      std::string h, tl;
      for (int i = 0; i < 2; ++i) {
        if (i == 1) ts_.expect("|");
        if (ts_.accept("[]") || (ts_.is("[") && ts_.is("]", 1) && ts_.accept("[") && ts_.accept("]"))) {
          ts_.expect("->");
          if (enil) throw ParseError("duplicate nil alternative", sp);
          enil = expr();
        } else {
          bool paren = ts_.accept("(");
          std::string hs = binder_name();
          ts_.expect("::");
          std::string ts = binder_name();
          if (paren) ts_.expect(")");
          ts_.expect("->");
          std::size_t mark = scope_.size();
          h = bind(hs);
          tl = bind(ts);
          if (econs) throw ParseError("duplicate cons alternative", sp);
          econs = expr();
          scope_.resize(mark);
        }
      }
      if (!enil || !econs) throw ParseError("list case needs [] and :: alternatives", sp);
      result = ast::case_list(x, enil, h, tl, econs, sp);
    }
    ts_.expect("}");
    return result;
  }

  ExprPtr rec_rest(Span sp) {
    std::string x = var_arg("recursion scrutinee");
    ts_.expect("{");
    ts_.accept("|");
    if (!ts_.accept("[]")) {
      ts_.expect("[");
      ts_.expect("]");
    }
    ts_.expect("->");
    auto enil = expr();
    ts_.expect("|");
    bool paren = ts_.accept("(");
    std::string ys_src, y_src = binder_name();
    ts_.expect("::");
    ys_src = binder_name();
    if (paren) ts_.expect(")");
    ts_.expect("with");
    std::string z_src = binder_name();
    ts_.expect("->");
    std::size_t mark = scope_.size();
    std::string y = bind(y_src), ys = bind(ys_src), z = bind(z_src);
    auto step = expr();
    scope_.resize(mark);
    ts_.expect("}");
    return ast::rec(x, enil, y, ys, z, step, sp);
  }

  struct Param {
    std::vector<std::string> srcs;  // one name, or a tuple pattern
  };

  ExprPtr fun_rest(const std::string& name, Span sp) {
    std::vector<Param> params;
    while (!ts_.is("=")) {
      if (ts_.accept("<")) {
        Param p;
        p.srcs.push_back(binder_name());
        while (ts_.accept(",")) p.srcs.push_back(binder_name());
        ts_.expect(">");
        params.push_back(p);
      } else if (ts_.accept("(")) {
        params.push_back({{binder_name()}});
        ts_.expect(")");
      } else {
        params.push_back({{binder_name()}});
      }
    }
    if (params.empty()) ts_.fail("function needs a parameter");
    ts_.expect("=");
    std::vector<std::string> flat;
    for (auto& p : params) flat.insert(flat.end(), p.srcs.begin(), p.srcs.end());
    std::size_t mark = scope_.size();
    ExprPtr fn;
    if (flat.size() == 1) {
      std::string x = bind(flat[0]);
      auto body = expr();
      fn = ast::fun(name, x, body, sp);
    } else {
      std::string p = fresh("_p");
      std::vector<std::string> names;
      for (auto& s : flat) names.push_back(bind(s));
      auto body = expr();
      fn = ast::fun(name, p, untuple(p, names, body, sp), sp);
    }
    scope_.resize(mark);
    auto mut = std::const_pointer_cast<Expr>(fn);
    mut->param_names = flat;
    return fn;
  }

  ExprPtr lambda_rest(Span sp) {
    std::vector<std::pair<std::string, TypePtr>> params;
    while (ts_.accept("(")) {
      std::string src = binder_name();
      ts_.expect(":");
      auto t = detail::parse_type(ts_);
      ts_.expect(")");
      params.emplace_back(src, t);
    }
    if (params.empty()) ts_.fail("lambda needs a typed parameter '(x : type)'");
    ts_.expect(".");
    std::size_t mark = scope_.size();
    ExprPtr fn;
    std::vector<std::string> srcs;
    for (auto& p : params) srcs.push_back(p.first);
    if (params.size() == 1) {
      std::string x = bind(params[0].first);
      auto body = expr();
      fn = ast::lambda(x, params[0].second, body, sp);
    } else {
      std::string p = fresh("_p");
      std::vector<std::string> names;
      for (auto& s : srcs) names.push_back(bind(s));
      TypePtr t = params.back().second;
      for (std::size_t i = params.size() - 1; i-- > 0;) t = BaseType::prod(params[i].second, t);
      auto body = expr();
      fn = ast::lambda(p, t, untuple(p, names, body, sp), sp);
    }
    scope_.resize(mark);
    std::const_pointer_cast<Expr>(fn)->param_names = srcs;
    return fn;
  }

  ExprPtr simple() {
    const Token& t = ts_.peek();
    Span sp = t.span;
    if (ts_.accept("(")) {
      auto e = expr();
      ts_.expect(")");
      return e;
    }
    if (ts_.accept("<")) {
      if (ts_.accept(">")) return ast::triv(sp);
      std::vector<std::string> vars{var_arg("tuple component")};
      while (ts_.accept(",")) vars.push_back(var_arg("tuple component"));
      ts_.expect(">");
      if (vars.size() < 2) ts_.fail("tuple needs two components");
      return tuple(vars, sp);
    }
    if (ts_.accept("[]")) return ast::nil(sp);
    if (ts_.is("[")) {
      ts_.next();
      if (ts_.accept("]")) return ast::nil(sp);
      throw LetNormalError("list literals are not expressions; build lists with '::'", sp);
    }
    if (ts_.accept("inl")) return ast::inl(var_arg("injection argument"), sp);
    if (ts_.accept("inr")) return ast::inr(var_arg("injection argument"), sp);
    if (ts_.accept("true") || ts_.accept("false")) {
      bool v = t.text == "true";
      std::string u = fresh("_u");
      return ast::let(u, ast::triv(sp), v ? ast::inl(u, sp) : ast::inr(u, sp), sp);
    }
    if (ts_.accept("tick")) {
      bool neg = ts_.accept("-");
      const Token& n = ts_.peek();
      if (n.kind != Token::Kind::Number) ts_.fail("expected a tick amount");
      Rational q = parse_rational(ts_.next().text);
      return ast::tick(neg ? Rational(-q) : q, sp);
    }
    if (ts_.accept("error")) return ast::error(sp);
    if (!at_ident()) ts_.fail("expected an expression");
    std::string head = lookup(ts_.next().text);
    if (ts_.accept("::")) return ast::cons(head, var_arg("list tail"), sp);
    std::vector<std::string> args;
    while (true) {
      if (at_ident()) {
        args.push_back(lookup(ts_.next().text));
      } else if (starts_argument()) {
        const Token& a = ts_.peek();
        throw LetNormalError("argument must be a variable (let-normal form), found '" + a.text + "'", a.span);
      } else {
        break;
      }
    }
    if (args.empty()) return ast::var(head, sp);
    return apply(head, args, sp);
  }
};

void reserved_from(const Program& p, std::set<std::string>& out) {
  std::set<std::string> known;
  for (auto& [n, t] : p.params) known.insert(n);
  for (auto& d : p.defs) {
    for (auto& v : free_vars(*d.fn))
      if (!known.count(v)) out.insert(v);
    known.insert(d.name);
  }
  if (p.main)
    for (auto& v : free_vars(*p.main))
      if (!known.count(v)) out.insert(v);
}

}  // namespace

ExprPtr parse(std::string_view source) {
  auto e = Parser(source, {}).expression_only();
  auto fv = free_vars(*e);
  if (fv.empty()) return e;
  return Parser(source, std::set<std::string>(fv.begin(), fv.end())).expression_only();
}

Program parse_program(std::string_view source) {
  auto p = Parser(source, {}).program();
  std::set<std::string> reserved;
  reserved_from(p, reserved);
  if (reserved.empty()) return p;
  return Parser(source, reserved).program();
}

TypePtr parse_type(std::string_view source) {
  TokenStream ts(detail::lex(source));
  auto t = detail::parse_type(ts);
  if (!ts.at_end()) ts.fail("expected end of type");
  return t;
}

}  // namespace aara
