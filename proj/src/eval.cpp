#include "aara/eval.hpp"

#include "lexer.hpp"

#include <set>
#include <sstream>

namespace aara {

std::string to_string(CostMetric m) {
  switch (m) {
    case CostMetric::RunningTime: return "time";
    case CostMetric::Tick: return "tick";
    case CostMetric::CostFree: return "costfree";
  }
  return "?";
}

CostMetric parse_metric(std::string_view s) {
  if (s == "time" || s == "running-time") return CostMetric::RunningTime;
  if (s == "tick") return CostMetric::Tick;
  if (s == "costfree" || s == "cost-free") return CostMetric::CostFree;
  throw std::invalid_argument("unknown cost metric '" + std::string(s) + "' (time, tick, costfree)");
}

namespace {
std::shared_ptr<Value> make(Value::Kind k) {
  auto v = std::make_shared<Value>();
  v->kind = k;
  return v;
}
}  // namespace

ValuePtr Value::triv() {
  static const ValuePtr t = make(Value::Kind::Triv);
  return t;
}
ValuePtr Value::inl(ValuePtr v) {
  auto r = make(Value::Kind::Inl);
  r->a = std::move(v);
  return r;
}
ValuePtr Value::inr(ValuePtr v) {
  auto r = make(Value::Kind::Inr);
  r->a = std::move(v);
  return r;
}
ValuePtr Value::pair(ValuePtr a, ValuePtr b) {
  auto r = make(Value::Kind::Pair);
  r->a = std::move(a);
  r->b = std::move(b);
  return r;
}
ValuePtr Value::nil() {
  static const ValuePtr n = make(Value::Kind::Nil);
  return n;
}
ValuePtr Value::cons(ValuePtr h, ValuePtr t) {
  auto r = make(Value::Kind::Cons);
  r->length = t->length + 1;
  r->a = std::move(h);
  r->b = std::move(t);
  return r;
}
ValuePtr Value::list(const std::vector<ValuePtr>& elems) {
  ValuePtr l = nil();
  for (auto it = elems.rbegin(); it != elems.rend(); ++it) l = cons(*it, l);
  return l;
}
ValuePtr Value::closure(Env env, ExprPtr fn) {
  auto r = make(Value::Kind::Closure);
  r->env = std::move(env);
  r->fn = std::move(fn);
  return r;
}

std::vector<ValuePtr> list_elems(const ValuePtr& v) {
  std::vector<ValuePtr> out;
  if (!v->is_list()) throw std::invalid_argument("not a list value");
  out.reserve(v->length);
  for (const Value* p = v.get(); p->kind == Value::Kind::Cons; p = p->b.get()) out.push_back(p->a);
  return out;
}

bool value_equal(const Value& a, const Value& b) {
  if (&a == &b) return true;
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Value::Kind::Triv:
    case Value::Kind::Nil: return true;
    case Value::Kind::Inl:
    case Value::Kind::Inr: return value_equal(*a.a, *b.a);
    case Value::Kind::Pair:
    case Value::Kind::Cons: return a.length == b.length && value_equal(*a.a, *b.a) && value_equal(*a.b, *b.b);
    case Value::Kind::Closure: return a.fn == b.fn && a.env == b.env;
  }
  return false;
}

namespace {
void print_value(std::ostream& os, const Value& v) {
  switch (v.kind) {
    case Value::Kind::Triv: os << "<>"; return;
    case Value::Kind::Inl:
    case Value::Kind::Inr: {
      os << (v.kind == Value::Kind::Inl ? "inl " : "inr ");
      bool paren = v.a->kind == Value::Kind::Inl || v.a->kind == Value::Kind::Inr;
      if (paren) os << "(";
      print_value(os, *v.a);
      if (paren) os << ")";
      return;
    }
    case Value::Kind::Pair:
      os << "<";
      print_value(os, *v.a);
      os << ", ";
      print_value(os, *v.b);
      os << ">";
      return;
    case Value::Kind::Nil:
    case Value::Kind::Cons: {
      os << "[";
      bool first = true;
      for (const Value* p = &v; p->kind == Value::Kind::Cons; p = p->b.get()) {
        if (!first) os << ", ";
        first = false;
        print_value(os, *p->a);
      }
      os << "]";
      return;
    }
    case Value::Kind::Closure: os << "<closure " << (v.fn->kind == Expr::Kind::Fun ? v.fn->f : "lambda") << ">"; return;
  }
}

ValuePtr value_literal(detail::TokenStream& ts) {
  if (ts.accept("(")) {
    auto v = value_literal(ts);
    ts.expect(")");
    return v;
  }
  if (ts.accept("inl")) return Value::inl(value_literal(ts));
  if (ts.accept("inr")) return Value::inr(value_literal(ts));
  if (ts.accept("true")) return Value::inl(Value::triv());
  if (ts.accept("false")) return Value::inr(Value::triv());
  if (ts.accept("[]")) return Value::nil();
  if (ts.accept("[")) {
    std::vector<ValuePtr> elems;
    if (!ts.accept("]")) {
      elems.push_back(value_literal(ts));
      while (ts.accept(",")) elems.push_back(value_literal(ts));
      ts.expect("]");
    }
    return Value::list(elems);
  }
  if (ts.accept("<")) {
    if (ts.accept(">")) return Value::triv();
    auto a = value_literal(ts);
    std::vector<ValuePtr> rest;
    while (ts.accept(",")) rest.push_back(value_literal(ts));
    ts.expect(">");
    if (rest.empty()) ts.fail("tuple needs two components");
    ValuePtr r = rest.back();
    for (std::size_t i = rest.size() - 1; i-- > 0;) r = Value::pair(rest[i], r);
    return Value::pair(a, r);
  }
  ts.fail("expected a value");
}
}  // namespace

std::string to_string(const Value& v) {
  std::ostringstream os;
  print_value(os, v);
  return os.str();
}

ValuePtr parse_value(std::string_view text) {
  detail::TokenStream ts(detail::lex(text));
  auto v = value_literal(ts);
  if (!ts.at_end()) ts.fail("expected end of value");
  return v;
}

bool has_type(const Value& v, const BaseType& t) {
  switch (t.kind) {
    case BaseType::Kind::Unit: return v.kind == Value::Kind::Triv;
    case BaseType::Kind::Sum:
      if (v.kind == Value::Kind::Inl) return has_type(*v.a, *t.left);
      if (v.kind == Value::Kind::Inr) return has_type(*v.a, *t.right);
      return false;
    case BaseType::Kind::Prod:
      return v.kind == Value::Kind::Pair && has_type(*v.a, *t.left) && has_type(*v.b, *t.right);
    case BaseType::Kind::List:
      for (const Value* p = &v;; p = p->b.get()) {
        if (p->kind == Value::Kind::Nil) return true;
        if (p->kind != Value::Kind::Cons || !has_type(*p->a, *t.left)) return false;
      }
  }
  return false;
}

Env env_bind(Env env, std::string name, ValuePtr v) {
  return std::make_shared<const EnvNode>(EnvNode{std::move(name), std::move(v), std::move(env)});
}

ValuePtr env_lookup(const Env& env, const std::string& name) {
  for (const EnvNode* p = env.get(); p; p = p->next.get())
    if (p->name == name) return p->value;
  throw StuckError("unbound variable '" + name + "' at run time");
}

RecOverhead rec_overhead(std::size_t captured) {
  int k = static_cast<int>(captured);
  int pack = k == 0 ? 1 : 4 * (k - 1);
  int unpack = k <= 1 ? 0 : k - 1;
  // let f = fun .. (2), packing, let a = <x, g> (4), first application (1)
  return {7 + pack, 2, unpack, 6};
}

namespace {

using K = Expr::Kind;

class Evaluator {
 public:
  Evaluator(CostMetric m, std::uint64_t fuel) : metric_(m), fuel_(fuel) {}

  ValuePtr run(const Env& env, const Expr& e) { return eval(env, e); }

  ValuePtr call(const ValuePtr& clo, const ValuePtr& arg) {
    if (clo->kind != Value::Kind::Closure) throw StuckError("application of a non-function");
    const Expr& fn = *clo->fn;
    Env env = clo->env;
    if (fn.kind == K::Fun) env = env_bind(env, fn.f, clo);
    env = env_bind(env, fn.y1, arg);
    return eval(env, *fn.e1);
  }

  Rational cost() const {
    switch (metric_) {
      case CostMetric::RunningTime: return Rational(time_);
      case CostMetric::Tick: return ticks_;
      case CostMetric::CostFree: return Rational(0);
    }
    return Rational(0);
  }
  std::uint64_t steps() const { return steps_; }

 private:
  CostMetric metric_;
  std::uint64_t fuel_;
  std::uint64_t steps_ = 0;
  std::int64_t time_ = 0;
  Rational ticks_;

  void charge(int c) { time_ += c; }

  static ValuePtr look(const Env& env, const std::string& x) { return env_lookup(env, x); }

  ValuePtr eval(const Env& env, const Expr& e) {
    if (++steps_ > fuel_) throw FuelExhausted("fuel exhausted after " + std::to_string(fuel_) + " rule applications");
    switch (e.kind) {
      case K::Var: charge(1); return look(env, e.x);
      case K::Triv: return Value::triv();
      case K::Inl: charge(2); return Value::inl(look(env, e.x));
      case K::Inr: charge(2); return Value::inr(look(env, e.x));
      case K::Pair: charge(3); return Value::pair(look(env, e.x), look(env, e.y));
      case K::Nil: return Value::nil();
      case K::Cons: {
        charge(3);
        ValuePtr t = look(env, e.y);
        if (!t->is_list()) throw StuckError("cons onto a non-list");
        return Value::cons(look(env, e.x), t);
      }
      case K::Fun:
      case K::Lambda: charge(1); return Value::closure(env, std::const_pointer_cast<const Expr>(self_ptr(e)));
      case K::App: {
        charge(1);
        return call(look(env, e.f), look(env, e.x));
      }
      case K::Tick: ticks_ += e.amount; return Value::triv();
      case K::Error: throw RuntimeError("error primitive evaluated" + span_text(e));
      case K::CaseSum: {
        charge(1);
        ValuePtr v = look(env, e.x);
        if (v->kind == Value::Kind::Inl) return eval(env_bind(env, e.y1, v->a), *e.e1);
        if (v->kind == Value::Kind::Inr) return eval(env_bind(env, e.y2, v->a), *e.e2);
        throw StuckError("case on a non-sum value");
      }
      case K::CasePair: {
        charge(1);
        ValuePtr v = look(env, e.x);
        if (v->kind != Value::Kind::Pair) throw StuckError("case on a non-pair value");
        return eval(env_bind(env_bind(env, e.y1, v->a), e.y2, v->b), *e.e1);
      }
      case K::CaseList: {
        charge(1);
        ValuePtr v = look(env, e.x);
        if (v->kind == Value::Kind::Nil) return eval(env, *e.e1);
        if (v->kind == Value::Kind::Cons) return eval(env_bind(env_bind(env, e.y1, v->a), e.y2, v->b), *e.e2);
        throw StuckError("case on a non-list value");
      }
      case K::Let: {
        charge(1);
        ValuePtr v1 = eval(env, *e.e1);
        return eval(env_bind(env, e.y1, v1), *e.e2);
      }
      case K::Share: {
        ValuePtr v = look(env, e.x);
        return eval(env_bind(env_bind(env, e.y1, v), e.y2, v), *e.e1);
      }
      case K::Rec: return eval_rec(env, e);
    }
    throw StuckError("unknown expression");
  }

  ValuePtr eval_rec(const Env& env, const Expr& e) {
    ValuePtr l = look(env, e.x);
    if (!l->is_list()) throw StuckError("rec on a non-list value");
    std::size_t captured = 0;
    for (auto& v : free_vars(*e.e1))
      if (look(env, v)->kind != Value::Kind::Closure) ++captured;
    RecOverhead oh = rec_overhead(captured);
    charge(oh.setup);
    std::vector<ValuePtr> elems = list_elems(l);
    std::vector<ValuePtr> tails(elems.size());
    {
      const Value* p = l.get();
      for (std::size_t i = 0; i < elems.size(); ++i) {
        tails[i] = p->b;
        p = p->b.get();
      }
    }
    charge(oh.call * static_cast<int>(elems.size() + 1) + oh.nil + oh.cons * static_cast<int>(elems.size()));
    ValuePtr z = eval(env, *e.e1);
    for (std::size_t i = elems.size(); i-- > 0;) {
      Env step = env_bind(env_bind(env_bind(env, e.y1, elems[i]), e.y2, tails[i]), e.y3, z);
      z = eval(step, *e.e2);
    }
    return z;
  }

  // Closures hold the defining node; the AST is immutable and outlives evaluation.
  static std::shared_ptr<const Expr> self_ptr(const Expr& e) {
    return std::shared_ptr<const Expr>(std::shared_ptr<const Expr>{}, &e);
  }

  static std::string span_text(const Expr& e) {
    if (e.span.line == 0) return "";
    return " at " + std::to_string(e.span.line) + ":" + std::to_string(e.span.col);
  }
};

}  // namespace

EvalResult eval(const Env& env, const ExprPtr& e, CostMetric metric, std::uint64_t fuel) {
  Evaluator ev(metric, fuel);
  ValuePtr v = ev.run(env, *e);
  return {v, ev.cost(), ev.steps()};
}

EvalResult apply(const ValuePtr& closure, const ValuePtr& arg, CostMetric metric, std::uint64_t fuel) {
  Evaluator ev(metric, fuel);
  ValuePtr v = ev.call(closure, arg);
  return {v, ev.cost(), ev.steps()};
}

Rational measure_cost(const ExprPtr& program, const ValuePtr& input, CostMetric metric, std::uint64_t fuel) {
  Evaluator ev(metric, fuel);
  ValuePtr clo = ev.run(nullptr, *program);
  ev.call(clo, input);
  return ev.cost();
}

EvalResult run_program(const CheckedProgram& cp, const std::vector<ValuePtr>& inputs, CostMetric metric,
                       std::uint64_t fuel) {
  const Program& p = cp.program;
  if (p.main) {
    if (inputs.size() != p.params.size())
      throw std::invalid_argument("main expects " + std::to_string(p.params.size()) + " input(s)");
    Env env;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      if (!has_type(*inputs[i], *p.params[i].second))
        throw std::invalid_argument("input '" + p.params[i].first + "' does not have type " +
                                    to_string(*p.params[i].second));
      env = env_bind(env, p.params[i].first, inputs[i]);
    }
    return eval(env, cp.expr, metric, fuel);
  }
  if (inputs.size() != 1) throw std::invalid_argument("the entry function expects one input");
  const SimpleType& t = cp.type;
  if (!has_type(*inputs[0], *t.dom))
    throw std::invalid_argument("input does not have type " + to_string(*t.dom));
  Evaluator ev(metric, fuel);
  ValuePtr clo = ev.run(nullptr, *cp.expr);
  ValuePtr v = ev.call(clo, inputs[0]);
  return {v, ev.cost(), ev.steps()};
}

namespace {

class RecEncoder {
 public:
  explicit RecEncoder(const BinderTypes& bt, std::set<std::string> used) : bt_(bt), used_(std::move(used)) {}

  ExprPtr go(const ExprPtr& e) {
    auto copy = std::make_shared<Expr>(*e);
    if (copy->e1) copy->e1 = go(copy->e1);
    if (copy->e2) copy->e2 = go(copy->e2);
    if (copy->kind != K::Rec) return copy;
    return encode(*copy);
  }

 private:
  const BinderTypes& bt_;
  std::set<std::string> used_;

  std::string fresh(const std::string& base) {
    for (int k = 0;; ++k) {
      std::string c = base + std::to_string(k);
      if (used_.insert(c).second) return c;
    }
  }

  bool is_base(const std::string& v) const {
    auto it = bt_.types.find(v);
    return it == bt_.types.end() || !it->second.is_arrow();
  }

  ExprPtr encode(const Expr& r) {
    std::vector<std::string> cap;
    for (auto& v : free_vars(*r.e1))
      if (is_base(v)) cap.push_back(v);
    std::string f = fresh("_recf"), a = fresh("_reca"), xs = fresh("_recx");
    std::string ys0 = fresh("_recys"), ys1 = fresh("_recys"), a2 = fresh("_reca");
    std::string g = cap.size() == 1 ? cap[0] : fresh("_recg");
    // nil branch: unpack g into the captured names
    ExprPtr nil_branch = r.e1;
    if (cap.size() >= 2) {
      std::vector<std::string> links;
      for (std::size_t i = 0; i + 2 < cap.size(); ++i) links.push_back(fresh("_recr"));
      std::size_t k = cap.size();
      std::string last_src = k == 2 ? g : links.back();
      nil_branch = ast::case_pair(last_src, cap[k - 2], cap[k - 1], nil_branch);
      for (std::size_t i = k - 2; i-- > 0;) {
        std::string src = i == 0 ? g : links[i - 1];
        nil_branch = ast::case_pair(src, cap[i], links[i], nil_branch);
      }
    }
    ExprPtr cons_branch = ast::share(
        ys0, ys1, r.y2,
        ast::let(a2, ast::pair(ys1, g), ast::let(r.y3, ast::app(f, a2), r.e2)));
    ExprPtr body = ast::case_pair(a, xs, g, ast::case_list(xs, nil_branch, r.y1, ys0, cons_branch));
    ExprPtr call = ast::let(a, ast::pair(r.x, g), ast::app(f, a));
    // pack the captured names into g
    if (cap.empty()) {
      call = ast::let(g, ast::triv(), call);
    } else if (cap.size() >= 2) {
      std::size_t k = cap.size();
      std::vector<std::string> links;
      for (std::size_t i = 0; i + 2 < k; ++i) links.push_back(fresh("_recr"));
      // links[i] = <cap[i+1], links[i+1]>, innermost <cap[k-2], cap[k-1]>
      std::string inner = k == 2 ? g : links.back();
      ExprPtr built = call;
      std::vector<std::pair<std::string, ExprPtr>> binds;
      binds.emplace_back(inner, ast::pair(cap[k - 2], cap[k - 1]));
      for (std::size_t i = k - 2; i-- > 0;) {
        std::string name = i == 0 ? g : links[i - 1];
        binds.emplace_back(name, ast::pair(cap[i], links[i]));
      }
      for (auto it = binds.rbegin(); it != binds.rend(); ++it) built = ast::let(it->first, it->second, built);
      call = built;
    }
    return ast::let(f, ast::fun(f, a, body), call);
  }
};

void collect_names(const Expr& e, std::set<std::string>& out) {
  for (const std::string* s : {&e.x, &e.y, &e.f, &e.y1, &e.y2, &e.y3})
    if (!s->empty()) out.insert(*s);
  if (e.e1) collect_names(*e.e1, out);
  if (e.e2) collect_names(*e.e2, out);
}

}  // namespace

ExprPtr desugar_rec(const TypingContext& ctx, const ExprPtr& e) {
  TypeInfo info;
  typecheck(ctx, e, &info);
  BinderTypes bt = binder_types(ctx, *e, info);
  std::set<std::string> used;
  collect_names(*e, used);
  for (auto& [n, t] : ctx) used.insert(n);
  return RecEncoder(bt, used).go(e);
}

}  // namespace aara
