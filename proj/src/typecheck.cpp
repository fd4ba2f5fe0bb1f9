#include "aara/typecheck.hpp"

#include <functional>
#include <map>

namespace aara {

const SimpleType& TypeInfo::of(const Expr& e) const {
  auto it = types.find(&e);
  if (it == types.end()) throw std::logic_error("expression was not typechecked");
  return it->second;
}

const TypePtr& TypeInfo::base_of(const Expr& e) const {
  const SimpleType& t = of(e);
  if (t.is_arrow()) throw std::logic_error("expected a base-typed expression");
  return t.dom;
}

namespace {

using K = Expr::Kind;

class Unifier {
 public:
  enum class T { Var, Unit, Sum, Prod, List, Arrow };
  struct Node {
    T kind;
    int a = -1, b = -1;
    int ref = -1;  // binding of a Var
  };
  std::vector<Node> nodes;

  int mk(T k, int a = -1, int b = -1) {
    nodes.push_back({k, a, b, -1});
    return static_cast<int>(nodes.size()) - 1;
  }
  int fresh() { return mk(T::Var); }

  int from_base(const BaseType& t) {
    switch (t.kind) {
      case BaseType::Kind::Unit: return mk(T::Unit);
      case BaseType::Kind::Sum: return mk(T::Sum, from_base(*t.left), from_base(*t.right));
      case BaseType::Kind::Prod: return mk(T::Prod, from_base(*t.left), from_base(*t.right));
      case BaseType::Kind::List: return mk(T::List, from_base(*t.left));
    }
    return -1;
  }
  int from_simple(const SimpleType& t) {
    if (!t.is_arrow()) return from_base(*t.dom);
    return mk(T::Arrow, from_base(*t.dom), from_base(*t.cod));
  }

  int find(int t) {
    while (nodes[t].kind == T::Var && nodes[t].ref != -1) t = nodes[t].ref;
    return t;
  }

  bool occurs(int v, int t) {
    t = find(t);
    if (t == v) return true;
    const Node& n = nodes[t];
    return (n.a != -1 && occurs(v, n.a)) || (n.b != -1 && occurs(v, n.b));
  }

  void unify(int x, int y, Span sp) {
    x = find(x);
    y = find(y);
    if (x == y) return;
    if (nodes[x].kind == T::Var) {
      if (occurs(x, y)) throw TypeError("infinite type", sp);
      nodes[x].ref = y;
      return;
    }
    if (nodes[y].kind == T::Var) {
      unify(y, x, sp);
      return;
    }
    if (nodes[x].kind != nodes[y].kind)
      throw TypeError("type mismatch: " + show(x) + " vs " + show(y), sp);
    if (nodes[x].a != -1) unify(nodes[x].a, nodes[y].a, sp);
    if (nodes[x].b != -1) unify(nodes[x].b, nodes[y].b, sp);
  }

  std::string show(int t) {
    t = find(t);
    const Node& n = nodes[t];
    switch (n.kind) {
      case T::Var: return "'a" + std::to_string(t);
      case T::Unit: return "unit";
      case T::Sum: return "(" + show(n.a) + " + " + show(n.b) + ")";
      case T::Prod: return "(" + show(n.a) + " * " + show(n.b) + ")";
      case T::List: return "L(" + show(n.a) + ")";
      case T::Arrow: return "(" + show(n.a) + " -> " + show(n.b) + ")";
    }
    return "?";
  }

  TypePtr to_base(int t, Span sp) {
    t = find(t);
    const Node& n = nodes[t];
    switch (n.kind) {
      case T::Var: return BaseType::unit();
      case T::Unit: return BaseType::unit();
      case T::Sum: return BaseType::sum(to_base(n.a, sp), to_base(n.b, sp));
      case T::Prod: return BaseType::prod(to_base(n.a, sp), to_base(n.b, sp));
      case T::List: return BaseType::list(to_base(n.a, sp));
      case T::Arrow: throw TypeError("functions are not first-class values in this language", sp);
    }
    return nullptr;
  }

  SimpleType to_simple(int t, Span sp) {
    t = find(t);
    if (nodes[t].kind == T::Arrow)
      return SimpleType::arrow(to_base(nodes[t].a, sp), to_base(nodes[t].b, sp));
    return SimpleType::base(to_base(t, sp));
  }

  bool is_arrow(int t) { return nodes[find(t)].kind == T::Arrow; }
};

class Inference {
 public:
  Unifier u;
  std::vector<std::pair<const Expr*, int>> node_types;
  std::vector<std::pair<std::string, int>> env;

  int lookup(const std::string& x, Span sp) {
    for (auto it = env.rbegin(); it != env.rend(); ++it)
      if (it->first == x) return it->second;
    throw TypeError("unbound variable '" + x + "'", sp);
  }

  struct Bind {
    Inference& inf;
    std::size_t mark;
    Bind(Inference& i, std::initializer_list<std::pair<std::string, int>> bs) : inf(i), mark(i.env.size()) {
      for (auto& b : bs) inf.env.push_back(b);
    }
    ~Bind() { inf.env.resize(mark); }
  };

  int infer(const Expr& e) {
    int t = infer_node(e);
    node_types.emplace_back(&e, t);
    return t;
  }

  int infer_node(const Expr& e) {
    using T = Unifier::T;
    Span sp = e.span;
    switch (e.kind) {
      case K::Var: return lookup(e.x, sp);
      case K::Triv: return u.mk(T::Unit);
      case K::Inl: return u.mk(T::Sum, base_var(e.x, sp), u.fresh());
      case K::Inr: return u.mk(T::Sum, u.fresh(), base_var(e.x, sp));
      case K::Pair: return u.mk(T::Prod, base_var(e.x, sp), base_var(e.y, sp));
      case K::Nil: return u.mk(T::List, u.fresh());
      case K::Tick: return u.mk(T::Unit);
      case K::Error: return u.fresh();
      case K::Cons: {
        int h = base_var(e.x, sp);
        int t = base_var(e.y, sp);
        u.unify(t, u.mk(T::List, h), sp);
        return t;
      }
      case K::CaseSum: {
        int a = u.fresh(), b = u.fresh();
        u.unify(base_var(e.x, sp), u.mk(T::Sum, a, b), sp);
        int r1, r2;
        {
          Bind g(*this, {{e.y1, a}});
          r1 = infer(*e.e1);
        }
        {
          Bind g(*this, {{e.y2, b}});
          r2 = infer(*e.e2);
        }
        u.unify(r1, r2, sp);
        return r1;
      }
      case K::CasePair: {
        int a = u.fresh(), b = u.fresh();
        u.unify(base_var(e.x, sp), u.mk(T::Prod, a, b), sp);
        Bind g(*this, {{e.y1, a}, {e.y2, b}});
        return infer(*e.e1);
      }
      case K::CaseList: {
        int a = u.fresh();
        int l = u.mk(T::List, a);
        u.unify(base_var(e.x, sp), l, sp);
        int r1 = infer(*e.e1);
        int r2;
        {
          Bind g(*this, {{e.y1, a}, {e.y2, l}});
          r2 = infer(*e.e2);
        }
        u.unify(r1, r2, sp);
        return r1;
      }
      case K::Fun: {
        int a = u.fresh(), r = u.fresh();
        int arrow = u.mk(T::Arrow, a, r);
        Bind g(*this, {{e.f, arrow}, {e.y1, a}});
        u.unify(infer(*e.e1), r, sp);
        return arrow;
      }
      case K::Lambda: {
        int a = u.from_base(*e.type);
        Bind g(*this, {{e.y1, a}});
        int r = infer(*e.e1);
        return u.mk(T::Arrow, a, r);
      }
      case K::App: {
        int r = u.fresh();
        int f = lookup(e.f, sp);
        u.unify(f, u.mk(T::Arrow, base_var(e.x, sp), r), sp);
        return r;
      }
      case K::Let: {
        int t1 = infer(*e.e1);
        Bind g(*this, {{e.y1, t1}});
        return infer(*e.e2);
      }
      case K::Share: {
        int t = lookup(e.x, sp);
        Bind g(*this, {{e.y1, t}, {e.y2, t}});
        return infer(*e.e1);
      }
      case K::Rec: {
        int a = u.fresh();
        int l = u.mk(T::List, a);
        u.unify(base_var(e.x, sp), l, sp);
        int r0 = infer(*e.e1);
        Bind g(*this, {{e.y1, a}, {e.y2, l}, {e.y3, r0}});
        u.unify(infer(*e.e2), r0, sp);
        return r0;
      }
    }
    throw std::logic_error("unknown expression kind");
  }

  int base_var(const std::string& x, Span sp) {
    int t = lookup(x, sp);
    if (u.is_arrow(t)) throw TypeError("function '" + x + "' used as a value", sp);
    return t;
  }
};

// Affinity and the Rec scoping rule, on fully resolved types.
class AffinityCheck {
 public:
  const TypeInfo& info;
  std::vector<std::pair<std::string, bool>> env;  // name -> is base type

  using Counts = std::map<std::string, int>;

  bool is_base(const std::string& x) const {
    for (auto it = env.rbegin(); it != env.rend(); ++it)
      if (it->first == x) return it->second;
    return false;
  }

  static void add(Counts& c, const Counts& d) {
    for (auto& [k, v] : d) c[k] += v;
  }
  static Counts join(const Counts& a, const Counts& b) {
    Counts c = a;
    for (auto& [k, v] : b) c[k] = std::max(c[k], v);
    return c;
  }
  void use(Counts& c, const std::string& x) const {
    if (is_base(x)) c[x] += 1;
  }

  Counts scoped(const Expr& body, std::initializer_list<std::pair<const std::string*, bool>> binders) {
    std::size_t mark = env.size();
    for (auto& [n, b] : binders) env.emplace_back(*n, b);
    Counts c = count(body);
    env.resize(mark);
    for (auto& [n, b] : binders) {
      auto it = c.find(*n);
      if (it != c.end()) {
        if (it->second > 1)
          throw AffinityError("variable '" + *n + "' is used more than once; duplicate it with share", body.span);
        c.erase(it);
      }
    }
    return c;
  }

  Counts count(const Expr& e) {
    Counts c;
    switch (e.kind) {
      case K::Var:
      case K::Inl:
      case K::Inr: use(c, e.x); break;
      case K::Pair:
      case K::Cons:
        use(c, e.x);
        use(c, e.y);
        break;
      case K::App: use(c, e.x); break;
      case K::Triv:
      case K::Nil:
      case K::Tick:
      case K::Error: break;
      case K::CaseSum:
        use(c, e.x);
        add(c, join(scoped(*e.e1, {{&e.y1, true}}), scoped(*e.e2, {{&e.y2, true}})));
        break;
      case K::CasePair:
        use(c, e.x);
        add(c, scoped(*e.e1, {{&e.y1, true}, {&e.y2, true}}));
        break;
      case K::CaseList:
        use(c, e.x);
        add(c, join(count(*e.e1), scoped(*e.e2, {{&e.y1, true}, {&e.y2, true}})));
        break;
      case K::Fun:
      case K::Lambda: {
        Counts body = e.kind == K::Fun ? scoped(*e.e1, {{&e.f, false}, {&e.y1, true}})
                                       : scoped(*e.e1, {{&e.y1, true}});
        for (auto& [k, v] : body) {
          if (v > 1)
            throw AffinityError("variable '" + k + "' is used more than once; duplicate it with share", e.span);
          c[k] += 1;
        }
        break;
      }
      case K::Let: {
        bool b = !info.of(*e.e1).is_arrow();
        add(c, count(*e.e1));
        add(c, scoped(*e.e2, {{&e.y1, b}}));
        break;
      }
      case K::Share: {
        bool b = is_base(e.x);
        use(c, e.x);
        add(c, scoped(*e.e1, {{&e.y1, b}, {&e.y2, b}}));
        break;
      }
      case K::Rec: {
        use(c, e.x);
        add(c, count(*e.e1));
        Counts step = scoped(*e.e2, {{&e.y1, true}, {&e.y2, true}, {&e.y3, true}});
        if (!step.empty())
          throw TypeError("the step of rec may only mention its bound variables, but uses '" +
                              step.begin()->first + "'",
                          e.e2->span);
        break;
      }
    }
    return c;
  }
};

}  // namespace

SimpleType typecheck(const TypingContext& ctx, const ExprPtr& e, TypeInfo* info) {
  Inference inf;
  for (auto& [n, t] : ctx) inf.env.emplace_back(n, inf.u.from_simple(t));
  int root = inf.infer(*e);
  TypeInfo local;
  TypeInfo& out = info ? *info : local;
  for (auto& [node, t] : inf.node_types) out.types.insert_or_assign(node, inf.u.to_simple(t, node->span));
  AffinityCheck aff{out, {}};
  for (auto& [n, t] : ctx) aff.env.emplace_back(n, !t.is_arrow());
  auto counts = aff.count(*e);
  for (auto& [k, v] : counts)
    if (v > 1) throw AffinityError("variable '" + k + "' is used more than once; duplicate it with share", e->span);
  return inf.u.to_simple(root, e->span);
}

const SimpleType& CheckedProgram::def_type(const std::string& name) const {
  const Definition* d = program.find(name);
  if (!d) throw std::invalid_argument("no definition named '" + name + "'");
  return info.of(*d->fn);
}

CheckedProgram check_program(Program p) {
  CheckedProgram cp;
  cp.program = std::move(p);
  cp.expr = cp.program.to_expr();
  for (auto& [n, t] : cp.program.params) cp.context.emplace_back(n, SimpleType::base(t));
  cp.type = typecheck(cp.context, cp.expr, &cp.info);
  return cp;
}

BinderTypes binder_types(const TypingContext& ctx, const Expr& root, const TypeInfo& info) {
  BinderTypes out;
  for (auto& [n, t] : ctx) out.types.insert_or_assign(n, t);
  auto base = [](const TypePtr& t) { return SimpleType::base(t); };
  // Walk in pre-order; scrutinee types are resolved through earlier binders.
  std::function<void(const Expr&)> walk = [&](const Expr& e) {
    auto ty = [&](const std::string& x) -> TypePtr {
      auto it = out.types.find(x);
      if (it == out.types.end() || it->second.is_arrow()) throw std::logic_error("unknown base variable " + x);
      return it->second.dom;
    };
    switch (e.kind) {
      case K::CaseSum: {
        TypePtr t = ty(e.x);
        out.types.insert_or_assign(e.y1, base(t->left));
        out.types.insert_or_assign(e.y2, base(t->right));
        walk(*e.e1);
        walk(*e.e2);
        break;
      }
      case K::CasePair: {
        TypePtr t = ty(e.x);
        out.types.insert_or_assign(e.y1, base(t->left));
        out.types.insert_or_assign(e.y2, base(t->right));
        walk(*e.e1);
        break;
      }
      case K::CaseList: {
        TypePtr t = ty(e.x);
        out.types.insert_or_assign(e.y1, base(t->elem()));
        out.types.insert_or_assign(e.y2, base(t));
        walk(*e.e1);
        walk(*e.e2);
        break;
      }
      case K::Fun: {
        const SimpleType& ft = info.of(e);
        out.types.insert_or_assign(e.f, ft);
        out.types.insert_or_assign(e.y1, base(ft.dom));
        walk(*e.e1);
        break;
      }
      case K::Lambda:
        out.types.insert_or_assign(e.y1, base(e.type));
        walk(*e.e1);
        break;
      case K::Let:
        walk(*e.e1);
        out.types.insert_or_assign(e.y1, info.of(*e.e1));
        walk(*e.e2);
        break;
      case K::Share: {
        SimpleType t = out.types.at(e.x);
        out.types.insert_or_assign(e.y1, t);
        out.types.insert_or_assign(e.y2, t);
        walk(*e.e1);
        break;
      }
      case K::Rec: {
        TypePtr t = ty(e.x);
        walk(*e.e1);
        out.types.insert_or_assign(e.y1, base(t->elem()));
        out.types.insert_or_assign(e.y2, base(t));
        out.types.insert_or_assign(e.y3, info.of(e));
        walk(*e.e2);
        break;
      }
      default: break;
    }
  };
  walk(root);
  return out;
}

}  // namespace aara
