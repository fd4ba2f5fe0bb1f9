#include "aara/uni.hpp"

#include "analysis.hpp"

#include <functional>
#include <map>
#include <sstream>

namespace aara {
namespace {

using K = Expr::Kind;
using detail::rule_cost;
using detail::Untypable;
using detail::where;

// Annotated base type whose coefficients are linear expressions over LP unknowns.
struct UAnn;
using UA = std::shared_ptr<const UAnn>;
struct UAnn {
  BaseType::Kind kind;
  UA l, r;
  std::vector<LinExpr> q;  // List: entry i pairs with C(n, i + 1)
};

UA mk(BaseType::Kind k, UA l, UA r, std::vector<LinExpr> q = {}) {
  return std::make_shared<const UAnn>(UAnn{k, std::move(l), std::move(r), std::move(q)});
}

std::vector<LinExpr> shift(const std::vector<LinExpr>& q) {
  std::vector<LinExpr> out(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) out[i] = i + 1 < q.size() ? q[i] + q[i + 1] : q[i];
  return out;
}

UA shifted_list(const UA& a) { return mk(BaseType::Kind::List, a->l, nullptr, shift(a->q)); }

struct Sig {
  UA in;
  LinExpr p;
  UA out;
  LinExpr q;
};

struct FunDef;
struct Frame {
  Sig sig;
  bool mono;
};

struct Binding {
  UA ann;                               // base-typed variable
  std::shared_ptr<const FunDef> fn;     // arrow-typed variable
  std::shared_ptr<const Frame> self;    // set inside the body of fn itself
};
using Ctx = std::map<std::string, Binding>;

struct FunDef {
  const Expr* node;
  Ctx ctx;  // arrow bindings visible at the definition
};

class Engine {
 public:
  Engine(const TypeInfo& info, unsigned degree, std::size_t budget) : info_(info), d_(degree), budget_(budget) {}

  LpProblem lp;
  std::size_t copies = 0;

  unsigned degree() const { return d_; }

  LinExpr fresh_const(const std::string& tag) { return lp.var(tag); }

  // Coefficients of degree above k are fixed to zero.
  UA fresh(const BaseType& t, unsigned k, const std::string& tag) {
    switch (t.kind) {
      case BaseType::Kind::Unit: return mk(t.kind, nullptr, nullptr);
      case BaseType::Kind::Sum:
      case BaseType::Kind::Prod: return mk(t.kind, fresh(*t.left, k, tag), fresh(*t.right, k, tag));
      case BaseType::Kind::List: {
        std::vector<LinExpr> q(d_);
        for (unsigned i = 0; i < d_; ++i)
          if (i + 1 <= k) q[i] = lp.var(tag);
        return mk(t.kind, fresh(*t.left, k, tag), nullptr, std::move(q));
      }
    }
    return nullptr;
  }
  UA fresh(const BaseType& t, const std::string& tag) { return fresh(t, d_, tag); }
  UA fresh_like(const UA& a, const std::string& tag) {
    if (a->kind == BaseType::Kind::Unit) return a;
    if (a->kind != BaseType::Kind::List) return mk(a->kind, fresh_like(a->l, tag), fresh_like(a->r, tag));
    std::vector<LinExpr> q(a->q.size());
    for (auto& c : q) c = lp.var(tag);
    return mk(a->kind, fresh_like(a->l, tag), nullptr, std::move(q));
  }

  // a >= b pointwise (subtyping on base types).
  void ge(const UA& a, const UA& b, const std::string& tag) {
    if (a->kind == BaseType::Kind::Unit) return;
    if (a->kind == BaseType::Kind::List) {
      for (std::size_t i = 0; i < a->q.size(); ++i) lp.ge(a->q[i], b->q[i], tag);
      ge(a->l, b->l, tag);
      return;
    }
    ge(a->l, b->l, tag);
    ge(a->r, b->r, tag);
  }

  // a >= b + c pointwise (sharing).
  void ge_sum(const UA& a, const UA& b, const UA& c, const std::string& tag) {
    if (a->kind == BaseType::Kind::Unit) return;
    if (a->kind == BaseType::Kind::List) {
      for (std::size_t i = 0; i < a->q.size(); ++i) lp.ge(a->q[i], b->q[i] + c->q[i], tag);
      ge_sum(a->l, b->l, c->l, tag);
      return;
    }
    ge_sum(a->l, b->l, c->l, tag);
    ge_sum(a->r, b->r, c->r, tag);
  }

  static UA add(const UA& a, const UA& b) {
    if (a->kind == BaseType::Kind::Unit) return a;
    if (a->kind != BaseType::Kind::List) return mk(a->kind, add(a->l, b->l), add(a->r, b->r));
    std::vector<LinExpr> q(a->q.size());
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = a->q[i] + b->q[i];
    return mk(a->kind, add(a->l, b->l), nullptr, std::move(q));
  }

  Sig fresh_sig(const Expr& fn, unsigned k, const std::string& tag) {
    const SimpleType& t = info_.of(fn);
    return {fresh(*t.dom, k, tag + ".in"), fresh_const(tag + ".p"), fresh(*t.cod, k, tag + ".out"),
            fresh_const(tag + ".q")};
  }

  // Derivation of fd's body at signature s.
  void body(const std::shared_ptr<const FunDef>& fd, const Sig& s, CostMetric m, bool mono) {
    if (++copies > budget_)
      throw Untypable("derivation budget exceeded (" + std::to_string(budget_) + " function-body copies)");
    const Expr& fn = *fd->node;
    Ctx g = fd->ctx;
    if (fn.kind == K::Fun) g[fn.f] = Binding{nullptr, fd, std::make_shared<const Frame>(Frame{s, mono})};
    g[fn.y1] = Binding{s.in, nullptr, nullptr};
    check(*fn.e1, g, s.p, s.out, s.q, m);
  }

  // Binding for an arrow-typed let right-hand side, and the cost of evaluating it.
  std::pair<Binding, Rational> arrow_binding(const Expr& e, const Ctx& g, CostMetric m) {
    if (e.kind == K::Fun || e.kind == K::Lambda) {
      Ctx arrows;
      for (auto& [n, b] : g)
        if (b.fn) arrows.emplace(n, b);
      return {Binding{nullptr, std::make_shared<const FunDef>(FunDef{&e, std::move(arrows)}), nullptr},
              rule_cost(e, m)};
    }
    if (e.kind == K::Var) return {lookup(g, e.x), rule_cost(e, m)};
    throw AnalysisUnsupported("arrow-typed expression other than fun, lambda or variable" + where(e));
  }

  static const Binding& lookup(const Ctx& g, const std::string& x) {
    auto it = g.find(x);
    if (it == g.end()) throw std::logic_error("unbound variable '" + x + "' during analysis");
    return it->second;
  }

  // Check mode: with g and constant q available, e must produce tau and leave p.
  void check(const Expr& e, const Ctx& g, const LinExpr& q, const UA& tau, const LinExpr& p, CostMetric m) {
    Rational k = rule_cost(e, m);
    std::string tag = rule_name(e) + where(e);
    auto leaf = [&] { lp.ge(q - p, k, tag); };
    auto premise = [&](const LinExpr& extra = LinExpr()) {
      LinExpr rest = q - k + extra;
      if (k > 0) lp.ge(q, k, tag);
      return rest;
    };
    switch (e.kind) {
      case K::Var:
        ge(lookup(g, e.x).ann, tau, tag);
        leaf();
        return;
      case K::Triv:
      case K::Nil:
      case K::Tick:
        leaf();
        return;
      case K::Error: return;
      case K::Inl:
        ge(lookup(g, e.x).ann, tau->l, tag);
        leaf();
        return;
      case K::Inr:
        ge(lookup(g, e.x).ann, tau->r, tag);
        leaf();
        return;
      case K::Pair:
        ge(lookup(g, e.x).ann, tau->l, tag);
        ge(lookup(g, e.y).ann, tau->r, tag);
        leaf();
        return;
      case K::Cons: {
        ge(lookup(g, e.x).ann, tau->l, tag);
        ge(lookup(g, e.y).ann, shifted_list(tau), tag);
        LinExpr head = tau->q.empty() ? LinExpr() : tau->q[0];
        lp.ge(q - p, head + k, tag);
        return;
      }
      case K::App: {
        const Binding& f = lookup(g, e.f);
        if (!f.fn) throw std::logic_error("application of a base-typed variable");
        Sig s = call_sig(f, e, m);
        ge(lookup(g, e.x).ann, s.in, tag);
        ge(s.out, tau, tag);
        lp.ge(q, s.p + k, tag);
        lp.ge(q - p, s.p - s.q + k, tag);
        return;
      }
      case K::CaseSum: {
        UA a = lookup(g, e.x).ann;
        LinExpr rest = premise();
        Ctx gl = g, gr = g;
        gl.erase(e.x);
        gr.erase(e.x);
        gl[e.y1] = Binding{a->l, nullptr, nullptr};
        gr[e.y2] = Binding{a->r, nullptr, nullptr};
        check(*e.e1, gl, rest, tau, p, m);
        check(*e.e2, gr, rest, tau, p, m);
        return;
      }
      case K::CasePair: {
        UA a = lookup(g, e.x).ann;
        LinExpr rest = premise();
        Ctx g1 = g;
        g1.erase(e.x);
        g1[e.y1] = Binding{a->l, nullptr, nullptr};
        g1[e.y2] = Binding{a->r, nullptr, nullptr};
        check(*e.e1, g1, rest, tau, p, m);
        return;
      }
      case K::CaseList: {
        UA a = lookup(g, e.x).ann;
        LinExpr rest = premise();
        Ctx gn = g;
        gn.erase(e.x);
        Ctx gc = gn;
        gc[e.y1] = Binding{a->l, nullptr, nullptr};
        gc[e.y2] = Binding{shifted_list(a), nullptr, nullptr};
        check(*e.e1, gn, rest, tau, p, m);
        check(*e.e2, gc, a->q.empty() ? rest : rest + a->q[0], tau, p, m);
        return;
      }
      case K::Let: {
        if (info_.of(*e.e1).is_arrow()) {
          auto [b, c1] = arrow_binding(*e.e1, g, m);
          Ctx g2 = g;
          g2[e.y1] = b;
          LinExpr rest = q - k - c1;
          if (k + c1 > 0) lp.ge(q, k + c1, tag);
          check(*e.e2, g2, rest, tau, p, m);
          return;
        }
        UA t1 = fresh(*info_.base_of(*e.e1), "let " + e.y1 + where(e));
        LinExpr p1 = fresh_const("let " + e.y1 + where(e) + ".p");
        check(*e.e1, g, premise(), t1, p1, m);
        Ctx g2 = g;
        g2[e.y1] = Binding{t1, nullptr, nullptr};
        check(*e.e2, g2, p1, tau, p, m);
        return;
      }
      case K::Share: {
        const Binding& b = lookup(g, e.x);
        Ctx g1 = g;
        g1.erase(e.x);
        if (b.fn) {
          g1[e.y1] = b;
          g1[e.y2] = b;
        } else {
          UA a1 = fresh_like(b.ann, "share " + e.y1 + where(e));
          UA a2 = fresh_like(b.ann, "share " + e.y2 + where(e));
          ge_sum(b.ann, a1, a2, tag);
          g1[e.y1] = Binding{a1, nullptr, nullptr};
          g1[e.y2] = Binding{a2, nullptr, nullptr};
        }
        check(*e.e1, g1, premise(), tau, p, m);
        return;
      }
      case K::Fun:
      case K::Lambda:
        throw AnalysisUnsupported("function in a base-typed position" + where(e));
      case K::Rec: throw std::logic_error("rec must be desugared before analysis");
    }
  }

  // Recursive calls use the caller's signature plus a cost-free one of lower degree;
  // other calls get a signature of their own.
  Sig call_sig(const Binding& f, const Expr& at, CostMetric m) {
    std::string tag = "call " + at.f + where(at);
    if (f.self) {
      const Frame& fr = *f.self;
      if (fr.mono || d_ == 0) return fr.sig;
      Sig dsig = fresh_sig(*f.fn->node, d_ - 1, tag + ".cf");
      body(f.fn, dsig, CostMetric::CostFree, true);
      return {add(fr.sig.in, dsig.in), fr.sig.p + dsig.p, add(fr.sig.out, dsig.out), fr.sig.q + dsig.q};
    }
    Sig s = fresh_sig(*f.fn->node, d_, tag);
    body(f.fn, s, m, m == CostMetric::CostFree);
    return s;
  }

 private:
  const TypeInfo& info_;
  unsigned d_;
  std::size_t budget_;

  static std::string rule_name(const Expr& e) {
    switch (e.kind) {
      case K::Var: return "U:Var";
      case K::Triv: return "U:Unit";
      case K::Inl: return "U:SumL";
      case K::Inr: return "U:SumR";
      case K::Pair: return "U:Pair";
      case K::Nil: return "U:Nil";
      case K::Cons: return "U:Cons";
      case K::App: return "U:App";
      case K::CaseSum: return "U:Case-Sum";
      case K::CasePair: return "U:Case-Prod";
      case K::CaseList: return "U:Case-List";
      case K::Let: return "U:Let";
      case K::Share: return "U:Share";
      case K::Tick: return "U:Tick";
      default: return "U:?";
    }
  }
};

UA constant_ua(const AnnotBase& a, unsigned d) {
  if (a.kind == BaseType::Kind::Unit) return mk(a.kind, nullptr, nullptr);
  if (a.kind != BaseType::Kind::List) return mk(a.kind, constant_ua(*a.left, d), constant_ua(*a.right, d));
  if (a.q.size() > d) throw std::invalid_argument("annotation " + to_string(a) + " exceeds degree " + std::to_string(d));
  std::vector<LinExpr> q(d);
  for (std::size_t i = 0; i < a.q.size(); ++i) q[i] = a.q[i];
  return mk(a.kind, constant_ua(*a.left, d), nullptr, std::move(q));
}

AnnotPtr solved(const UA& a, const LpSolution& s) {
  switch (a->kind) {
    case BaseType::Kind::Unit: return AnnotBase::unit();
    case BaseType::Kind::Sum: return AnnotBase::sum(solved(a->l, s), solved(a->r, s));
    case BaseType::Kind::Prod: return AnnotBase::prod(solved(a->l, s), solved(a->r, s));
    case BaseType::Kind::List: {
      UniVec q;
      for (auto& c : a->q) q.push_back(s.eval(c));
      return AnnotBase::list(std::move(q), solved(a->l, s));
    }
  }
  return nullptr;
}

void objective(const UA& a, LinExpr& obj, const std::function<Rational(std::size_t)>& w) {
  if (a->kind == BaseType::Kind::Unit) return;
  if (a->kind == BaseType::Kind::List)
    for (std::size_t i = 0; i < a->q.size(); ++i) obj += a->q[i] * w(i + 1);
  objective(a->l, obj, w);
  if (a->r) objective(a->r, obj, w);
}

void pin(Engine& en, const UA& a, const UA& v) {
  if (a->kind == BaseType::Kind::Unit) return;
  if (a->kind == BaseType::Kind::List)
    for (std::size_t i = 0; i < a->q.size(); ++i) en.lp.eq(a->q[i], v->q[i], "pin");
  pin(en, a->l, v->l);
  if (a->r) pin(en, a->r, v->r);
}

// Top-level templates of one analysis.
struct Top {
  std::vector<std::pair<std::string, UA>> inputs;
  LinExpr p;
  UA out;
  LinExpr q;
};

Top build(Engine& en, const CheckedProgram& cp, const detail::Prepared& pr, CostMetric m) {
  Top top;
  top.p = en.fresh_const("P");
  top.q = en.fresh_const("Q");
  const Program& prog = cp.program;
  if (prog.main) {
    Ctx g;
    for (auto& [n, t] : prog.params) {
      UA a = en.fresh(*t, "input " + n);
      top.inputs.emplace_back(n, a);
      g[n] = Binding{a, nullptr, nullptr};
    }
    top.out = en.fresh(*cp.type.dom, "output");
    en.check(*pr.expr, g, top.p, top.out, top.q, m);
    return top;
  }
  // Entry function: walk the definitions, then derive its body.
  Ctx g;
  const Expr* e = pr.expr.get();
  LinExpr avail = top.p;
  while (e->kind == K::Let) {
    auto [b, c1] = en.arrow_binding(*e->e1, g, m);
    avail -= rule_cost(*e, m) + c1;
    g[e->y1] = b;
    e = e->e2.get();
  }
  avail -= rule_cost(*e, m);  // the entry variable itself
  en.lp.ge(avail, 0, "definitions");
  const Binding& f = Engine::lookup(g, e->x);
  const SimpleType& t = pr.info.of(*f.fn->node);
  top.inputs.emplace_back(f.fn->node->y1, en.fresh(*t.dom, "input"));
  top.out = en.fresh(*t.cod, "output");
  en.body(f.fn, Sig{top.inputs[0].second, avail, top.out, top.q}, m, m == CostMetric::CostFree);
  return top;
}

UniResult run(const CheckedProgram& cp, const UniOptions& opt, const UniJudgment* pinned) {
  UniResult res;
  try {
    detail::Prepared pr = detail::prepare(cp);
    Engine en(pr.info, opt.degree, opt.max_body_copies);
    Top top = build(en, cp, pr, opt.metric);
    if (opt.require_output) en.ge(top.out, constant_ua(**opt.require_output, opt.degree), "required output");
    LinExpr obj;
    if (pinned) {
      if (pinned->inputs.size() != top.inputs.size()) throw std::invalid_argument("judgment has the wrong number of inputs");
      for (std::size_t i = 0; i < top.inputs.size(); ++i)
        pin(en, top.inputs[i].second, constant_ua(*pinned->inputs[i].second, opt.degree));
      pin(en, top.out, constant_ua(*pinned->out, opt.degree));
      en.lp.eq(top.p, pinned->p, "pin");
      en.lp.eq(top.q, pinned->q, "pin");
    } else {
      for (auto& [n, a] : top.inputs) objective(a, obj, detail::degree_weight);
      objective(top.out, obj, [](std::size_t) { return Rational(1); });
      obj += top.p + top.q;
    }
    en.lp.minimize(obj);
    res.stats.vars = en.lp.num_vars();
    res.stats.constraints = en.lp.constraints().size();
    res.stats.body_copies = en.copies;
    if (opt.keep_lp) res.lp_dump = en.lp.dump();
    LpSolution s = solve(en.lp);
    res.stats.pivots = s.pivots;
    if (s.status != LpStatus::Optimal) {
      res.reason = s.status == LpStatus::Infeasible ? "no derivation at degree " + std::to_string(opt.degree)
                                                    : "LP unbounded";
      if (!s.reason.empty()) res.reason += " (" + s.reason + ")";
      return res;
    }
    res.ok = true;
    res.objective = s.objective;
    for (auto& [n, a] : top.inputs) res.judgment.inputs.emplace_back(n, solved(a, s));
    res.judgment.p = s.eval(top.p);
    res.judgment.out = solved(top.out, s);
    res.judgment.q = s.eval(top.q);
  } catch (const Untypable& e) {
    res.reason = e.what();
  } catch (const AnalysisUnsupported& e) {
    res.reason = e.what();
  } catch (const UnsupportedType& e) {
    res.reason = e.what();
  }
  return res;
}

unsigned judgment_degree(const AnnotBase& a) {
  switch (a.kind) {
    case BaseType::Kind::Unit: return 0;
    case BaseType::Kind::List: return std::max<unsigned>(static_cast<unsigned>(a.q.size()), judgment_degree(*a.left));
    default: return std::max(judgment_degree(*a.left), judgment_degree(*a.right));
  }
}

}  // namespace

std::string to_string(const UniJudgment& j) {
  std::ostringstream os;
  os << "<";
  for (std::size_t i = 0; i < j.inputs.size(); ++i)
    os << (i ? ", " : "") << j.inputs[i].first << " : " << to_string(*j.inputs[i].second);
  os << "; " << to_string(j.p) << "> -> <" << to_string(*j.out) << ", " << to_string(j.q) << ">";
  return os.str();
}

UniResult infer_uni(const CheckedProgram& cp, const UniOptions& opt) {
  if (opt.degree < 1) throw std::invalid_argument("degree must be at least 1");
  UniResult r = run(cp, opt, nullptr);
  if (!r.ok && opt.probe_higher_degree && opt.degree < 6) {
    UniOptions up = opt;
    up.degree = opt.degree + 1;
    up.probe_higher_degree = false;
    up.keep_lp = false;
    if (run(cp, up, nullptr).ok) r.suggested_degree = up.degree;
  }
  return r;
}

bool check_uni(const CheckedProgram& cp, const UniJudgment& j, CostMetric metric, unsigned degree) {
  unsigned d = std::max(degree, judgment_degree(*j.out));
  for (auto& [n, a] : j.inputs) d = std::max(d, judgment_degree(*a));
  UniOptions opt;
  opt.degree = std::max(d, 1u);
  opt.metric = metric;
  return run(cp, opt, &j).ok;
}

Rational input_potential(const UniJudgment& j, const std::vector<ValuePtr>& inputs) {
  if (inputs.size() != j.inputs.size()) throw std::invalid_argument("wrong number of inputs");
  Rational phi = j.p;
  for (std::size_t i = 0; i < inputs.size(); ++i) phi += potential_uni(*inputs[i], *j.inputs[i].second);
  return phi;
}

SoundnessReport soundness_probe(const CheckedProgram& cp, const UniJudgment& j, CostMetric metric,
                                const std::vector<std::vector<ValuePtr>>& inputs) {
  SoundnessReport rep;
  bool first = true;
  for (auto& in : inputs) {
    EvalResult r;
    try {
      r = run_program(cp, in, metric);
    } catch (const EvalError&) {
      ++rep.skipped;
      continue;
    }
    ++rep.runs;
    Rational slack = input_potential(j, in) - j.q - potential_uni(*r.value, *j.out) - r.cost;
    if (first || slack < rep.min_slack) rep.min_slack = slack;
    first = false;
    if (slack < 0 && rep.violations++ == 0) {
      std::ostringstream os;
      os << "cost " << to_string(r.cost) << " exceeds bound on input";
      for (auto& v : in) os << " " << to_string(*v);
      rep.first_violation = os.str();
    }
  }
  return rep;
}

}  // namespace aara
