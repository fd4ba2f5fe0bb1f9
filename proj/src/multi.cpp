#include "aara/multi.hpp"

#include "analysis.hpp"

#include <algorithm>
#include <optional>
#include <sstream>
#include <unordered_map>

namespace aara {
namespace {

using K = Expr::Kind;
using detail::rule_cost;
using detail::Untypable;
using detail::where;
using MP = CoeffMap<LinExpr>;

struct Ctx {
  std::vector<std::string> names;
  std::vector<TypePtr> types;

  std::size_t pos(const std::string& x) const {
    auto it = std::find(names.begin(), names.end(), x);
    if (it == names.end()) throw std::logic_error("variable '" + x + "' missing from the analysis context");
    return static_cast<std::size_t>(it - names.begin());
  }
  bool has(const std::string& x) const { return std::find(names.begin(), names.end(), x) != names.end(); }
};

LinExpr at(const MP& m, const CtxIndex& i) {
  auto it = m.find(i);
  return it == m.end() ? LinExpr() : it->second;
}

template <class F>
MP remap(const MP& m, F&& f) {
  MP out;
  for (auto& [k, c] : m)
    if (std::optional<CtxIndex> t = f(k)) out[*t] += c;
  return out;
}

// Entries whose masked positions equal j (in position order), with those positions removed.
MP project(const MP& m, const std::vector<bool>& mask, const CtxIndex& j) {
  return remap(m, [&](const CtxIndex& src) -> std::optional<CtxIndex> {
    CtxIndex key;
    std::size_t n = 0;
    for (std::size_t p = 0; p < src.size(); ++p) {
      if (!mask[p]) {
        key.push_back(src[p]);
      } else if (!(src[p] == j[n++])) {
        return std::nullopt;
      }
    }
    return key;
  });
}

MP reorder(const MP& m, const Ctx& from, const Ctx& to) {
  std::vector<std::size_t> perm(to.names.size());
  for (std::size_t k = 0; k < perm.size(); ++k) perm[k] = from.pos(to.names[k]);
  return remap(m, [&](const CtxIndex& src) -> std::optional<CtxIndex> {
    CtxIndex key(perm.size());
    for (std::size_t k = 0; k < perm.size(); ++k) key[k] = src[perm[k]];
    return key;
  });
}

MP add(MP a, const MP& b) {
  for (auto& [k, c] : b) a[k] += c;
  return a;
}

struct MSig {
  TypePtr in_t;
  MP A;
  TypePtr out_t;
  MP B;
  unsigned k;
};

struct FunDef;
struct Frame {
  MSig sig;
};
struct Binding {
  std::shared_ptr<const FunDef> fn;
  std::shared_ptr<const Frame> self;
};
using Arrows = std::map<std::string, Binding>;
struct FunDef {
  const Expr* node;
  Arrows arrows;
  Ctx captured;  // base variables of the closure, carrying no potential
};

class Engine {
 public:
  Engine(const TypeInfo& info, unsigned degree, std::size_t budget) : info_(info), d_(degree), budget_(budget) {}

  LpProblem lp;
  std::size_t copies = 0;

  MP fresh(const std::vector<TypePtr>& ts, unsigned k, const std::string& tag) {
    MP m;
    for (auto& i : indexes_of(ts, k)) m.emplace(i, lp.var(tag));
    return m;
  }

  // have >= need pointwise, plus c at the zero index.
  void cover(const MP& have, const MP& need, const CtxIndex& zero, const Rational& c, const std::string& tag) {
    bool zero_seen = false;
    for (auto& [i, v] : need) {
      bool z = i == zero;
      zero_seen = zero_seen || z;
      lp.ge(at(have, i), z ? v + c : v, tag);
    }
    if (!zero_seen && c > 0) lp.ge(at(have, zero), c, tag);
  }

  MSig fresh_sig(const Expr& fn, unsigned k, const std::string& tag) {
    const SimpleType& t = info_.of(fn);
    return {t.dom, fresh({t.dom}, k, tag + ".in"), t.cod, fresh({t.cod}, k, tag + ".out"), k};
  }

  void body(const std::shared_ptr<const FunDef>& fd, const MSig& s, CostMetric m) {
    if (++copies > budget_)
      throw Untypable("derivation budget exceeded (" + std::to_string(budget_) + " function-body copies)");
    const Expr& fn = *fd->node;
    Arrows ar = fd->arrows;
    if (fn.kind == K::Fun) ar[fn.f] = Binding{fd, std::make_shared<const Frame>(Frame{s})};
    Ctx ctx;
    ctx.names.push_back(fn.y1);
    ctx.types.push_back(s.in_t);
    CtxIndex pad;
    for (std::size_t i = 0; i < fd->captured.names.size(); ++i) {
      ctx.names.push_back(fd->captured.names[i]);
      ctx.types.push_back(fd->captured.types[i]);
      pad.push_back(zero_index(*fd->captured.types[i]));
    }
    MP q = remap(s.A, [&](const CtxIndex& i) -> std::optional<CtxIndex> {
      CtxIndex key = i;
      key.insert(key.end(), pad.begin(), pad.end());
      return key;
    });
    check(*fn.e1, ctx, q, s.out_t, s.B, m, s.k, ar);
  }

  Binding arrow_binding(const Expr& e, const Ctx& ctx, const Arrows& ar) {
    if (e.kind == K::Fun || e.kind == K::Lambda) {
      Ctx cap;
      for (auto& v : fv(e))
        if (ctx.has(v)) {
          cap.names.push_back(v);
          cap.types.push_back(ctx.types[ctx.pos(v)]);
        }
      return Binding{std::make_shared<const FunDef>(FunDef{&e, ar, std::move(cap)}), nullptr};
    }
    if (e.kind == K::Var) return lookup(ar, e.x);
    throw AnalysisUnsupported("arrow-typed expression other than fun, lambda or variable" + where(e));
  }

  static const Binding& lookup(const Arrows& ar, const std::string& f) {
    auto it = ar.find(f);
    if (it == ar.end()) throw std::logic_error("unbound function '" + f + "' during analysis");
    return it->second;
  }

  // With ctx annotated by Q, e must produce <b, P>. Derivation degree k.
  void check(const Expr& e, Ctx ctx, MP Q, const TypePtr& b, const MP& P, CostMetric m, unsigned k,
             const Arrows& ar) {
    weaken(e, ctx, Q);
    Rational c = rule_cost(e, m);
    std::string tag = rule_name(e) + where(e);
    CtxIndex zero = zero_index(ctx.types);
    CtxIndex bzero{zero_index(*b)};
    // Premise annotation after paying c.
    auto pay = [&](MP r, const CtxIndex& z) {
      if (c > 0) lp.ge(at(Q, zero), c, tag);
      r[z] -= c;
      return r;
    };
    switch (e.kind) {
      case K::Var: cover(Q, P, zero, c, tag); return;
      case K::Triv:
      case K::Nil:
      case K::Tick: {
        MP need;
        need[zero] = at(P, bzero);
        cover(Q, need, zero, c, tag);
        return;
      }
      case K::Error: return;
      case K::Inl:
      case K::Inr: {
        Index::Kind side = e.kind == K::Inl ? Index::Kind::Inl : Index::Kind::Inr;
        const TypePtr& inner = e.kind == K::Inl ? b->left : b->right;
        MP need = remap(P, [&](const CtxIndex& i) -> std::optional<CtxIndex> {
          if (i[0].kind == Index::Kind::Star) return CtxIndex{zero_index(*inner)};
          if (i[0].kind == side) return CtxIndex{i[0].kids[0]};
          return std::nullopt;
        });
        cover(Q, need, zero, c, tag);
        return;
      }
      case K::Pair: {
        Ctx canon{{e.x, e.y}, {b->left, b->right}};
        MP need = remap(P, [](const CtxIndex& i) -> std::optional<CtxIndex> { return CtxIndex{i[0].kids[0], i[0].kids[1]}; });
        cover(Q, reorder(need, canon, ctx), zero, c, tag);
        return;
      }
      case K::Cons: {
        Ctx canon{{e.x, e.y}, {b->elem(), b}};
        MP need = push_forward(P, [&](const CtxIndex& i) { return shift_image(i, 0, *b->elem()); });
        cover(Q, reorder(need, canon, ctx), zero, c, tag);
        return;
      }
      case K::App: {
        MSig s = call_sig(lookup(ar, e.f), e, m, k);
        for (auto& [i, v] : s.A)
          if (!(i == zero)) lp.ge(at(Q, i), v, tag);
        for (auto& [i, v] : P)
          if (!(i == bzero)) lp.ge(at(s.B, i), v, tag);
        LinExpr a0 = at(s.A, zero), b0 = at(s.B, bzero);
        lp.ge(at(Q, zero), a0 + c, tag);
        lp.ge(at(Q, zero) - at(P, bzero), a0 - b0 + c, tag);
        return;
      }
      case K::CaseSum: {
        std::size_t p = ctx.pos(e.x);
        TypePtr t = ctx.types[p];
        for (int side = 0; side < 2; ++side) {
          Index::Kind want = side == 0 ? Index::Kind::Inl : Index::Kind::Inr;
          const TypePtr& inner = side == 0 ? t->left : t->right;
          MP r = remap(Q, [&](const CtxIndex& i) -> std::optional<CtxIndex> {
            CtxIndex key = i;
            if (i[p].kind == Index::Kind::Star)
              key[p] = zero_index(*inner);
            else if (i[p].kind == want)
              key[p] = i[p].kids[0];
            else
              return std::nullopt;
            return key;
          });
          Ctx c2 = ctx;
          c2.names[p] = side == 0 ? e.y1 : e.y2;
          c2.types[p] = inner;
          check(side == 0 ? *e.e1 : *e.e2, c2, pay(r, zero_index(c2.types)), b, P, m, k, ar);
        }
        return;
      }
      case K::CasePair: {
        std::size_t p = ctx.pos(e.x);
        TypePtr t = ctx.types[p];
        MP r = remap(Q, [&](const CtxIndex& i) -> std::optional<CtxIndex> {
          CtxIndex key(i.begin(), i.begin() + static_cast<long>(p));
          key.push_back(i[p].kids[0]);
          key.push_back(i[p].kids[1]);
          key.insert(key.end(), i.begin() + static_cast<long>(p) + 1, i.end());
          return key;
        });
        Ctx c2 = ctx;
        c2.names[p] = e.y1;
        c2.types[p] = t->left;
        c2.names.insert(c2.names.begin() + static_cast<long>(p) + 1, e.y2);
        c2.types.insert(c2.types.begin() + static_cast<long>(p) + 1, t->right);
        check(*e.e1, c2, pay(r, zero_index(c2.types)), b, P, m, k, ar);
        return;
      }
      case K::CaseList: {
        std::size_t p = ctx.pos(e.x);
        TypePtr t = ctx.types[p];
        std::vector<bool> mask(ctx.names.size(), false);
        mask[p] = true;
        Ctx cn = ctx;
        cn.names.erase(cn.names.begin() + static_cast<long>(p));
        cn.types.erase(cn.types.begin() + static_cast<long>(p));
        check(*e.e1, cn, pay(project(Q, mask, {zero_index(*t)}), zero_index(cn.types)), b, P, m, k, ar);
        MP r = push_forward(Q, [&](const CtxIndex& i) { return shift_image(i, p, *t->elem()); });
        Ctx cc = ctx;
        cc.names[p] = e.y1;
        cc.types[p] = t->elem();
        cc.names.insert(cc.names.begin() + static_cast<long>(p) + 1, e.y2);
        cc.types.insert(cc.types.begin() + static_cast<long>(p) + 1, t);
        check(*e.e2, cc, pay(r, zero_index(cc.types)), b, P, m, k, ar);
        return;
      }
      case K::Let: let(e, ctx, Q, b, P, m, k, ar, c, tag); return;
      case K::Share: {
        if (!ctx.has(e.x)) {
          Arrows a2 = ar;
          const Binding& f = lookup(ar, e.x);
          a2[e.y1] = f;
          a2[e.y2] = f;
          check(*e.e1, ctx, Q, b, P, m, k, a2);
          return;
        }
        std::size_t p = ctx.pos(e.x);
        TypePtr t = ctx.types[p];
        Ctx c2 = ctx;
        c2.names[p] = e.y1;
        c2.names.insert(c2.names.begin() + static_cast<long>(p) + 1, e.y2);
        c2.types.insert(c2.types.begin() + static_cast<long>(p) + 1, t);
        MP r = fresh(c2.types, k, "share " + e.y1 + where(e));
        MP pushed = push_forward(r, [&](const CtxIndex& i) { return share_image(i, p, p + 1, *t); });
        cover(Q, pushed, zero, 0, tag);
        check(*e.e1, c2, r, b, P, m, k, ar);
        return;
      }
      case K::Fun:
      case K::Lambda: throw AnalysisUnsupported("function in a base-typed position" + where(e));
      case K::Rec: throw std::logic_error("rec must be desugared before analysis");
    }
  }

  MSig call_sig(const Binding& f, const Expr& at_node, CostMetric m, unsigned k) {
    if (!f.fn) throw std::logic_error("application of a non-function");
    std::string tag = "call " + at_node.f + where(at_node);
    if (f.self && f.self->sig.k == k) {
      const MSig& s = f.self->sig;
      if (k == 0) return s;
      MSig dsig = fresh_sig(*f.fn->node, k - 1, tag + ".cf");
      body(f.fn, dsig, CostMetric::CostFree);
      return {s.in_t, add(s.A, dsig.A), s.out_t, add(s.B, dsig.B), k};
    }
    MSig s = fresh_sig(*f.fn->node, k, tag);
    body(f.fn, s, m);
    return s;
  }

 private:
  const TypeInfo& info_;
  unsigned d_;
  std::size_t budget_;
  std::unordered_map<const Expr*, std::vector<std::string>> fv_;

  const std::vector<std::string>& fv(const Expr& e) {
    auto it = fv_.find(&e);
    if (it != fv_.end()) return it->second;
    return fv_.emplace(&e, free_vars(e)).first->second;
  }

  // Drops context variables that e does not mention (projection at their zero index).
  void weaken(const Expr& e, Ctx& ctx, MP& Q) {
    const auto& used = fv(e);
    std::vector<bool> drop(ctx.names.size());
    CtxIndex zeros;
    bool any = false;
    for (std::size_t p = 0; p < ctx.names.size(); ++p) {
      drop[p] = std::find(used.begin(), used.end(), ctx.names[p]) == used.end();
      if (drop[p]) {
        zeros.push_back(zero_index(*ctx.types[p]));
        any = true;
      }
    }
    if (!any) return;
    Q = project(Q, drop, zeros);
    Ctx kept;
    for (std::size_t p = 0; p < ctx.names.size(); ++p)
      if (!drop[p]) {
        kept.names.push_back(ctx.names[p]);
        kept.types.push_back(ctx.types[p]);
      }
    ctx = std::move(kept);
  }

  void let(const Expr& e, const Ctx& ctx, const MP& Q, const TypePtr& b, const MP& P, CostMetric m, unsigned k,
           const Arrows& ar, const Rational& c, const std::string& tag) {
    CtxIndex zero = zero_index(ctx.types);
    if (info_.of(*e.e1).is_arrow()) {
      Binding f = arrow_binding(*e.e1, ctx, ar);
      Rational total = c + rule_cost(*e.e1, m);
      if (total > 0) lp.ge(at(Q, zero), total, tag);
      MP q2 = Q;
      q2[zero] -= total;
      Arrows a2 = ar;
      a2[e.y1] = f;
      check(*e.e2, ctx, q2, b, P, m, k, a2);
      return;
    }
    const auto& fv1 = fv(*e.e1);
    std::vector<bool> in2(ctx.names.size());
    Ctx g1, g2;
    for (std::size_t p = 0; p < ctx.names.size(); ++p) {
      in2[p] = std::find(fv1.begin(), fv1.end(), ctx.names[p]) == fv1.end();
      (in2[p] ? g2 : g1).names.push_back(ctx.names[p]);
      (in2[p] ? g2 : g1).types.push_back(ctx.types[p]);
    }
    TypePtr b1 = info_.base_of(*e.e1);
    Ctx rc = g2;
    rc.names.insert(rc.names.begin(), e.y1);
    rc.types.insert(rc.types.begin(), b1);
    MP R = fresh(rc.types, k, "let " + e.y1 + where(e));
    std::vector<bool> rmask(rc.names.size(), true);
    rmask[0] = false;

    CtxIndex z2 = zero_index(g2.types);
    MP q1 = project(Q, in2, z2);
    if (c > 0) lp.ge(at(q1, zero_index(g1.types)), c, tag);
    q1[zero_index(g1.types)] -= c;
    check(*e.e1, g1, q1, b1, project(R, rmask, z2), m, k, ar);

    // Potential of e2 that mixes x with Γ2 is paid by cost-free derivations of e1.
    CtxIndex z1 = zero_index(g1.types);
    for (auto& j : indexes_of(g2.types, k)) {
      if (j == z2) continue;
      unsigned dj = degree(j);
      if (dj == k) {
        CtxIndex ri{zero_index(*b1)};
        ri.insert(ri.end(), j.begin(), j.end());
        // Q has g1 and g2 interleaved in context order.
        lp.ge(at(Q, interleave(in2, z1, j)), at(R, ri), tag + " cf");
        continue;
      }
      check(*e.e1, g1, project(Q, in2, j), b1, project(R, rmask, j), CostMetric::CostFree, k - dj, ar);
    }
    check(*e.e2, rc, R, b, P, m, k, ar);
  }

  static CtxIndex interleave(const std::vector<bool>& second, const CtxIndex& a, const CtxIndex& b) {
    CtxIndex out;
    std::size_t ia = 0, ib = 0;
    for (bool s : second) out.push_back(s ? b[ib++] : a[ia++]);
    return out;
  }

  static std::string rule_name(const Expr& e) {
    switch (e.kind) {
      case K::Var: return "M:Var";
      case K::Triv: return "M:Unit";
      case K::Inl: return "M:SumL";
      case K::Inr: return "M:SumR";
      case K::Pair: return "M:Pair";
      case K::Nil: return "M:Nil";
      case K::Cons: return "M:Cons";
      case K::App: return "M:App";
      case K::CaseSum: return "M:Case-Sum";
      case K::CasePair: return "M:Case-Prod";
      case K::CaseList: return "M:Case-List";
      case K::Let: return "M:Let";
      case K::Share: return "M:Share";
      case K::Tick: return "M:Tick";
      default: return "M:?";
    }
  }
};

struct Top {
  std::vector<TypePtr> in_types;
  MP A;
  TypePtr out_t;
  MP B;
};

Top build(Engine& en, const CheckedProgram& cp, const detail::Prepared& pr, CostMetric m, unsigned d) {
  Top top;
  const Program& prog = cp.program;
  if (prog.main) {
    Ctx ctx;
    for (auto& [n, t] : prog.params) {
      ctx.names.push_back(n);
      ctx.types.push_back(t);
    }
    top.in_types = ctx.types;
    top.A = en.fresh(ctx.types, d, "input");
    top.out_t = cp.type.dom;
    top.B = en.fresh({top.out_t}, d, "output");
    en.check(*pr.expr, ctx, top.A, top.out_t, top.B, m, d, {});
    return top;
  }
  Arrows ar;
  const Expr* e = pr.expr.get();
  Rational chain = 0;
  while (e->kind == K::Let) {
    ar[e->y1] = en.arrow_binding(*e->e1, Ctx{}, ar);
    chain += rule_cost(*e, m) + rule_cost(*e->e1, m);
    e = e->e2.get();
  }
  chain += rule_cost(*e, m);
  const Binding& f = Engine::lookup(ar, e->x);
  const SimpleType& t = pr.info.of(*f.fn->node);
  top.in_types = {t.dom};
  top.A = en.fresh(top.in_types, d, "input");
  top.out_t = t.cod;
  top.B = en.fresh({t.cod}, d, "output");
  CtxIndex zero{zero_index(*t.dom)};
  en.lp.ge(at(top.A, zero), chain, "definitions");
  MP a = top.A;
  a[zero] -= chain;
  en.body(f.fn, MSig{t.dom, a, t.cod, top.B, d}, m);
  return top;
}

void pin(Engine& en, const MP& m, const ResourcePoly& v, const std::vector<TypePtr>& ts, unsigned d) {
  for (auto& [i, c] : v.coeffs)
    if (degree(i) > d && c != 0) throw Untypable("annotation " + to_string(i) + " exceeds degree " + std::to_string(d));
  for (auto& i : indexes_of(ts, d)) en.lp.eq(at(m, i), v.at(i), "pin");
}

ResourcePoly solved(const MP& m, Shape shape, unsigned d, const LpSolution& s) {
  ResourcePoly r = ResourcePoly::of_context(std::move(shape), d);
  for (auto& [i, c] : m) r.set(i, s.eval(c));
  return r;
}

MultiResult run(const CheckedProgram& cp, const MultiOptions& opt, const MultiJudgment* pinned) {
  MultiResult res;
  try {
    detail::Prepared pr = detail::prepare(cp);
    Engine en(pr.info, opt.degree, opt.max_body_copies);
    Top top = build(en, cp, pr, opt.metric, opt.degree);
    if (opt.require_output) pin(en, top.B, *opt.require_output, {top.out_t}, opt.degree);
    LinExpr obj;
    if (pinned) {
      pin(en, top.A, pinned->P, top.in_types, opt.degree);
      pin(en, top.B, pinned->Q, {top.out_t}, opt.degree);
    } else {
      for (auto& [i, c] : top.A) obj += c * detail::degree_weight(degree(i));
      for (auto& [i, c] : top.B) obj += c;
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
    res.judgment.P = solved(top.A, input_shape(cp), opt.degree, s);
    res.judgment.Q = solved(top.B, {{"", top.out_t}}, opt.degree, s);
  } catch (const Untypable& e) {
    res.reason = e.what();
  } catch (const AnalysisUnsupported& e) {
    res.reason = e.what();
  } catch (const UnsupportedType& e) {
    res.reason = e.what();
  }
  return res;
}

}  // namespace

std::string to_string(const MultiJudgment& j) { return "P" + to_string(j.P) + " -> Q" + to_string(j.Q); }

Shape input_shape(const CheckedProgram& cp) {
  EntryInfo ei = entry_info(cp);
  return ei.params;
}

MultiResult infer_multi(const CheckedProgram& cp, const MultiOptions& opt) {
  if (opt.degree < 1) throw std::invalid_argument("degree must be at least 1");
  MultiResult r = run(cp, opt, nullptr);
  if (!r.ok && opt.probe_higher_degree && opt.degree < 6) {
    MultiOptions up = opt;
    up.degree = opt.degree + 1;
    up.probe_higher_degree = false;
    up.keep_lp = false;
    if (run(cp, up, nullptr).ok) r.suggested_degree = up.degree;
  }
  return r;
}

MultiResult infer_with_output(const CheckedProgram& cp, CostMetric metric, unsigned degree, const ResourcePoly& Q) {
  MultiOptions opt;
  opt.degree = degree;
  opt.metric = metric;
  opt.require_output = Q;
  return infer_multi(cp, opt);
}

bool check_multi(const CheckedProgram& cp, const MultiJudgment& j, CostMetric metric, unsigned degree) {
  MultiOptions opt;
  opt.degree = std::max({degree, j.P.max_degree(), j.Q.max_degree(), 1u});
  opt.metric = metric;
  return run(cp, opt, &j).ok;
}

SoundnessReport soundness_probe(const CheckedProgram& cp, const MultiJudgment& j, CostMetric metric,
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
    Rational slack = potential_multi(in, j.P) - potential_multi(*r.value, j.Q) - r.cost;
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
