#include "aara/ip.hpp"

#include "analysis.hpp"

#include <algorithm>

namespace aara {

std::string to_string(TimeClass t) { return t == TimeClass::Const ? "const" : "poly"; }

std::string AssumptionViolation::message() const {
  std::string pos = span.line ? " at " + std::to_string(span.line) + ":" + std::to_string(span.col) : "";
  if (kind == Kind::ShareZeroPotential) return "share on zero-potential variable " + variable + pos;
  return "nested list pattern match on " + variable + pos;
}

namespace {

using K = Expr::Kind;

struct Reject {
  Span span;
  std::string obligation;
};

VarSet rename(VarSet V, const std::string& x, std::initializer_list<std::string> to) {
  if (V.erase(x)) V.insert(to.begin(), to.end());
  return V;
}

// V' with the binders `from` folded back into x.
VarSet fold(VarSet V, std::initializer_list<std::string> from, const std::string& x) {
  bool hit = false;
  for (auto& y : from) hit |= V.erase(y) > 0;
  if (hit) V.insert(x);
  return V;
}

bool subset(const VarSet& a, const VarSet& b) { return std::includes(b.begin(), b.end(), a.begin(), a.end()); }

class Ip {
 public:
  Ip(const TypingContext& ctx, const ExprPtr& root) {
    typecheck(ctx, root, &info_);
    types_ = binder_types(ctx, *root, info_).types;
  }

  std::vector<IpStep> trace;
  TimeEnv seen;
  std::vector<AssumptionViolation>* violations = nullptr;

  bool is_arrow(const Expr& e) const { return info_.of(e).is_arrow(); }

  VarSet base_fv(const Expr& e) const {
    VarSet out;
    for (auto& v : free_vars(e)) {
      auto it = types_.find(v);
      if (it != types_.end() && !it->second.is_arrow()) out.insert(v);
    }
    return out;
  }

  // Least V, bottom-up.
  VarSet least(const Expr& e, const TimeEnv& d) {
    VarSet V;
    std::string rule;
    switch (e.kind) {
      case K::Var: rule = "IP:Base"; break;
      case K::Triv: rule = "IP:Unit"; break;
      case K::Nil: rule = "IP:Nil"; break;
      case K::Inl: rule = "IP:SumL"; break;
      case K::Inr: rule = "IP:SumR"; break;
      case K::Pair: rule = "IP:Pair"; break;
      case K::Cons: rule = "IP:Cons"; break;
      case K::Tick:
      case K::Error: rule = "IP:Unit"; break;
      case K::App:
        if (callee(e, d) == TimeClass::Poly) {
          rule = "IP:App-Poly";
          V = {e.x};
        } else {
          rule = "IP:App-Const";
        }
        break;
      case K::CaseSum: {
        rule = "IP:Case-Sum";
        VarSet l = least(*e.e1, d), r = least(*e.e2, d);
        V = fold(l, {e.y1}, e.x);
        V.merge(fold(r, {e.y2}, e.x));
        break;
      }
      case K::CasePair:
        rule = "IP:Case-Prod";
        V = fold(least(*e.e1, d), {e.y1, e.y2}, e.x);
        break;
      case K::CaseList: {
        rule = "IP:Case-List";
        V = least(*e.e1, d);
        V.merge(fold(least(*e.e2, d), {e.y1, e.y2}, e.x));
        break;
      }
      case K::Rec: {
        rule = "IP:Rec";
        V = least(*e.e1, d);
        step_scope(e);
        VarSet s = least(*e.e2, d);
        if (s.count(e.y3))
          throw Reject{e.e2->span, "step must be constant-time in |" + e.y3 + "|, but its cost depends on " + e.y3};
        V.insert(e.x);
        break;
      }
      case K::Let: {
        if (is_arrow(*e.e1)) {
          rule = "IP:Let-Arrow";
          TimeEnv d2 = d;
          d2[e.y1] = arrow_time(*e.e1, d);
          seen[e.y1] = d2[e.y1];
          V = least(*e.e2, d2);
          break;
        }
        rule = "IP:Let-Base";
        VarSet V1 = least(*e.e1, d), V2 = least(*e.e2, d);
        if (V2.erase(e.y1)) {
          V = base_fv(*e.e1);
        } else {
          V = V1;
        }
        V.merge(V2);
        break;
      }
      case K::Share: {
        auto it = types_.find(e.x);
        if (it != types_.end() && it->second.is_arrow()) {
          rule = "IP:Share-Arrow";
          TimeEnv d2 = d;
          d2[e.y1] = d2[e.y2] = lookup(d, e.x, e);
          V = least(*e.e1, d2);
          break;
        }
        rule = "IP:Share-Base";
        V = fold(least(*e.e1, d), {e.y1, e.y2}, e.x);
        break;
      }
      case K::Fun:
      case K::Lambda:
        throw Reject{e.span, "arrow-typed expression in base position"};
    }
    trace.push_back({rule, detail::where(e), V});
    return V;
  }

  TimeClass arrow_time(const Expr& e, const TimeEnv& d) {
    switch (e.kind) {
      case K::Var: return lookup(d, e.x, e);
      case K::Lambda: {
        VarSet V = least(*e.e1, d);
        VarSet captured = base_fv(e);
        if (!captured.empty()) throw Reject{e.span, "lambda captures base variable " + *captured.begin()};
        TimeClass t = V.empty() ? TimeClass::Const : TimeClass::Poly;
        trace.push_back({t == TimeClass::Const ? "IP:Const" : "IP:Poly", detail::where(e), V});
        return t;
      }
      case K::Fun: throw Reject{e.span, "general recursion (fun " + e.f + ") is outside the rec fragment"};
      case K::Let:
        if (is_arrow(*e.e1)) {
          TimeEnv d2 = d;
          d2[e.y1] = seen[e.y1] = arrow_time(*e.e1, d);
          return arrow_time(*e.e2, d2);
        }
        break;
      case K::Share: {
        TimeEnv d2 = d;
        d2[e.y1] = d2[e.y2] = lookup(d, e.x, e);
        return arrow_time(*e.e1, d2);
      }
      default: break;
    }
    throw Reject{e.span, "unsupported arrow-typed expression"};
  }

  // Top-down: does the judgment hold with V?  Records Assumption violations when asked.
  bool derive(const Expr& e, const VarSet& V, const TimeEnv& d) {
    switch (e.kind) {
      case K::App: {
        auto c = known(d, e.f);
        if (!c) return false;
        return *c == TimeClass::Const || V.count(e.x);
      }
      case K::CaseSum: {
        VarSet l = rename(V, e.x, {e.y1}), r = rename(V, e.x, {e.y2});
        bool a = derive(*e.e1, l, d);
        return derive(*e.e2, r, d) && a;
      }
      case K::CasePair: return derive(*e.e1, rename(V, e.x, {e.y1, e.y2}), d);
      case K::CaseList: {
        nested_check(e);
        VarSet nil = V;
        nil.erase(e.x);
        bool a = derive(*e.e1, nil, d);
        return derive(*e.e2, rename(V, e.x, {e.y1, e.y2}), d) && a;
      }
      case K::Rec: {
        nested_check(e);
        VarSet nil = V;
        nil.erase(e.x);
        bool a = derive(*e.e1, nil, d);
        bool s = subset(base_fv(*e.e2), {e.y1, e.y2, e.y3}) && derive(*e.e2, {e.y1, e.y2}, d);
        return V.count(e.x) && a && s;
      }
      case K::Let: {
        if (is_arrow(*e.e1)) {
          auto t = try_arrow(*e.e1, d);
          if (!t) return false;
          TimeEnv d2 = d;
          d2[e.y1] = *t;
          return derive(*e.e2, V, d2);
        }
        VarSet g1 = base_fv(*e.e1);
        if (subset(g1, V)) {
          VarSet V2 = V;
          V2.insert(e.y1);
          bool a = derive(*e.e1, g1, d);
          return derive(*e.e2, V2, d) && a;
        }
        bool a = derive(*e.e1, V, d);
        return derive(*e.e2, V, d) && a;
      }
      case K::Share: {
        auto it = types_.find(e.x);
        if (it != types_.end() && it->second.is_arrow()) {
          auto c = known(d, e.x);
          if (!c) return false;
          TimeEnv d2 = d;
          d2[e.y1] = d2[e.y2] = *c;
          return derive(*e.e1, V, d2);
        }
        if (violations && !V.count(e.x))
          violations->push_back({AssumptionViolation::Kind::ShareZeroPotential, e.x, e.span});
        return derive(*e.e1, rename(V, e.x, {e.y1, e.y2}), d);
      }
      case K::Fun:
      case K::Lambda: return false;
      default: return true;
    }
  }

  // Arrow-typed subterm in a top-down scan: classify it, then scan its body.
  std::optional<TimeClass> try_arrow(const Expr& e, const TimeEnv& d) {
    std::optional<TimeClass> t;
    {
      auto* saved = violations;
      violations = nullptr;
      try {
        t = arrow_time(e, d);
      } catch (const Reject&) {
      }
      violations = saved;
    }
    if (!t) return t;
    if (e.kind == K::Lambda) {
      VarSet V;
      if (*t == TimeClass::Poly) V.insert(e.y1);
      derive(*e.e1, V, d);
    } else if (e.kind == K::Let && is_arrow(*e.e1)) {
      auto t1 = try_arrow(*e.e1, d);
      TimeEnv d2 = d;
      if (t1) d2[e.y1] = *t1;
      try_arrow(*e.e2, d2);
    }
    return t;
  }

 private:
  TypeInfo info_;
  std::unordered_map<std::string, SimpleType> types_;

  static std::optional<TimeClass> known(const TimeEnv& d, const std::string& f) {
    auto it = d.find(f);
    if (it == d.end()) return std::nullopt;
    return it->second;
  }

  TimeClass lookup(const TimeEnv& d, const std::string& f, const Expr& at) const {
    auto c = known(d, f);
    if (!c) throw Reject{at.span, "arrow variable " + f + " has no time class"};
    return *c;
  }

  TimeClass callee(const Expr& e, const TimeEnv& d) const { return lookup(d, e.f, e); }

  void step_scope(const Expr& rec) const {
    for (auto& v : base_fv(*rec.e2))
      if (v != rec.y1 && v != rec.y2 && v != rec.y3)
        throw Reject{rec.e2->span, "step may only use " + rec.y1 + ", " + rec.y2 + " and " + rec.y3 + ", not " + v};
  }

  void nested_check(const Expr& e) {
    if (!violations) return;
    auto it = types_.find(e.x);
    if (it == types_.end() || it->second.is_arrow()) return;
    if (contains_list(*it->second.dom->elem()))
      violations->push_back({AssumptionViolation::Kind::NestedListMatch, e.x, e.span});
  }
};

TimeEnv initial_delta(const TypingContext& ctx, const TimeEnv& delta) {
  TimeEnv d = delta;
  for (auto& [n, t] : ctx)
    if (t.is_arrow()) d.emplace(n, TimeClass::Poly);
  return d;
}

}  // namespace

IpOutcome check_ip(const TypingContext& ctx, const ExprPtr& e, const TimeEnv& delta) {
  IpOutcome out;
  Ip ip(ctx, e);
  TimeEnv d = initial_delta(ctx, delta);
  try {
    if (ip.is_arrow(*e))
      out.result.time = ip.arrow_time(*e, d);
    else
      out.result.V = ip.least(*e, d);
    out.accepted = true;
  } catch (const Reject& r) {
    out.rejection = {r.span, r.obligation};
  }
  out.result.delta = ip.seen;
  out.result.trace = std::move(ip.trace);
  return out;
}

IpOutcome check_ip(const CheckedProgram& cp) { return check_ip(cp.context, cp.expr); }

bool ip_derivable(const TypingContext& ctx, const ExprPtr& e, const VarSet& V, const TimeEnv& delta) {
  Ip ip(ctx, e);
  return ip.derive(*e, V, initial_delta(ctx, delta));
}

IpOutcome classify_arrow(const TypingContext& ctx, const ExprPtr& lambda, const TimeEnv& delta) {
  if (lambda->kind != Expr::Kind::Lambda) throw std::invalid_argument("classify_arrow expects a lambda");
  return check_ip(ctx, lambda, delta);
}

std::vector<AssumptionViolation> check_assumption(const TypingContext& ctx, const ExprPtr& e, const IpResult& result) {
  std::vector<AssumptionViolation> out;
  Ip ip(ctx, e);
  ip.violations = &out;
  TimeEnv d = initial_delta(ctx, {});
  if (ip.is_arrow(*e))
    ip.try_arrow(*e, d);
  else
    ip.derive(*e, result.V, d);
  return out;
}

std::vector<AssumptionViolation> check_assumption(const CheckedProgram& cp, const IpResult& result) {
  return check_assumption(cp.context, cp.expr, result);
}

}  // namespace aara
