#include "analysis.hpp"

namespace aara::detail {

Rational rule_cost(const Expr& e, CostMetric m) {
  using K = Expr::Kind;
  if (m == CostMetric::CostFree) return 0;
  if (m == CostMetric::Tick) return e.kind == K::Tick ? e.amount : Rational(0);
  switch (e.kind) {
    case K::Var: return 1;
    case K::Inl:
    case K::Inr: return 2;
    case K::Pair:
    case K::Cons: return 3;
    case K::Fun:
    case K::Lambda:
    case K::App:
    case K::CaseSum:
    case K::CasePair:
    case K::CaseList:
    case K::Let: return 1;
    default: return 0;
  }
}

Prepared prepare(const CheckedProgram& cp) {
  Prepared p;
  p.expr = desugar_rec(cp.context, cp.expr);
  typecheck(cp.context, p.expr, &p.info);
  return p;
}

std::string where(const Expr& e) {
  if (e.span.line == 0) return "";
  return "@" + std::to_string(e.span.line) + ":" + std::to_string(e.span.col);
}

Rational degree_weight(std::size_t i) {
  Rational w = factorial(static_cast<unsigned>(i));
  for (std::size_t k = 0; k < i; ++k) w *= 1000;
  return w;
}

}  // namespace aara::detail

namespace aara {

EntryInfo entry_info(const CheckedProgram& cp) {
  EntryInfo ei;
  const Program& p = cp.program;
  if (p.main) {
    ei.params = p.params;
    ei.components = p.params;
    ei.result = cp.type.dom;
    return ei;
  }
  const Expr& fn = *p.defs.back().fn;
  const SimpleType& t = cp.info.of(fn);
  ei.is_function = true;
  ei.params = {{fn.y1, t.dom}};
  ei.result = t.cod;
  if (fn.param_names.size() > 1) {
    TypePtr rest = t.dom;
    for (std::size_t i = 0; i + 1 < fn.param_names.size(); ++i) {
      ei.components.emplace_back(fn.param_names[i], rest->left);
      rest = rest->right;
    }
    ei.components.emplace_back(fn.param_names.back(), rest);
  } else {
    ei.components = {{fn.param_names.empty() ? fn.y1 : fn.param_names[0], t.dom}};
  }
  return ei;
}

}  // namespace aara
