#include "aara/ip.hpp"
#include "aara/multi.hpp"

#include "support.hpp"

#include <doctest.h>

using namespace aara;
using namespace testing;

namespace {

bool has_rule(const IpResult& r, const std::string& rule) {
  for (auto& s : r.trace)
    if (s.rule == rule) return true;
  return false;
}

bool flagged(const std::vector<AssumptionViolation>& vs, AssumptionViolation::Kind k, const std::string& v) {
  for (auto& x : vs)
    if (x.kind == k && x.variable == v) return true;
  return false;
}

// V in terms of the multivariate input shape.
std::vector<std::string> input_v(const CheckedProgram& cp, const IpResult& r) {
  if (!r.time) return {r.V.begin(), r.V.end()};
  if (*r.time == TimeClass::Const) return {};
  return {entry_info(cp).params[0].first};
}

const char* const kClean[] = {"append_rec.raml", "append_main.raml", "self_append.raml"};

}  // namespace

TEST_CASE("append by rec is inherently polynomial") {
  auto cp = corpus("append_rec.raml");
  auto o = check_ip(cp);
  REQUIRE_MESSAGE(o.accepted, o.rejection.obligation);
  REQUIRE(o.result.time);
  CHECK(*o.result.time == TimeClass::Poly);
  CHECK(o.result.delta.at("append") == TimeClass::Poly);
  CHECK(has_rule(o.result, "IP:Rec"));
  for (auto& s : o.result.trace)
    if (s.rule == "IP:Rec") CHECK(s.V == VarSet{"l1"});
  CHECK(check_assumption(cp, o.result).empty());
}

TEST_CASE("doubling and multiply are rejected at the step") {
  auto d = check_ip(corpus("doubling.raml"));
  CHECK_FALSE(d.accepted);
  CHECK(d.rejection.span.line == 6);
  CHECK(d.rejection.obligation.find("constant-time in |z") != std::string::npos);

  auto m = check_ip(corpus("multiply.raml"));
  CHECK_FALSE(m.accepted);
  CHECK(m.rejection.span.line == 9);
  CHECK(m.rejection.obligation.find("constant-time in |z") != std::string::npos);
}

TEST_CASE("general recursion is outside the fragment") {
  auto o = check_ip(corpus("append.raml"));
  CHECK_FALSE(o.accepted);
  CHECK(o.rejection.obligation.find("fun") != std::string::npos);
}

TEST_CASE("classify_arrow") {
  auto parse_lambda = [](const char* src) { return parse(src); };
  auto c = classify_arrow({}, parse_lambda("lambda (x : L(unit)). []"));
  REQUIRE(c.accepted);
  CHECK(*c.result.time == TimeClass::Const);

  auto p = classify_arrow({}, parse_lambda("lambda (l : L(unit)). rec l { [] -> [] | (y :: ys) with z -> y :: z }"));
  REQUIRE(p.accepted);
  CHECK(*p.result.time == TimeClass::Poly);

  TypingContext ctx{{"app", SimpleType::arrow(BaseType::prod(L(U()), L(U())), L(U()))}};
  auto r = classify_arrow(
      ctx, parse_lambda("lambda (x : L(unit)). rec x { [] -> [] | (y :: ys) with z -> share z as a, b in "
                        "let p = <a, b> in app p }"));
  CHECK_FALSE(r.accepted);

  // A const callee keeps the step independent of z.
  auto k = classify_arrow(ctx,
                          parse_lambda("lambda (x : L(unit)). rec x { [] -> [] | (y :: ys) with z -> share z as a, b "
                                       "in let p = <a, b> in app p }"),
                          {{"app", TimeClass::Const}});
  CHECK(k.accepted);
}

TEST_CASE("Assumption 1 detector") {
  auto s = corpus("share_step.raml");
  auto o = check_ip(s);
  REQUIRE_MESSAGE(o.accepted, o.rejection.obligation);
  CHECK(o.result.V == VarSet{"x"});
  auto vs = check_assumption(s, o.result);
  CHECK(flagged(vs, AssumptionViolation::Kind::ShareZeroPotential, "z1"));
  for (auto& v : vs)
    if (v.variable == "z1") CHECK(v.message().find("share on zero-potential variable") == 0);

  auto n = corpus("nested_case.raml");
  auto on = check_ip(n);
  REQUIRE(on.accepted);
  auto vn = check_assumption(n, on.result);
  REQUIRE(vn.size() == 1);
  CHECK(vn[0].kind == AssumptionViolation::Kind::NestedListMatch);
  CHECK(vn[0].message().find("nested list pattern match") == 0);
  CHECK(vn[0].span.line == 3);
}

TEST_CASE("least V is minimal and weakening is monotone") {
  for (const char* name : {"append_main.raml", "self_append.raml", "share_step.raml", "nested_case.raml"}) {
    auto cp = corpus(name);
    auto o = check_ip(cp);
    REQUIRE(o.accepted);
    const VarSet& V = o.result.V;
    CHECK(ip_derivable(cp.context, cp.expr, V));
    for (auto& v : V) {
      VarSet smaller = V;
      smaller.erase(v);
      CHECK_MESSAGE(!ip_derivable(cp.context, cp.expr, smaller), name << " without " << v);
    }
    VarSet all;
    for (auto& [n, t] : cp.context)
      if (!t.is_arrow()) all.insert(n);
    CHECK(ip_derivable(cp.context, cp.expr, all));
  }
  auto cp = corpus("append_main.raml");
  CHECK(check_ip(cp).result.V == VarSet{"l1"});
}

TEST_CASE("random expressions: derivable exactly above the least V") {
  // Programs over l1, l2 mixing rec, share and let.
  const char* bodies[] = {
      "rec l1 { [] -> l2 | (y :: ys) with z -> y :: z }",
      "share l1 as a, b in let c = rec a { [] -> b | (y :: ys) with z -> y :: z } in rec c { [] -> l2 | (y :: ys) "
      "with z -> y :: z }",
      "let c = <l1, l2> in case c { <p, q> -> q }",
      "case l1 { [] -> l2 | (h :: t) -> rec t { [] -> l2 | (y :: ys) with z -> y :: z } }",
      "let k = rec l2 { [] -> [] | (y :: ys) with z -> ys } in <l1, k>",
  };
  TypingContext ctx{{"l1", SimpleType::base(L(U()))}, {"l2", SimpleType::base(L(U()))}};
  const VarSet subsets[] = {{}, {"l1"}, {"l2"}, {"l1", "l2"}};
  for (const char* b : bodies) {
    auto e = parse(b);
    auto o = check_ip(ctx, e);
    REQUIRE_MESSAGE(o.accepted, b);
    for (auto& s : subsets) {
      bool above = std::includes(s.begin(), s.end(), o.result.V.begin(), o.result.V.end());
      CHECK_MESSAGE(ip_derivable(ctx, e, s) == above, b);
    }
  }
}

TEST_CASE("typability witness for clean programs") {
  for (const char* name : kClean) {
    auto cp = corpus(name);
    auto o = check_ip(cp);
    REQUIRE_MESSAGE(o.accepted, name);
    REQUIRE_MESSAGE(check_assumption(cp, o.result).empty(), name);
    auto V = input_v(cp, o.result);

    // Cost-bounded with zero potential outside V.
    bool typed = false;
    for (unsigned d = 1; d <= 4 && !typed; ++d) {
      MultiOptions opt;
      opt.degree = d;
      opt.metric = CostMetric::RunningTime;
      auto r = infer_multi(cp, opt);
      if (!r.ok) continue;
      typed = true;
      for (auto& [v, t] : r.judgment.P.shape)
        if (std::find(V.begin(), V.end(), v) == V.end())
          CHECK_MESSAGE(zero_potential(r.judgment.P, v), name << ": " << v << " in " << to_string(r.judgment.P));
    }
    CHECK_MESSAGE(typed, name);

    // Uniform output demands are met by uniform inputs.
    TypePtr out = entry_info(cp).result;
    for (unsigned d = 1; d <= 2; ++d)
      for (int n = 1; n <= 2; ++n) {
        auto r = infer_with_output(cp, CostMetric::CostFree, d, uniform_annotation(out, d, n));
        REQUIRE_MESSAGE(r.ok, name << " d=" << d << ": " << r.reason);
        CHECK_MESSAGE(is_uniform_ctx(r.judgment.P, d, n, V), name << " " << to_string(r.judgment.P));
      }
  }
}

TEST_CASE("the sharing counterexample has no linear uniform typing") {
  auto cp = corpus("share_step.raml");
  TypePtr out = entry_info(cp).result;
  auto lin = infer_with_output(cp, CostMetric::CostFree, 1, uniform_annotation(out, 1, 1));
  CHECK_FALSE(lin.ok);
  // 2|l| + |x||l| at degree 2
  auto quad = infer_with_output(cp, CostMetric::CostFree, 2,
                                parse_poly("{ <[*],*> : 1; <*,[*]> : 1 }", {{"", out}}, 2));
  REQUIRE_MESSAGE(quad.ok, quad.reason);
  for (std::size_t a = 0; a <= 5; ++a)
    for (std::size_t b = 0; b <= 5; ++b)
      CHECK(potential_multi({unit_list(a), unit_list(b)}, quad.judgment.P) == Rational(2 * b + a * b));
}
