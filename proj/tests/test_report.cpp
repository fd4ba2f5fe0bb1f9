#include "aara/report.hpp"

#include "support.hpp"

#include <doctest.h>

using namespace aara;
using namespace testing;

namespace {

Rational eval_poly(const SizePoly& p, const std::vector<std::size_t>& xs) {
  Rational s = 0;
  for (auto& [m, c] : p.terms) {
    Rational t = c;
    for (std::size_t i = 0; i < m.size(); ++i)
      for (unsigned e = 0; e < m[i]; ++e) t *= Rational(static_cast<long>(xs[i]));
    s += t;
  }
  return s;
}

EntryInfo list_inputs(std::vector<std::string> names) {
  EntryInfo ei;
  for (auto& n : names) {
    ei.params.emplace_back(n, L(U()));
    ei.components.emplace_back(n, L(U()));
  }
  ei.result = L(U());
  return ei;
}

}  // namespace

TEST_CASE("univariate bounds") {
  auto ei = list_inputs({"n"});
  UniJudgment j{{{"n", parse_annot("L^(1,2)(unit)")}}, 0, parse_annot("L^(0)(unit)"), 0};
  CHECK(render_bound(j, ei, {"n"}) == "n^2");
  CHECK(render_bound(j, ei) == "|n|^2");

  UniJudgment c{{{"n", parse_annot("L^(0)(unit)")}}, 3, parse_annot("L^(0)(unit)"), 0};
  CHECK(render_bound(c, ei) == "3");

  UniJudgment lin{{{"n", parse_annot("L^(1)(unit)")}}, 2, parse_annot("L^(0)(unit)"), 0};
  CHECK(render_bound(lin, ei, {"n"}) == "2 + n");

  UniJudgment half{{{"n", parse_annot("L^(0,1)(unit)")}}, 0, parse_annot("L^(0)(unit)"), 0};
  CHECK(render_bound(half, ei, {"n"}) == "-1/2*n + 1/2*n^2");

  // Element potential depends on more than list lengths.
  auto nested = ei;
  nested.components[0].second = L(L(U()));
  UniJudgment deep{{{"n", parse_annot("L^(1)(L^(1)(unit))")}}, 0, parse_annot("L^(0)(unit)"), 0};
  CHECK(render_bound(deep, nested).find("Phi(") != std::string::npos);
}

TEST_CASE("quicksort renders as n^2") {
  auto cp = corpus("quicksort.raml");
  UniOptions opt;
  opt.degree = 2;
  auto r = report_uni("quicksort", cp, opt);
  REQUIRE_MESSAGE(r.ok, r.rejection);
  CHECK(r.bound == "|l|^2");
  CHECK(r.signature.find("L^(1,2)") != std::string::npos);
}

TEST_CASE("multivariate append renders in closed form") {
  auto cp = corpus("append.raml");
  auto ei = entry_info(cp);
  MultiJudgment j;
  j.P = parse_poly("{ <[*],*> : 2; <[*,*],*> : 2; <[*],[*]> : 2; <*,[*,*]> : 2; <*,[*]> : 1 }", input_shape(cp), 2);
  j.Q = parse_poly("{ [*,*] : 2; [*] : 1 }", {{"", L(U())}}, 2);
  CHECK(render_bound(j, ei) == "|l1| + (|l1|+|l2|)^2");

  MultiOptions opt;
  opt.degree = 2;
  opt.require_output = j.Q;
  auto r = report_multi("append", cp, opt);
  REQUIRE_MESSAGE(r.ok, r.rejection);
  CHECK(r.bound == "|l1| + (|l1|+|l2|)^2");

  MultiJudgment scaled = j;
  for (auto& [i, c] : scaled.P.coeffs) c *= 3;
  CHECK(render_bound(scaled, ei) == "3*|l1| + 3*(|l1|+|l2|)^2");

  // A top part that is not a power of a sum stays expanded.
  MultiJudgment cross;
  cross.P = parse_poly("{ <[*],[*]> : 1 }", input_shape(cp), 2);
  CHECK(render_bound(cross, ei) == "|l1|*|l2|");
}

TEST_CASE("size polynomials agree with the potential") {
  auto ei = list_inputs({"a", "b"});
  Shape shape{{"a", L(U())}, {"b", L(U())}};
  for (int k = 0; k < 300; ++k) {
    UniJudgment u{{{"a", AnnotBase::list(random_univec(uniform(0, 4)), AnnotBase::unit())},
                   {"b", AnnotBase::list(random_univec(uniform(0, 4)), AnnotBase::unit())}},
                  small_rational(),
                  parse_annot("L^(0)(unit)"),
                  0};
    MultiJudgment m;
    m.P = random_poly(shape, 3);
    auto su = size_poly(u, ei);
    auto sm = size_poly(m, ei);
    REQUIRE(su);
    REQUIRE(sm);
    std::size_t a = uniform(0, 12), b = uniform(0, 12);
    std::vector<ValuePtr> in{unit_list(a), unit_list(b)};
    CHECK(eval_poly(*su, {a, b}) == input_potential(u, in));
    CHECK(eval_poly(*sm, {a, b}) == potential_multi(in, m.P));
  }
}

TEST_CASE("reports are stable") {
  auto cp = corpus("append.raml");
  UniOptions opt;
  opt.degree = 1;
  auto a = report_uni("append", cp, opt), b = report_uni("append", cp, opt);
  CHECK(to_json(a) == to_json(b));
  CHECK(to_text(a) == to_text(b));
  a.timing_ms = 12.5;
  CHECK(to_json(a) == to_json(b));
  CHECK(to_json(a).find("\"version\": 1") != std::string::npos);

  auto ip = report_ip("doubling", corpus("doubling.raml"));
  CHECK_FALSE(ip.ok);
  CHECK(ip.rejection.rfind("6:", 0) == 0);
}
