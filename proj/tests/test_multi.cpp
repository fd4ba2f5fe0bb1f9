#include "aara/multi.hpp"

#include "support.hpp"

#include <doctest.h>

using namespace aara;
using namespace testing;

namespace {
std::vector<std::vector<ValuePtr>> random_inputs(const CheckedProgram& cp, std::size_t n, std::size_t max_len) {
  std::vector<std::vector<ValuePtr>> out;
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<ValuePtr> in;
    for (auto& [name, t] : entry_info(cp).params) in.push_back(random_value(*t, max_len));
    out.push_back(in);
  }
  return out;
}

MultiResult infer(const CheckedProgram& cp, unsigned d, CostMetric m) {
  MultiOptions opt;
  opt.degree = d;
  opt.metric = m;
  return infer_multi(cp, opt);
}

ResourcePoly quadratic_output() { return parse_poly("{ [*,*] : 2; [*] : 1 }", {{"", L(U())}}, 2); }
}  // namespace

TEST_CASE("append with quadratic output potential") {
  auto cp = corpus("append.raml");
  auto r = infer_with_output(cp, CostMetric::Tick, 2, quadratic_output());
  REQUIRE_MESSAGE(r.ok, r.reason);
  auto expected =
      parse_poly("{ <[*],*> : 2; <[*,*],*> : 2; <[*],[*]> : 2; <*,[*,*]> : 2; <*,[*]> : 1 }", input_shape(cp), 2);
  CHECK_MESSAGE(poly_equal(r.judgment.P, expected), to_string(r.judgment.P));
  // |l1| + (|l1| + |l2|)^2
  for (std::size_t a = 0; a <= 6; ++a)
    for (std::size_t b = 0; b <= 6; ++b)
      CHECK(potential_multi(*Value::pair(unit_list(a), unit_list(b)), r.judgment.P) ==
            Rational(static_cast<long>(a + (a + b) * (a + b))));

  CHECK(check_multi(cp, r.judgment, CostMetric::Tick, 2));
  MultiJudgment low = r.judgment;
  low.P.set(parse_poly("{ <[*],[*]> : 1 }", input_shape(cp), 2).coeffs.begin()->first, 1);
  CHECK_FALSE(check_multi(cp, low, CostMetric::Tick, 2));
  for (int k = 0; k < 4; ++k) {
    MultiJudgment relaxed = r.judgment;
    Rational c = small_rational();
    relaxed.P.add(zero_index(shape_types(relaxed.P.shape)), c);
    relaxed.Q.add(zero_index(shape_types(relaxed.Q.shape)), c);
    CHECK(check_multi(cp, relaxed, CostMetric::Tick, 2));
  }
  auto rep = soundness_probe(cp, r.judgment, CostMetric::Tick, random_inputs(cp, 100, 12));
  CHECK(rep.violations == 0);
  CHECK(rep.min_slack == 0);

  CHECK_FALSE(infer_with_output(cp, CostMetric::Tick, 1, quadratic_output()).ok);
  auto zero_out = infer_with_output(cp, CostMetric::Tick, 2, ResourcePoly::of_type(L(U()), 2));
  auto plain = infer(cp, 2, CostMetric::Tick);
  REQUIRE(zero_out.ok);
  REQUIRE(plain.ok);
  CHECK(poly_equal(zero_out.judgment.P, plain.judgment.P));
}

TEST_CASE("multiply is multivariate") {
  auto cp = corpus("multiply.raml");
  auto r = infer(cp, 2, CostMetric::RunningTime);
  REQUIRE_MESSAGE(r.ok, r.reason);
  auto cross = parse_poly("{ <[*],[*]> : 1 }", input_shape(cp), 2).coeffs.begin()->first;
  CHECK(r.judgment.P.at(cross) > 0);
  auto rep = soundness_probe(cp, r.judgment, CostMetric::RunningTime, random_inputs(cp, 100, 10));
  CHECK(rep.violations == 0);
  CHECK_FALSE(infer(cp, 1, CostMetric::RunningTime).ok);
}

TEST_CASE("doubling stays untypable") {
  auto cp = corpus("doubling.raml");
  for (unsigned d = 1; d <= 3; ++d) CHECK_FALSE(infer(cp, d, CostMetric::RunningTime).ok);
}

TEST_CASE("multivariate soundness and dominance over univariate") {
  struct Case {
    const char* file;
    CostMetric metric;
    unsigned d;
  };
  for (auto [file, metric, d] : {Case{"append.raml", CostMetric::Tick, 1}, Case{"append.raml", CostMetric::RunningTime, 2},
                                 Case{"append_rec.raml", CostMetric::RunningTime, 1},
                                 Case{"quicksort.raml", CostMetric::Tick, 2}}) {
    INFO(file);
    auto cp = corpus(file);
    UniOptions uo;
    uo.degree = d;
    uo.metric = metric;
    auto u = infer_uni(cp, uo);
    REQUIRE_MESSAGE(u.ok, u.reason);
    auto r = infer(cp, d, metric);
    REQUIRE_MESSAGE(r.ok, r.reason);
    auto inputs = random_inputs(cp, 100, 20);
    auto rep = soundness_probe(cp, r.judgment, metric, inputs);
    CHECK(rep.violations == 0);
    for (auto& in : inputs) CHECK(potential_multi(in, r.judgment.P) <= input_potential(u.judgment, in));
  }
}
