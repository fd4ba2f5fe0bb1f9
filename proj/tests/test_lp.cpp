#include "aara/lp.hpp"

#include "support.hpp"

#include <doctest.h>

#include <optional>

using namespace aara;
using namespace testing;

TEST_CASE("lp examples") {
  {
    LpProblem p;
    auto x = p.var("x");
    p.ge(x, 2);
    p.minimize(x);
    auto s = solve(p);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.value(x) == 2);
  }
  {
    LpProblem p;
    auto x = p.var("x");
    p.ge(x, 2);
    p.add(x, Rel::Le, 1);
    CHECK(solve(p).status == LpStatus::Infeasible);
  }
  {
    LpProblem p;
    auto x = p.var("x"), y = p.var("y");
    p.ge(LinExpr(x) + 2 * LinExpr(y), 4);
    p.ge(3 * LinExpr(x) + y, 6);
    p.minimize(LinExpr(x) + y);
    auto s = solve(p);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.value(x) == Rational(8, 5));
    CHECK(s.value(y) == Rational(6, 5));
    CHECK(s.objective == Rational(14, 5));
    CHECK(check(p, s.values));
    // perturbing a tight constraint breaks it
    auto bad = s.values;
    bad[x.id] -= 1;
    CHECK_FALSE(check(p, bad));
  }
  {
    LpProblem p;
    auto x = p.var("x");
    p.minimize(-LinExpr(x));
    CHECK(solve(p).status == LpStatus::Unbounded);
  }
  {
    LpProblem p;
    p.ge(LinExpr(1), LinExpr(2), "one >= two");
    auto s = solve(p);
    CHECK(s.status == LpStatus::Infeasible);
    CHECK(s.reason == "one >= two");
  }
}

TEST_CASE("equalities and redundant rows") {
  LpProblem p;
  auto a = p.var("a"), b = p.var("b"), c = p.var("c");
  p.eq(LinExpr(a) + b, 3);
  p.eq(LinExpr(a) + b, 3);
  p.eq(c, LinExpr(a) - 1);
  p.minimize(LinExpr(b) + 2 * LinExpr(c));
  auto s = solve(p);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(check(p, s.values));
  CHECK(s.value(a) == 1);
  CHECK(s.value(b) == 2);
  CHECK(s.value(c) == 0);
}

namespace {
// Oracle: minimum over all feasible vertices of a 2-variable problem.
std::optional<Rational> brute_force_2d(const LpProblem& p) {
  struct Line {
    Rational a, b, c;  // a x + b y + c = 0
  };
  std::vector<Line> lines{{1, 0, 0}, {0, 1, 0}};
  for (auto& con : p.constraints()) {
    Rational a = 0, b = 0;
    for (auto& [v, k] : con.expr.terms()) (v == 0 ? a : b) = k;
    lines.push_back({a, b, con.expr.constant()});
  }
  std::optional<Rational> best;
  for (std::size_t i = 0; i < lines.size(); ++i)
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      Rational det = lines[i].a * lines[j].b - lines[j].a * lines[i].b;
      if (det == 0) continue;
      Rational x = (-lines[i].c * lines[j].b + lines[j].c * lines[i].b) / det;
      Rational y = (-lines[i].a * lines[j].c + lines[j].a * lines[i].c) / det;
      if (!check(p, {x, y})) continue;
      Rational obj = p.objective().eval({x, y});
      if (!best || obj < *best) best = obj;
    }
  return best;
}
}  // namespace

TEST_CASE("random 2d problems against vertex enumeration") {
  int solved = 0;
  for (int k = 0; k < 400; ++k) {
    LpProblem p;
    auto x = p.var("x"), y = p.var("y");
    std::size_t m = uniform(1, 5);
    for (std::size_t i = 0; i < m; ++i) {
      Rational a = Rational(static_cast<long>(uniform(0, 6))) - 3, b = Rational(static_cast<long>(uniform(0, 6))) - 3;
      Rational c = Rational(static_cast<long>(uniform(0, 10))) - 5;
      Rel rel = uniform(0, 3) == 0 ? Rel::Eq : (uniform(0, 1) ? Rel::Ge : Rel::Le);
      p.add(a * LinExpr(x) + b * LinExpr(y) + c, rel, 0);
    }
    // bounded objective with nonnegative weights
    p.minimize(small_rational() * LinExpr(x) + small_rational() * LinExpr(y));
    auto s = solve(p);
    auto oracle = brute_force_2d(p);
    if (s.status == LpStatus::Optimal) {
      ++solved;
      CHECK(check(p, s.values));
      REQUIRE(oracle.has_value());
      CHECK(s.objective == *oracle);
    } else {
      CHECK(s.status == LpStatus::Infeasible);
      CHECK_FALSE(oracle.has_value());
    }
  }
  CHECK(solved > 50);
}

TEST_CASE("determinism") {
  auto build = [] {
    LpProblem p;
    std::vector<LinVar> v;
    for (int i = 0; i < 12; ++i) v.push_back(p.var("v" + std::to_string(i)));
    for (int i = 0; i + 1 < 12; ++i) p.ge(LinExpr(v[i]) + v[i + 1], 1 + i % 3);
    p.eq(LinExpr(v[0]) + v[5] + v[11], 4);
    LinExpr obj;
    for (int i = 0; i < 12; ++i) obj += LinExpr(v[i]) * Rational(1 + i % 4);
    p.minimize(obj);
    return p;
  };
  auto a = solve(build()), b = solve(build());
  REQUIRE(a.status == LpStatus::Optimal);
  CHECK(a.values == b.values);
  CHECK(a.pivots == b.pivots);
  CHECK(build().dump() == build().dump());
}
