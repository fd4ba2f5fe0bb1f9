#include "support.hpp"

#include <doctest.h>

using namespace aara;
using namespace testing;

namespace {
Rational R(long n, long d = 1) { return Rational(n, d); }
ResourcePoly over_list(unsigned d) { return ResourcePoly::of_type(L(U()), d); }
Index stars(std::size_t k) { return Index::list(std::vector<Index>(k, Index::star())); }
}  // namespace

TEST_CASE("phi") {
  CHECK(phi(3, {R(1), R(2)}) == 9);
  CHECK(phi(0, {R(4), R(7)}) == 0);
  CHECK(phi(2, {R(0), R(0), R(5)}) == 0);
  // q = (1,2) represents n^2
  for (std::size_t n = 0; n <= 20; ++n) CHECK(phi(n, {R(1), R(2)}) == Rational(n * n));
}

TEST_CASE("potential_uni") {
  CHECK(potential_uni(*Value::triv(), *AnnotBase::unit()) == 0);
  CHECK(potential_uni(*Value::nil(), *AnnotBase::list({R(5)}, AnnotBase::unit())) == 0);
  // oracle: direct summation of q1 per element and q2 per pair of elements
  auto a = AnnotBase::list({R(1), R(2)}, AnnotBase::unit());
  Rational direct = 0;
  for (int i = 0; i < 4; ++i) {
    direct += 1;
    for (int j = i + 1; j < 4; ++j) direct += 2;
  }
  CHECK(potential_uni(*unit_list(4), *a) == direct);
  CHECK(direct == 16);
  // nested lists sum element potentials
  auto nested = AnnotBase::list({R(1)}, AnnotBase::list({R(3)}, AnnotBase::unit()));
  auto v = Value::list({unit_list(2), unit_list(0), unit_list(1)});
  CHECK(potential_uni(*v, *nested) == 3 + 3 * 3);
  CHECK_THROWS_AS(potential_uni(*Value::triv(), *a), ShapeError);
}

TEST_CASE("shift_uni") {
  CHECK(shift_uni({R(1), R(2)}) == UniVec{R(3), R(2)});
  CHECK(shift_uni({R(7)}) == UniVec{R(7)});
  UniVec q{R(0), R(1)};
  for (std::size_t n = 0; n <= 30; ++n) CHECK(phi(n + 1, q) == q[0] + phi(n, shift_uni(q)));
}

TEST_CASE("share and subtype, univariate") {
  auto u = AnnotBase::unit();
  CHECK(share_uni(*AnnotBase::list({R(2)}, u), *AnnotBase::list({R(1)}, u), *AnnotBase::list({R(1)}, u)));
  CHECK_FALSE(share_uni(*AnnotBase::list({R(2)}, u), *AnnotBase::list({R(3)}, u), *AnnotBase::list({R(-1)}, u)));
  CHECK(subtype_uni(*AnnotBase::list({R(2), R(1)}, u), *AnnotBase::list({R(1), R(1)}, u)));
  CHECK_FALSE(subtype_uni(*AnnotBase::list({R(1)}, u), *AnnotBase::list({R(2)}, u)));
  auto b = AnnotBase::list({R(1)}, u);
  CHECK(subtype_uni(AnnotSignature{b, R(1), b, R(3)}, AnnotSignature{b, R(1), b, R(1)}));
  CHECK_FALSE(subtype_uni(AnnotSignature{b, R(1), b, R(1)}, AnnotSignature{b, R(1), b, R(3)}));
  // contravariant domain
  auto b2 = AnnotBase::list({R(2)}, u);
  CHECK(subtype_uni(AnnotSignature{b, R(0), b, R(0)}, AnnotSignature{b2, R(0), b, R(0)}));
  CHECK_FALSE(subtype_uni(AnnotSignature{b2, R(0), b, R(0)}, AnnotSignature{b, R(0), b, R(0)}));

  // conservation of sharing on random lists
  for (int k = 0; k < 50; ++k) {
    auto q1 = random_univec(3), q2 = random_univec(3);
    UniVec q(3);
    for (int i = 0; i < 3; ++i) q[i] = q1[i] + q2[i];
    auto v = unit_list(uniform(0, 12));
    auto t = AnnotBase::list(q, u), t1 = AnnotBase::list(q1, u), t2 = AnnotBase::list(q2, u);
    REQUIRE(share_uni(*t, *t1, *t2));
    CHECK(potential_uni(*v, *t) == potential_uni(*v, *t1) + potential_uni(*v, *t2));
  }
}

TEST_CASE("annotation text round trip") {
  auto a = parse_annot("L^(1,2)(unit) * (L^3(unit + unit) + unit)");
  CHECK(to_string(*a) == "L^(1,2)(unit) * (L^(3)(unit + unit) + unit)");
  CHECK(to_string(*parse_annot(to_string(*a))) == to_string(*a));
  CHECK(to_string(*parse_annot("L(unit)")) == "L^()(unit)");
}

TEST_CASE("indexes_of and degree") {
  auto li = indexes_of(*L(U()), 2);
  REQUIRE(li.size() == 3);
  CHECK(li[0] == stars(0));
  CHECK(li[1] == stars(1));
  CHECK(li[2] == stars(2));
  CHECK(indexes_of(*U(), 5) == std::vector<Index>{Index::star()});
  CHECK(indexes_of(*BaseType::prod(U(), U()), 3) == std::vector<Index>{Index::pair(Index::star(), Index::star())});
  CHECK(degree(Index::star()) == 0);
  CHECK(degree(stars(2)) == 2);
  CHECK(degree(Index::list({stars(1), stars(1)})) == 4);
  // every generated index is well formed and within the bound
  auto t = BaseType::prod(L(L(U())), BaseType::sum(L(U()), U()));
  for (unsigned d = 0; d <= 4; ++d)
    for (auto& i : indexes_of(*t, d)) {
      CHECK(well_formed(i, *t));
      CHECK(degree(i) <= d);
    }
  // count for L(L(unit)) at degree 2: [], [[]], [[*]], [[],[]]
  CHECK(indexes_of(*L(L(U())), 2).size() == 4);
}

TEST_CASE("base_poly_eval") {
  CHECK(base_poly_eval(stars(2), *unit_list(4)) == 6);
  CHECK(base_poly_eval(Index::inr(stars(1)), *Value::inl(Value::triv())) == 0);
  CHECK(base_poly_eval(Index::pair(stars(1), stars(1)), *Value::pair(unit_list(2), unit_list(3))) == 6);
  CHECK(base_poly_eval(stars(5), *unit_list(3)) == 0);
  // nested index: sum over pairs i<j of |v_i| * |v_j|
  auto v = Value::list({unit_list(2), unit_list(3), unit_list(4)});
  CHECK(base_poly_eval(Index::list({stars(1), stars(1)}), *v) == 2 * 3 + 2 * 4 + 3 * 4);
  CHECK_THROWS_AS(base_poly_eval(stars(1), *Value::triv()), ShapeError);
}

TEST_CASE("potential_multi on the two-list append annotation") {
  Shape s{{"l1", L(U())}, {"l2", L(U())}};
  ResourcePoly p = parse_poly("P{ <[*],[]> : 2; <[*,*],[]> : 2; <[*],[*]> : 2; <[],[*,*]> : 2; <[],[*]> : 1 }", s, 2);
  std::vector<ValuePtr> vals{unit_list(2), unit_list(3)};
  CHECK(potential_multi(vals, p) == 27);
  for (std::size_t a = 0; a <= 6; ++a)
    for (std::size_t b = 0; b <= 6; ++b)
      CHECK(potential_multi({unit_list(a), unit_list(b)}, p) == Rational(a + (a + b) * (a + b)));
  ResourcePoly c = ResourcePoly::of_context(s, 2);
  c.set({stars(0), stars(0)}, R(7));
  CHECK(potential_multi(vals, c) == 7);
  CHECK(potential_multi(vals, ResourcePoly::of_context(s, 2)) == 0);
  CHECK(to_string(p) == "{ <[],[*]> : 1; <[*],[]> : 2; <[],[*,*]> : 2; <[*],[*]> : 2; <[*,*],[]> : 2 }");
  CHECK(poly_equal(parse_poly(to_string(p), s, 2), p));
}

TEST_CASE("shift_multi") {
  ResourcePoly p = over_list(2);
  p.shape[0].first = "x";
  p.set({stars(2)}, R(1));
  ResourcePoly s = shift_multi(p, 0, "y", "ys");
  CHECK(s.shape.size() == 2);
  CHECK(s.at({Index::star(), stars(1)}) == 1);
  CHECK(s.at({Index::star(), stars(2)}) == 1);
  CHECK(s.coeffs.size() == 2);

  ResourcePoly c = over_list(2);
  c.set({stars(0)}, R(5));
  ResourcePoly sc = shift_multi(c, 0, "y", "ys");
  CHECK(sc.coeffs.size() == 1);
  CHECK(sc.at({Index::star(), stars(0)}) == 5);
}

TEST_CASE("project and extend") {
  Shape s{{"l1", L(U())}, {"l2", L(U())}};
  ResourcePoly p = parse_poly("{ <[*],[]> : 2; <[*,*],[]> : 2; <[*],[*]> : 2; <[],[*,*]> : 2; <[],[*]> : 1 }", s, 2);
  ResourcePoly p0 = project(p, {1}, {stars(0)});
  CHECK(p0.shape.size() == 1);
  CHECK(p0.at({stars(1)}) == 2);
  CHECK(p0.at({stars(2)}) == 2);
  ResourcePoly p1 = project(p, {1}, {stars(1)});
  CHECK(p1.at({stars(1)}) == 2);
  CHECK(p1.at({stars(0)}) == 1);
  CHECK(project(p, {1}, {stars(2)}).at({stars(0)}) == 2);
  CHECK(project(p, {0}, {Index::list({Index::star(), Index::star()})}).coeffs.size() == 1);

  Shape g2{{"z", L(U())}};
  ResourcePoly e = extend(p0, g2, {stars(1)});
  CHECK(poly_equal(project(e, {1}, {stars(1)}), p0));
  CHECK(project(e, {1}, {stars(0)}).coeffs.empty());
}

TEST_CASE("share_multi") {
  Shape s{{"x1", L(U())}, {"x2", L(U())}};
  // linear in x1 only
  ResourcePoly q = parse_poly("{ <[*],[]> : 3; <[],[]> : 1 }", s, 2);
  ResourcePoly p = share_multi(q, 0, 1, "x");
  CHECK(p.shape.size() == 1);
  CHECK(p.shape[0].first == "x");
  CHECK(p.at({stars(1)}) == 3);
  CHECK(p.at({stars(0)}) == 1);
  // C(n,1) C(n,1) = 2 C(n,2) + C(n,1)
  ResourcePoly q2 = parse_poly("{ <[*],[]> : 1; <[],[*]> : 1; <[*],[*]> : 1 }", s, 2);
  ResourcePoly p2 = share_multi(q2, 0, 1, "x");
  CHECK(p2.at({stars(1)}) == 3);
  CHECK(p2.at({stars(2)}) == 2);
  for (std::size_t n = 0; n <= 8; ++n) {
    auto v = unit_list(n);
    CHECK(potential_multi(*v, p2) == potential_multi({v, v}, q2));
  }
  ResourcePoly qc = parse_poly("{ <[],[]> : 4 }", s, 2);
  CHECK(share_multi(qc, 0, 1, "x").at({stars(0)}) == 4);
  // nested lists are outside the fragment
  Shape ns{{"a", L(L(U()))}, {"b", L(L(U()))}};
  ResourcePoly qn = ResourcePoly::of_context(ns, 2);
  qn.set({Index::list({stars(0)}), Index::list({stars(0)})}, R(1));
  CHECK_THROWS_AS(share_multi(qn, 0, 1, "x"), UnsupportedType);
}

TEST_CASE("poly_to_binomial") {
  auto [c0, q0] = poly_to_binomial(0);
  CHECK(c0 == 1);
  CHECK(q0.empty());
  auto [c2, q2] = poly_to_binomial(2);
  CHECK(c2 == 0);
  CHECK(q2 == UniVec{R(1), R(2)});
  auto [c3, q3] = poly_to_binomial(3);
  CHECK(q3 == UniVec{R(1), R(6), R(6)});
  for (long n = 0; n <= 50; ++n) CHECK(c3 + phi(static_cast<std::size_t>(n), q3) == Rational(n * n * n));
}

TEST_CASE("uniform predicates") {
  ResourcePoly q = over_list(2);
  q.set({stars(2)}, R(5));
  q.set({stars(1)}, R(3));
  CHECK(is_uniform(q, 2, R(5)));
  CHECK_FALSE(is_uniform(q, 2, R(4)));
  CHECK(is_uniform(over_list(0), 0, R(0)));

  Shape s{{"x", L(U())}, {"l", L(U())}};
  ResourcePoly p = parse_poly("{ <[*],[]> : 1; <[],[*]> : 1; <[*],[*]> : 1 }", s, 2);
  CHECK(is_uniform_ctx(p, 1, R(1), {"x", "l"}));
  CHECK_FALSE(is_uniform_ctx(p, 1, R(1), {}));  // <[*],[*]> mixes variables at the top degree of x
  ResourcePoly ok = parse_poly("{ <[*],[]> : 2; <[],[*]> : 2; <[],[]> : 9 }", s, 1);
  CHECK(is_uniform_ctx(ok, 1, R(2), {}));
  ResourcePoly hi = parse_poly("{ <[*,*],[]> : 1; <[*],[]> : 2; <[],[*]> : 2 }", s, 2);
  CHECK_FALSE(is_uniform_ctx(hi, 1, R(2), {"l"}));
}
