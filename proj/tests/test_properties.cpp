// Randomised algebraic laws of the potential module, 10^4 cases each, exact arithmetic.

#include "support.hpp"

#include <doctest.h>

using namespace aara;
using namespace testing;

namespace {

constexpr int kCases = 10000;

TypePtr pick_elem() {
  switch (uniform(0, 2)) {
    case 0: return U();
    case 1: return BaseType::sum(U(), U());
    default: return L(U());
  }
}

TypePtr random_type(int depth) {
  std::size_t k = depth <= 0 ? 0 : uniform(0, 3);
  switch (k) {
    case 0: return U();
    case 1: return BaseType::sum(random_type(depth - 1), random_type(depth - 1));
    case 2: return BaseType::prod(random_type(depth - 1), random_type(depth - 1));
    default: return L(random_type(depth - 1));
  }
}

AnnotPtr random_annot(const BaseType& t, unsigned d) {
  switch (t.kind) {
    case BaseType::Kind::Unit: return AnnotBase::unit();
    case BaseType::Kind::Sum: return AnnotBase::sum(random_annot(*t.left, d), random_annot(*t.right, d));
    case BaseType::Kind::Prod: return AnnotBase::prod(random_annot(*t.left, d), random_annot(*t.right, d));
    case BaseType::Kind::List: return AnnotBase::list(random_univec(d), random_annot(*t.left, d));
  }
  return nullptr;
}

// Pointwise smaller or equal.
AnnotPtr lower(const AnnotBase& a) {
  switch (a.kind) {
    case BaseType::Kind::Unit: return AnnotBase::unit();
    case BaseType::Kind::Sum: return AnnotBase::sum(lower(*a.left), lower(*a.right));
    case BaseType::Kind::Prod: return AnnotBase::prod(lower(*a.left), lower(*a.right));
    case BaseType::Kind::List: {
      UniVec q = a.q;
      for (auto& x : q) x -= small_rational() * x / 6;
      return AnnotBase::list(q, lower(*a.left));
    }
  }
  return nullptr;
}

}  // namespace

TEST_CASE("phi shift identity") {
  for (int k = 0; k < kCases; ++k) {
    UniVec q = random_univec(uniform(1, 5));
    std::size_t n = uniform(0, 30);
    REQUIRE(phi(n + 1, q) == q[0] + phi(n, shift_uni(q)));
  }
}

TEST_CASE("multivariate shift conserves potential") {
  for (int k = 0; k < kCases; ++k) {
    TypePtr elem = pick_elem();
    Shape shape{{"w", L(U())}, {"x", L(elem)}};
    if (uniform(0, 1)) std::swap(shape[0], shape[1]);
    std::size_t pos = shape[0].first == "x" ? 0 : 1;
    unsigned d = static_cast<unsigned>(uniform(0, 3));
    ResourcePoly p = random_poly(shape, d, 0.4);
    ValuePtr y = random_value(*elem, 4), ys = random_value(*L(elem), 6), w = random_value(*L(U()), 6);
    ValuePtr x = Value::cons(y, ys);
    ResourcePoly s = shift_multi(p, pos, "y", "ys");
    std::vector<ValuePtr> before = pos == 0 ? std::vector{x, w} : std::vector{w, x};
    std::vector<ValuePtr> after = pos == 0 ? std::vector{y, ys, w} : std::vector{w, y, ys};
    REQUIRE(potential_multi(before, p) == potential_multi(after, s));
  }
}

TEST_CASE("sharing conserves potential") {
  for (int k = 0; k < kCases; ++k) {
    TypePtr t = uniform(0, 1) ? L(U()) : L(BaseType::sum(U(), U()));
    Shape shape{{"x1", t}, {"w", L(U())}, {"x2", t}};
    unsigned d = static_cast<unsigned>(uniform(0, 3));
    ResourcePoly q = random_poly(shape, d, 0.4);
    ValuePtr v = random_value(*t, 8), w = random_value(*L(U()), 6);
    ResourcePoly p = share_multi(q, 0, 2, "x");
    REQUIRE(potential_multi({v, w, v}, q) == potential_multi({v, w}, p));
  }
}

TEST_CASE("projection and extension") {
  Shape g1{{"a", L(U())}, {"b", L(U())}}, g2{{"c", L(U())}};
  for (int k = 0; k < kCases; ++k) {
    unsigned d = static_cast<unsigned>(uniform(1, 3));
    Shape whole = g1;
    whole.push_back(g2[0]);
    ResourcePoly p = random_poly(whole, d, 0.5);
    // Phi(g1, g2; P) = sum_j p_j(g2) * Phi(g1; P restricted to j)
    std::vector<ValuePtr> vs{random_value(*L(U()), 6), random_value(*L(U()), 6), random_value(*L(U()), 6)};
    Rational sum = 0;
    for (auto& j : indexes_of(shape_types(g2), d))
      sum += Rational(base_poly_eval(j[0], *vs[2])) * potential_multi({vs[0], vs[1]}, project(p, {2}, j));
    REQUIRE(sum == potential_multi(vs, p));

    // extend puts a polynomial at one index r; projecting back recovers it
    ResourcePoly q = random_poly(g1, d, 0.5);
    auto js = indexes_of(shape_types(g2), d);
    const CtxIndex& r = js[uniform(0, js.size() - 1)];
    ResourcePoly e = extend(q, g2, r);
    REQUIRE(poly_equal(project(e, {2}, r), q));
    for (auto& j : js)
      if (compare(j, r) != 0) REQUIRE(project(e, {2}, j).coeffs.empty());
  }
}

TEST_CASE("poly_to_binomial exactness") {
  std::vector<std::pair<Rational, UniVec>> table;
  for (unsigned d = 0; d <= 6; ++d) table.push_back(poly_to_binomial(d));
  for (int k = 0; k < kCases; ++k) {
    unsigned d = static_cast<unsigned>(uniform(0, 6));
    std::size_t n = uniform(0, 50);
    auto& [c, q] = table[d];
    REQUIRE(c + phi(n, q) == Rational(boost::multiprecision::pow(BigInt(n), d)));
  }
}

TEST_CASE("subtyping implies potential dominance") {
  for (int k = 0; k < kCases; ++k) {
    TypePtr t = random_type(3);
    unsigned d = static_cast<unsigned>(uniform(1, 3));
    AnnotPtr a = random_annot(*t, d), b = lower(*a);
    REQUIRE(subtype_uni(*a, *b));
    ValuePtr v = random_value(*t, 6);
    REQUIRE(potential_uni(*v, *a) >= potential_uni(*v, *b));
  }
}
