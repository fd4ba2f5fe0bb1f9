#pragma once

#include "aara/eval.hpp"
#include "aara/rational.hpp"
#include "aara/syntax.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace aara {

class UnsupportedType : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------- univariate

// (q1, ..., qk); q_i pairs with C(n, i).
using UniVec = std::vector<Rational>;

Rational phi(std::size_t n, const UniVec& q);
UniVec shift_uni(const UniVec& q);
std::string to_string(const UniVec& q);

struct AnnotBase;
using AnnotPtr = std::shared_ptr<const AnnotBase>;

// A base type whose lists carry univariate vectors.
struct AnnotBase {
  BaseType::Kind kind;
  AnnotPtr left, right;  // as in BaseType
  UniVec q;              // List only

  static AnnotPtr unit();
  static AnnotPtr sum(AnnotPtr a, AnnotPtr b);
  static AnnotPtr prod(AnnotPtr a, AnnotPtr b);
  static AnnotPtr list(UniVec q, AnnotPtr elem);
};

AnnotPtr zero_annot(const BaseType& t);
TypePtr erase(const AnnotBase& a);
Rational potential_uni(const Value& v, const AnnotBase& a);
bool subtype_uni(const AnnotBase& a, const AnnotBase& b);
// Does a split into (a1, a2) pointwise?
bool share_uni(const AnnotBase& a, const AnnotBase& a1, const AnnotBase& a2);
std::string to_string(const AnnotBase& a);
AnnotPtr parse_annot(std::string_view text);

struct AnnotSignature {
  AnnotPtr in;
  Rational p;
  AnnotPtr out;
  Rational q;
};
bool subtype_uni(const AnnotSignature& a, const AnnotSignature& b);
std::string to_string(const AnnotSignature& s);

// (q0, q) with q0 + phi(n, q) = n^d.
std::pair<Rational, UniVec> poly_to_binomial(unsigned d);

// ---------------------------------------------------------------- multivariate

struct Index {
  enum class Kind { Star, Inl, Inr, Pair, List };
  Kind kind = Kind::Star;
  std::vector<Index> kids;  // Inl/Inr: one; Pair: two; List: the sequence

  static Index star() { return {}; }
  static Index inl(Index i) { return {Kind::Inl, {std::move(i)}}; }
  static Index inr(Index i) { return {Kind::Inr, {std::move(i)}}; }
  static Index pair(Index a, Index b) { return {Kind::Pair, {std::move(a), std::move(b)}}; }
  static Index list(std::vector<Index> is) { return {Kind::List, std::move(is)}; }
};

int compare(const Index& a, const Index& b);
inline bool operator<(const Index& a, const Index& b) { return compare(a, b) < 0; }
inline bool operator==(const Index& a, const Index& b) { return compare(a, b) == 0; }

unsigned degree(const Index& i);
Index zero_index(const BaseType& t);
bool is_zero(const Index& i);
bool well_formed(const Index& i, const BaseType& t);
// Sorted by degree, then structurally.
std::vector<Index> indexes_of(const BaseType& t, unsigned d);
BigInt base_poly_eval(const Index& i, const Value& v);
std::string to_string(const Index& i);

// A context is one big tuple; its indexes are position-wise.
using CtxIndex = std::vector<Index>;
int compare(const CtxIndex& a, const CtxIndex& b);
struct CtxIndexLess {
  bool operator()(const CtxIndex& a, const CtxIndex& b) const { return compare(a, b) < 0; }
};
unsigned degree(const CtxIndex& i);
CtxIndex zero_index(const std::vector<TypePtr>& ts);
bool is_zero(const CtxIndex& i);
std::vector<CtxIndex> indexes_of(const std::vector<TypePtr>& ts, unsigned d);
std::string to_string(const CtxIndex& i);

using Shape = std::vector<std::pair<std::string, TypePtr>>;
std::vector<TypePtr> shape_types(const Shape& s);

template <class C>
using CoeffMap = std::map<CtxIndex, C, CtxIndexLess>;

struct ResourcePoly {
  Shape shape;  // a single unnamed entry for a base type
  unsigned degree = 0;
  CoeffMap<Rational> coeffs;  // zero entries may be absent

  static ResourcePoly of_type(TypePtr t, unsigned d);
  static ResourcePoly of_context(Shape s, unsigned d);
  Rational at(const CtxIndex& i) const;
  void set(const CtxIndex& i, Rational c);
  void add(const CtxIndex& i, const Rational& c);
  void prune();  // drop zero coefficients
  unsigned max_degree() const;
};

bool poly_equal(const ResourcePoly& a, const ResourcePoly& b);
Rational potential_multi(const std::vector<ValuePtr>& vals, const ResourcePoly& p);
Rational potential_multi(const Value& v, const ResourcePoly& p);

// Image of one base polynomial under a linear transformation of annotations.
struct Term {
  CtxIndex target;
  Rational mult;
};

// pos holds x : L(elem); the image places y at pos and ys at pos + 1.
std::vector<Term> shift_image(const CtxIndex& src, std::size_t pos, const BaseType& elem);
// Positions p1 < p2 hold x1, x2 : t; the image holds x at p1 and drops p2.
std::vector<Term> share_image(const CtxIndex& src, std::size_t p1, std::size_t p2, const BaseType& t);
// p_a * p_b as a combination of base polynomials of t.
std::vector<std::pair<Index, Rational>> product_expand(const Index& a, const Index& b, const BaseType& t);

template <class C, class F>
CoeffMap<C> push_forward(const CoeffMap<C>& m, F&& image) {
  CoeffMap<C> out;
  for (const auto& [src, c] : m)
    for (const Term& t : image(src)) {
      auto [it, fresh] = out.try_emplace(t.target);
      if (t.mult == 1)
        it->second += c;
      else
        it->second += c * t.mult;
    }
  return out;
}

ResourcePoly shift_multi(const ResourcePoly& p, std::size_t pos, std::string y, std::string ys);
ResourcePoly share_multi(const ResourcePoly& q, std::size_t p1, std::size_t p2, std::string x);
// Positions in `cols` form Γ2; the result is over the remaining positions.
ResourcePoly project(const ResourcePoly& p, const std::vector<std::size_t>& cols, const CtxIndex& j);
// Appends Γ2 after Γ1.
ResourcePoly extend(const ResourcePoly& p, const Shape& gamma2, const CtxIndex& r);

bool is_uniform(const ResourcePoly& q, unsigned d, const Rational& n);
bool is_uniform_ctx(const ResourcePoly& p, unsigned d, const Rational& n, const std::vector<std::string>& V);
// n on every degree-d index of t, zero elsewhere.
ResourcePoly uniform_annotation(TypePtr t, unsigned d, const Rational& n);
// Every coefficient whose index is nonzero at v vanishes.
bool zero_potential(const ResourcePoly& p, const std::string& v);

// "P{ <[*],*> : 2; <*,[*]> : 1 }" or "{ [*,*] : 2 }" against a shape.
std::string to_string(const ResourcePoly& p);
ResourcePoly parse_poly(std::string_view text, const Shape& shape, unsigned d);

}  // namespace aara
