#include "aara/potential.hpp"

#include "lexer.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

namespace aara {

// ---------------------------------------------------------------- univariate

Rational phi(std::size_t n, const UniVec& q) {
  Rational r = 0;
  for (std::size_t i = 0; i < q.size() && i < n; ++i)
    if (q[i] != 0) r += q[i] * Rational(binomial(static_cast<long>(n), static_cast<long>(i + 1)));
  return r;
}

UniVec shift_uni(const UniVec& q) {
  UniVec r = q;
  for (std::size_t i = 0; i + 1 < q.size(); ++i) r[i] += q[i + 1];
  return r;
}

std::string to_string(const UniVec& q) {
  std::string s = "(";
  for (std::size_t i = 0; i < q.size(); ++i) s += (i ? "," : "") + to_string(q[i]);
  return s + ")";
}

AnnotPtr AnnotBase::unit() {
  static const AnnotPtr u = std::make_shared<AnnotBase>(AnnotBase{BaseType::Kind::Unit, nullptr, nullptr, {}});
  return u;
}
AnnotPtr AnnotBase::sum(AnnotPtr a, AnnotPtr b) {
  return std::make_shared<AnnotBase>(AnnotBase{BaseType::Kind::Sum, std::move(a), std::move(b), {}});
}
AnnotPtr AnnotBase::prod(AnnotPtr a, AnnotPtr b) {
  return std::make_shared<AnnotBase>(AnnotBase{BaseType::Kind::Prod, std::move(a), std::move(b), {}});
}
AnnotPtr AnnotBase::list(UniVec q, AnnotPtr elem) {
  return std::make_shared<AnnotBase>(AnnotBase{BaseType::Kind::List, std::move(elem), nullptr, std::move(q)});
}

AnnotPtr zero_annot(const BaseType& t) {
  switch (t.kind) {
    case BaseType::Kind::Unit: return AnnotBase::unit();
    case BaseType::Kind::Sum: return AnnotBase::sum(zero_annot(*t.left), zero_annot(*t.right));
    case BaseType::Kind::Prod: return AnnotBase::prod(zero_annot(*t.left), zero_annot(*t.right));
    case BaseType::Kind::List: return AnnotBase::list({}, zero_annot(*t.left));
  }
  return nullptr;
}

TypePtr erase(const AnnotBase& a) {
  switch (a.kind) {
    case BaseType::Kind::Unit: return BaseType::unit();
    case BaseType::Kind::Sum: return BaseType::sum(erase(*a.left), erase(*a.right));
    case BaseType::Kind::Prod: return BaseType::prod(erase(*a.left), erase(*a.right));
    case BaseType::Kind::List: return BaseType::list(erase(*a.left));
  }
  return nullptr;
}

Rational potential_uni(const Value& v, const AnnotBase& a) {
  using VK = Value::Kind;
  switch (a.kind) {
    case BaseType::Kind::Unit:
      if (v.kind != VK::Triv) break;
      return 0;
    case BaseType::Kind::Sum:
      if (v.kind == VK::Inl) return potential_uni(*v.a, *a.left);
      if (v.kind == VK::Inr) return potential_uni(*v.a, *a.right);
      break;
    case BaseType::Kind::Prod:
      if (v.kind != VK::Pair) break;
      return potential_uni(*v.a, *a.left) + potential_uni(*v.b, *a.right);
    case BaseType::Kind::List: {
      if (!v.is_list()) break;
      Rational r = phi(v.length, a.q);
      for (const Value* p = &v; p->kind == VK::Cons; p = p->b.get()) r += potential_uni(*p->a, *a.left);
      return r;
    }
  }
  throw ShapeError("value " + to_string(v) + " does not fit annotation " + to_string(a));
}

namespace {
Rational at_or_zero(const UniVec& q, std::size_t i) { return i < q.size() ? q[i] : Rational(0); }

bool same_skeleton(const AnnotBase& a, const AnnotBase& b) { return type_equal(*erase(a), *erase(b)); }

bool subtype_rec(const AnnotBase& a, const AnnotBase& b) {
  switch (a.kind) {
    case BaseType::Kind::Unit: return true;
    case BaseType::Kind::Sum:
    case BaseType::Kind::Prod: return subtype_rec(*a.left, *b.left) && subtype_rec(*a.right, *b.right);
    case BaseType::Kind::List:
      for (std::size_t i = 0; i < std::max(a.q.size(), b.q.size()); ++i)
        if (at_or_zero(a.q, i) < at_or_zero(b.q, i)) return false;
      return subtype_rec(*a.left, *b.left);
  }
  return false;
}

bool share_rec(const AnnotBase& a, const AnnotBase& a1, const AnnotBase& a2) {
  switch (a.kind) {
    case BaseType::Kind::Unit: return true;
    case BaseType::Kind::Sum:
    case BaseType::Kind::Prod: return share_rec(*a.left, *a1.left, *a2.left) && share_rec(*a.right, *a1.right, *a2.right);
    case BaseType::Kind::List: {
      std::size_t k = std::max({a.q.size(), a1.q.size(), a2.q.size()});
      for (std::size_t i = 0; i < k; ++i) {
        Rational x1 = at_or_zero(a1.q, i), x2 = at_or_zero(a2.q, i);
        if (x1 < 0 || x2 < 0 || at_or_zero(a.q, i) != x1 + x2) return false;
      }
      return share_rec(*a.left, *a1.left, *a2.left);
    }
  }
  return false;
}

void print_annot(std::ostream& os, const AnnotBase& a, int ctx) {
  switch (a.kind) {
    case BaseType::Kind::Unit: os << "unit"; return;
    case BaseType::Kind::List:
      os << "L^" << to_string(a.q) << "(";
      print_annot(os, *a.left, 0);
      os << ")";
      return;
    case BaseType::Kind::Sum:
      if (ctx > 0) os << "(";
      print_annot(os, *a.left, 1);
      os << " + ";
      print_annot(os, *a.right, 0);
      if (ctx > 0) os << ")";
      return;
    case BaseType::Kind::Prod:
      if (ctx > 1) os << "(";
      print_annot(os, *a.left, 2);
      os << " * ";
      print_annot(os, *a.right, 1);
      if (ctx > 1) os << ")";
      return;
  }
}

Rational number(detail::TokenStream& ts) {
  if (ts.peek().kind != detail::Token::Kind::Number) ts.fail("expected a number");
  return parse_rational(ts.next().text);
}

AnnotPtr annot_sum(detail::TokenStream& ts);
AnnotPtr annot_atom(detail::TokenStream& ts) {
  if (ts.accept("unit")) return AnnotBase::unit();
  if (ts.accept("bool")) return AnnotBase::sum(AnnotBase::unit(), AnnotBase::unit());
  if (ts.accept("L")) {
    UniVec q;
    if (ts.accept("^")) {
      if (ts.accept("(")) {
        q.push_back(number(ts));
        while (ts.accept(",")) q.push_back(number(ts));
        ts.expect(")");
      } else {
        q.push_back(number(ts));
      }
    }
    ts.expect("(");
    auto e = annot_sum(ts);
    ts.expect(")");
    return AnnotBase::list(std::move(q), e);
  }
  if (ts.accept("(")) {
    auto a = annot_sum(ts);
    ts.expect(")");
    return a;
  }
  ts.fail("expected an annotated type");
}
AnnotPtr annot_prod(detail::TokenStream& ts) {
  auto a = annot_atom(ts);
  if (ts.accept("*")) return AnnotBase::prod(a, annot_prod(ts));
  return a;
}
AnnotPtr annot_sum(detail::TokenStream& ts) {
  auto a = annot_prod(ts);
  if (ts.accept("+")) return AnnotBase::sum(a, annot_sum(ts));
  return a;
}
}  // namespace

bool subtype_uni(const AnnotBase& a, const AnnotBase& b) { return same_skeleton(a, b) && subtype_rec(a, b); }

bool share_uni(const AnnotBase& a, const AnnotBase& a1, const AnnotBase& a2) {
  return same_skeleton(a, a1) && same_skeleton(a, a2) && share_rec(a, a1, a2);
}

bool subtype_uni(const AnnotSignature& a, const AnnotSignature& b) {
  return subtype_uni(*b.in, *a.in) && b.p >= a.p && subtype_uni(*a.out, *b.out) && a.q >= b.q;
}

std::string to_string(const AnnotBase& a) {
  std::ostringstream os;
  print_annot(os, a, 0);
  return os.str();
}

std::string to_string(const AnnotSignature& s) {
  return "<" + to_string(*s.in) + ", " + to_string(s.p) + "> -> <" + to_string(*s.out) + ", " + to_string(s.q) + ">";
}

AnnotPtr parse_annot(std::string_view text) {
  detail::TokenStream ts(detail::lex(text));
  auto a = annot_sum(ts);
  if (!ts.at_end()) ts.fail("expected end of annotation");
  return a;
}

std::pair<Rational, UniVec> poly_to_binomial(unsigned d) {
  // coefficients of n^k in the basis C(n, 0..k); n * C(n,k) = k C(n,k) + (k+1) C(n,k+1)
  std::vector<Rational> c{Rational(1)};
  for (unsigned step = 0; step < d; ++step) {
    std::vector<Rational> next(c.size() + 1);
    for (std::size_t k = 0; k < c.size(); ++k) {
      next[k] += Rational(static_cast<long>(k)) * c[k];
      next[k + 1] += Rational(static_cast<long>(k + 1)) * c[k];
    }
    c = std::move(next);
  }
  return {c[0], UniVec(c.begin() + 1, c.end())};
}

// ---------------------------------------------------------------- indexes

unsigned degree(const Index& i) {
  switch (i.kind) {
    case Index::Kind::Star: return 0;
    case Index::Kind::Inl:
    case Index::Kind::Inr: return degree(i.kids[0]);
    case Index::Kind::Pair: return degree(i.kids[0]) + degree(i.kids[1]);
    case Index::Kind::List: {
      unsigned d = static_cast<unsigned>(i.kids.size());
      for (auto& k : i.kids) d += degree(k);
      return d;
    }
  }
  return 0;
}

namespace {
int structural_compare(const Index& a, const Index& b) {
  if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
  if (a.kids.size() != b.kids.size()) return a.kids.size() < b.kids.size() ? -1 : 1;
  for (std::size_t k = 0; k < a.kids.size(); ++k)
    if (int c = structural_compare(a.kids[k], b.kids[k])) return c;
  return 0;
}
}  // namespace

int compare(const Index& a, const Index& b) {
  unsigned da = degree(a), db = degree(b);
  if (da != db) return da < db ? -1 : 1;
  return structural_compare(a, b);
}

Index zero_index(const BaseType& t) {
  switch (t.kind) {
    case BaseType::Kind::Unit:
    case BaseType::Kind::Sum: return Index::star();
    case BaseType::Kind::Prod: return Index::pair(zero_index(*t.left), zero_index(*t.right));
    case BaseType::Kind::List: return Index::list({});
  }
  return {};
}

bool is_zero(const Index& i) { return degree(i) == 0; }

bool well_formed(const Index& i, const BaseType& t) {
  switch (t.kind) {
    case BaseType::Kind::Unit: return i.kind == Index::Kind::Star;
    case BaseType::Kind::Sum:
      if (i.kind == Index::Kind::Star) return true;
      if (i.kind == Index::Kind::Inl) return degree(i.kids[0]) > 0 && well_formed(i.kids[0], *t.left);
      if (i.kind == Index::Kind::Inr) return degree(i.kids[0]) > 0 && well_formed(i.kids[0], *t.right);
      return false;
    case BaseType::Kind::Prod:
      return i.kind == Index::Kind::Pair && well_formed(i.kids[0], *t.left) && well_formed(i.kids[1], *t.right);
    case BaseType::Kind::List:
      if (i.kind != Index::Kind::List) return false;
      for (auto& k : i.kids)
        if (!well_formed(k, *t.left)) return false;
      return true;
  }
  return false;
}

namespace {
void gen_indexes(const BaseType& t, unsigned d, std::vector<Index>& out);

void gen_seqs(const std::vector<Index>& elems, unsigned budget, std::vector<Index>& prefix, std::vector<Index>& out) {
  out.push_back(Index::list(prefix));
  for (const Index& e : elems) {
    unsigned need = 1 + degree(e);
    if (need > budget) continue;
    prefix.push_back(e);
    gen_seqs(elems, budget - need, prefix, out);
    prefix.pop_back();
  }
}

void gen_indexes(const BaseType& t, unsigned d, std::vector<Index>& out) {
  switch (t.kind) {
    case BaseType::Kind::Unit: out.push_back(Index::star()); return;
    case BaseType::Kind::Sum: {
      out.push_back(Index::star());
      std::vector<Index> l, r;
      gen_indexes(*t.left, d, l);
      gen_indexes(*t.right, d, r);
      for (auto& i : l)
        if (degree(i) > 0) out.push_back(Index::inl(i));
      for (auto& i : r)
        if (degree(i) > 0) out.push_back(Index::inr(i));
      return;
    }
    case BaseType::Kind::Prod: {
      std::vector<Index> l;
      gen_indexes(*t.left, d, l);
      for (auto& i : l) {
        std::vector<Index> r;
        gen_indexes(*t.right, d - degree(i), r);
        for (auto& j : r) out.push_back(Index::pair(i, j));
      }
      return;
    }
    case BaseType::Kind::List: {
      if (d == 0) {
        out.push_back(Index::list({}));
        return;
      }
      std::vector<Index> elems;
      gen_indexes(*t.left, d - 1, elems);
      std::vector<Index> prefix;
      gen_seqs(elems, d, prefix, out);
      return;
    }
  }
}
}  // namespace

std::vector<Index> indexes_of(const BaseType& t, unsigned d) {
  std::vector<Index> out;
  gen_indexes(t, d, out);
  std::sort(out.begin(), out.end());
  return out;
}

BigInt base_poly_eval(const Index& i, const Value& v) {
  using VK = Value::Kind;
  switch (i.kind) {
    case Index::Kind::Star: return 1;
    case Index::Kind::Inl:
    case Index::Kind::Inr: {
      VK want = i.kind == Index::Kind::Inl ? VK::Inl : VK::Inr;
      if (v.kind != VK::Inl && v.kind != VK::Inr) break;
      if (v.kind != want) return 0;
      return base_poly_eval(i.kids[0], *v.a);
    }
    case Index::Kind::Pair:
      if (v.kind != VK::Pair) break;
      return base_poly_eval(i.kids[0], *v.a) * base_poly_eval(i.kids[1], *v.b);
    case Index::Kind::List: {
      if (!v.is_list()) break;
      std::size_t k = i.kids.size();
      if (k > v.length) return 0;
      // f[m]: sum over increasing choices for the first m sub-indexes
      std::vector<BigInt> f(k + 1);
      f[0] = 1;
      for (const Value* p = &v; p->kind == VK::Cons; p = p->b.get())
        for (std::size_t m = k; m >= 1; --m)
          if (f[m - 1] != 0) f[m] += f[m - 1] * base_poly_eval(i.kids[m - 1], *p->a);
      return f[k];
    }
  }
  throw ShapeError("index " + to_string(i) + " does not fit value " + to_string(v));
}

std::string to_string(const Index& i) {
  switch (i.kind) {
    case Index::Kind::Star: return "*";
    case Index::Kind::Inl: return "l." + to_string(i.kids[0]);
    case Index::Kind::Inr: return "r." + to_string(i.kids[0]);
    case Index::Kind::Pair: return "<" + to_string(i.kids[0]) + "," + to_string(i.kids[1]) + ">";
    case Index::Kind::List: {
      std::string s = "[";
      for (std::size_t k = 0; k < i.kids.size(); ++k) s += (k ? "," : "") + to_string(i.kids[k]);
      return s + "]";
    }
  }
  return "?";
}

int compare(const CtxIndex& a, const CtxIndex& b) {
  unsigned da = degree(a), db = degree(b);
  if (da != db) return da < db ? -1 : 1;
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  for (std::size_t k = 0; k < a.size(); ++k)
    if (int c = compare(a[k], b[k])) return c;
  return 0;
}

unsigned degree(const CtxIndex& i) {
  unsigned d = 0;
  for (auto& k : i) d += degree(k);
  return d;
}

CtxIndex zero_index(const std::vector<TypePtr>& ts) {
  CtxIndex r;
  for (auto& t : ts) r.push_back(zero_index(*t));
  return r;
}

bool is_zero(const CtxIndex& i) { return degree(i) == 0; }

std::vector<CtxIndex> indexes_of(const std::vector<TypePtr>& ts, unsigned d) {
  std::vector<std::vector<Index>> per;
  for (auto& t : ts) per.push_back(indexes_of(*t, d));
  std::vector<CtxIndex> out;
  CtxIndex cur;
  std::function<void(std::size_t, unsigned)> go = [&](std::size_t pos, unsigned budget) {
    if (pos == ts.size()) {
      out.push_back(cur);
      return;
    }
    for (auto& i : per[pos]) {
      unsigned di = degree(i);
      if (di > budget) continue;
      cur.push_back(i);
      go(pos + 1, budget - di);
      cur.pop_back();
    }
  };
  go(0, d);
  std::sort(out.begin(), out.end(), CtxIndexLess{});
  return out;
}

std::string to_string(const CtxIndex& i) {
  if (i.size() == 1) return to_string(i[0]);
  std::string s = "<";
  for (std::size_t k = 0; k < i.size(); ++k) s += (k ? "," : "") + to_string(i[k]);
  return s + ">";
}

// ---------------------------------------------------------------- resource polynomials

std::vector<TypePtr> shape_types(const Shape& s) {
  std::vector<TypePtr> r;
  for (auto& [n, t] : s) r.push_back(t);
  return r;
}

ResourcePoly ResourcePoly::of_type(TypePtr t, unsigned d) { return {{{"", std::move(t)}}, d, {}}; }
ResourcePoly ResourcePoly::of_context(Shape s, unsigned d) { return {std::move(s), d, {}}; }

Rational ResourcePoly::at(const CtxIndex& i) const {
  auto it = coeffs.find(i);
  return it == coeffs.end() ? Rational(0) : it->second;
}

void ResourcePoly::set(const CtxIndex& i, Rational c) {
  if (c == 0)
    coeffs.erase(i);
  else
    coeffs[i] = std::move(c);
}

void ResourcePoly::add(const CtxIndex& i, const Rational& c) {
  if (c != 0) set(i, at(i) + c);
}

void ResourcePoly::prune() { std::erase_if(coeffs, [](const auto& kv) { return kv.second == 0; }); }

unsigned ResourcePoly::max_degree() const {
  unsigned d = 0;
  for (auto& [i, c] : coeffs)
    if (c != 0) d = std::max(d, aara::degree(i));
  return d;
}

bool poly_equal(const ResourcePoly& a, const ResourcePoly& b) {
  if (a.shape.size() != b.shape.size()) return false;
  for (std::size_t k = 0; k < a.shape.size(); ++k)
    if (!type_equal(*a.shape[k].second, *b.shape[k].second)) return false;
  std::set<CtxIndex, CtxIndexLess> keys;
  for (auto& [i, c] : a.coeffs) keys.insert(i);
  for (auto& [i, c] : b.coeffs) keys.insert(i);
  for (auto& i : keys)
    if (a.at(i) != b.at(i)) return false;
  return true;
}

Rational potential_multi(const std::vector<ValuePtr>& vals, const ResourcePoly& p) {
  if (vals.size() != p.shape.size()) throw ShapeError("value tuple does not match the annotation's context");
  Rational r = 0;
  for (auto& [idx, c] : p.coeffs) {
    if (c == 0) continue;
    BigInt prod = 1;
    for (std::size_t k = 0; k < vals.size() && prod != 0; ++k) prod *= base_poly_eval(idx[k], *vals[k]);
    r += c * Rational(prod);
  }
  return r;
}

Rational potential_multi(const Value& v, const ResourcePoly& p) {
  if (p.shape.size() != 1) throw ShapeError("annotation is not over a single base type");
  Rational r = 0;
  for (auto& [idx, c] : p.coeffs)
    if (c != 0) r += c * Rational(base_poly_eval(idx[0], v));
  return r;
}

std::vector<Term> shift_image(const CtxIndex& src, std::size_t pos, const BaseType& elem) {
  const Index& l = src[pos];
  if (l.kind != Index::Kind::List) throw ShapeError("shift position does not hold a list index");
  auto with = [&](Index head, Index tail) {
    CtxIndex t;
    t.reserve(src.size() + 1);
    t.insert(t.end(), src.begin(), src.begin() + static_cast<long>(pos));
    t.push_back(std::move(head));
    t.push_back(std::move(tail));
    t.insert(t.end(), src.begin() + static_cast<long>(pos) + 1, src.end());
    return t;
  };
  if (l.kids.empty()) return {{with(zero_index(elem), l), 1}};
  std::vector<Index> rest(l.kids.begin() + 1, l.kids.end());
  return {{with(l.kids[0], Index::list(std::move(rest))), 1}, {with(zero_index(elem), l), 1}};
}

std::vector<std::pair<Index, Rational>> product_expand(const Index& a, const Index& b, const BaseType& t) {
  switch (t.kind) {
    case BaseType::Kind::Unit: return {{Index::star(), 1}};
    case BaseType::Kind::Sum: {
      if (a.kind == Index::Kind::Star) return {{b, 1}};
      if (b.kind == Index::Kind::Star) return {{a, 1}};
      if (a.kind != b.kind) return {};
      bool left = a.kind == Index::Kind::Inl;
      auto inner = product_expand(a.kids[0], b.kids[0], left ? *t.left : *t.right);
      std::vector<std::pair<Index, Rational>> out;
      for (auto& [j, c] : inner) {
        if (degree(j) == 0) throw std::logic_error("constant term in the product of two nonconstant base polynomials");
        out.emplace_back(left ? Index::inl(j) : Index::inr(j), c);
      }
      return out;
    }
    case BaseType::Kind::Prod: {
      auto l = product_expand(a.kids[0], b.kids[0], *t.left);
      auto r = product_expand(a.kids[1], b.kids[1], *t.right);
      std::vector<std::pair<Index, Rational>> out;
      for (auto& [i, ci] : l)
        for (auto& [j, cj] : r) out.emplace_back(Index::pair(i, j), ci * cj);
      return out;
    }
    case BaseType::Kind::List: {
      if (contains_list(*t.left)) throw UnsupportedType("sharing is supported for non-nested lists only, got " + to_string(t));
      long ka = static_cast<long>(a.kids.size()), kb = static_cast<long>(b.kids.size());
      Index z = zero_index(*t.left);
      std::vector<std::pair<Index, Rational>> out;
      // C(n,a) C(n,b) = sum_k C(k,a) C(a, a+b-k) C(n,k)
      for (long k = std::max(ka, kb); k <= ka + kb; ++k) {
        BigInt c = binomial(k, ka) * binomial(ka, ka + kb - k);
        if (c != 0) out.emplace_back(Index::list(std::vector<Index>(static_cast<std::size_t>(k), z)), Rational(c));
      }
      return out;
    }
  }
  return {};
}

std::vector<Term> share_image(const CtxIndex& src, std::size_t p1, std::size_t p2, const BaseType& t) {
  std::vector<Term> out;
  for (auto& [j, c] : product_expand(src[p1], src[p2], t)) {
    CtxIndex target;
    target.reserve(src.size() - 1);
    for (std::size_t k = 0; k < src.size(); ++k) {
      if (k == p2) continue;
      target.push_back(k == p1 ? j : src[k]);
    }
    out.push_back({std::move(target), c});
  }
  return out;
}

ResourcePoly shift_multi(const ResourcePoly& p, std::size_t pos, std::string y, std::string ys) {
  const TypePtr& lt = p.shape.at(pos).second;
  if (!lt->is_list()) throw ShapeError("shift of a non-list variable");
  ResourcePoly r;
  r.degree = p.degree;
  r.shape = p.shape;
  r.shape[pos] = {std::move(y), lt->elem()};
  r.shape.insert(r.shape.begin() + static_cast<long>(pos) + 1, {std::move(ys), lt});
  r.coeffs = push_forward(p.coeffs, [&](const CtxIndex& s) { return shift_image(s, pos, *lt->elem()); });
  r.prune();
  return r;
}

ResourcePoly share_multi(const ResourcePoly& q, std::size_t p1, std::size_t p2, std::string x) {
  if (p1 >= p2 || p2 >= q.shape.size()) throw std::invalid_argument("share positions out of order");
  const TypePtr& t = q.shape[p1].second;
  if (!type_equal(*t, *q.shape[p2].second)) throw ShapeError("shared copies have different types");
  ResourcePoly r;
  r.degree = q.degree;
  r.shape = q.shape;
  r.shape[p1].first = std::move(x);
  r.shape.erase(r.shape.begin() + static_cast<long>(p2));
  r.coeffs = push_forward(q.coeffs, [&](const CtxIndex& s) { return share_image(s, p1, p2, *t); });
  r.prune();
  return r;
}

ResourcePoly project(const ResourcePoly& p, const std::vector<std::size_t>& cols, const CtxIndex& j) {
  if (cols.size() != j.size()) throw std::invalid_argument("projection index does not match the columns");
  std::vector<bool> in(p.shape.size(), false);
  for (auto c : cols) in.at(c) = true;
  ResourcePoly r;
  r.degree = p.degree >= degree(j) ? p.degree - degree(j) : 0;
  for (std::size_t k = 0; k < p.shape.size(); ++k)
    if (!in[k]) r.shape.push_back(p.shape[k]);
  for (auto& [src, c] : p.coeffs) {
    bool match = true;
    for (std::size_t m = 0; m < cols.size() && match; ++m) match = src[cols[m]] == j[m];
    if (!match || c == 0) continue;
    CtxIndex key;
    for (std::size_t k = 0; k < src.size(); ++k)
      if (!in[k]) key.push_back(src[k]);
    r.coeffs[key] = c;
  }
  return r;
}

ResourcePoly extend(const ResourcePoly& p, const Shape& gamma2, const CtxIndex& r) {
  if (gamma2.size() != r.size()) throw std::invalid_argument("extension index does not match the context");
  ResourcePoly out;
  out.degree = p.degree + degree(r);
  out.shape = p.shape;
  out.shape.insert(out.shape.end(), gamma2.begin(), gamma2.end());
  for (auto& [src, c] : p.coeffs) {
    CtxIndex key = src;
    key.insert(key.end(), r.begin(), r.end());
    out.coeffs[key] = c;
  }
  return out;
}

bool is_uniform(const ResourcePoly& q, unsigned d, const Rational& n) {
  if (q.max_degree() > d) return false;
  for (auto& i : indexes_of(shape_types(q.shape), d))
    if (degree(i) == d && q.at(i) != n) return false;
  return true;
}

bool is_uniform_ctx(const ResourcePoly& p, unsigned d, const Rational& n, const std::vector<std::string>& V) {
  for (std::size_t v = 0; v < p.shape.size(); ++v) {
    if (std::find(V.begin(), V.end(), p.shape[v].first) != V.end()) continue;
    for (auto& [idx, c] : p.coeffs) {
      if (c == 0) continue;
      unsigned dv = degree(idx[v]);
      if (dv > d) return false;
      if (dv == d && degree(idx) != dv) return false;
    }
    CtxIndex key = zero_index(shape_types(p.shape));
    for (auto& i : indexes_of(*p.shape[v].second, d)) {
      if (degree(i) != d) continue;
      key[v] = i;
      if (p.at(key) != n) return false;
    }
  }
  return true;
}

ResourcePoly uniform_annotation(TypePtr t, unsigned d, const Rational& n) {
  ResourcePoly q = ResourcePoly::of_type(t, d);
  for (auto& i : indexes_of(*t, d))
    if (degree(i) == d) q.set({i}, n);
  return q;
}

bool zero_potential(const ResourcePoly& p, const std::string& v) {
  for (std::size_t k = 0; k < p.shape.size(); ++k) {
    if (p.shape[k].first != v) continue;
    for (auto& [idx, c] : p.coeffs)
      if (c != 0 && !is_zero(idx[k])) return false;
  }
  return true;
}

std::string to_string(const ResourcePoly& p) {
  std::string s = "{";
  bool first = true;
  for (auto& [i, c] : p.coeffs) {
    if (c == 0) continue;
    s += (first ? " " : "; ") + to_string(i) + " : " + to_string(c);
    first = false;
  }
  return s + (first ? "}" : " }");
}

namespace {
Index parse_index(detail::TokenStream& ts, const BaseType& t) {
  if (ts.is("*") && t.kind != BaseType::Kind::Sum && t.kind != BaseType::Kind::Unit) {
    ts.next();
    return zero_index(t);
  }
  switch (t.kind) {
    case BaseType::Kind::Unit: ts.expect("*"); return Index::star();
    case BaseType::Kind::Sum: {
      if (ts.accept("*")) return Index::star();
      bool left;
      if (ts.accept("l") || ts.accept("inl"))
        left = true;
      else if (ts.accept("r") || ts.accept("inr"))
        left = false;
      else
        ts.fail("expected a sum index");
      ts.accept(".");
      Index k = parse_index(ts, left ? *t.left : *t.right);
      if (degree(k) == 0) ts.fail("tagged sum indexes need positive degree; use *");
      return left ? Index::inl(k) : Index::inr(k);
    }
    case BaseType::Kind::Prod: {
      ts.expect("<");
      Index a = parse_index(ts, *t.left);
      ts.expect(",");
      Index b = parse_index(ts, *t.right);
      ts.expect(">");
      return Index::pair(a, b);
    }
    case BaseType::Kind::List: {
      if (ts.accept("[]")) return Index::list({});
      ts.expect("[");
      std::vector<Index> ks;
      ks.push_back(parse_index(ts, *t.left));
      while (ts.accept(",")) ks.push_back(parse_index(ts, *t.left));
      ts.expect("]");
      return Index::list(std::move(ks));
    }
  }
  ts.fail("bad index");
}
}  // namespace

ResourcePoly parse_poly(std::string_view text, const Shape& shape, unsigned d) {
  detail::TokenStream ts(detail::lex(text));
  if (ts.peek().kind == detail::Token::Kind::Ident && ts.is("{", 1)) ts.next();
  ts.expect("{");
  ResourcePoly p = ResourcePoly::of_context(shape, d);
  while (!ts.is("}")) {
    CtxIndex idx;
    if (shape.size() == 1) {
      idx.push_back(parse_index(ts, *shape[0].second));
    } else {
      ts.expect("<");
      for (std::size_t k = 0; k < shape.size(); ++k) {
        if (k) ts.expect(",");
        idx.push_back(parse_index(ts, *shape[k].second));
      }
      ts.expect(">");
    }
    ts.expect(":");
    if (ts.peek().kind != detail::Token::Kind::Number) ts.fail("expected a coefficient");
    Rational c = parse_rational(ts.next().text);
    if (degree(idx) > d) ts.fail("index " + to_string(idx) + " exceeds degree " + std::to_string(d));
    p.add(idx, c);
    if (!ts.accept(";")) break;
  }
  ts.expect("}");
  if (!ts.at_end()) ts.fail("expected end of annotation");
  return p;
}

}  // namespace aara
