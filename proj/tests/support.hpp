#pragma once

#include "aara/eval.hpp"
#include "aara/potential.hpp"

#include "aara/parser.hpp"
#include "aara/typecheck.hpp"

#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace testing {

using namespace aara;

inline std::mt19937_64& rng() {
  static std::mt19937_64 g(20240611);
  return g;
}

inline std::size_t uniform(std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng());
}

inline Rational small_rational(int max_num = 6, int max_den = 3) {
  long n = static_cast<long>(uniform(0, static_cast<std::size_t>(max_num)));
  long d = static_cast<long>(uniform(1, static_cast<std::size_t>(max_den)));
  return Rational(n, d);
}

inline ValuePtr unit_list(std::size_t n) { return Value::list(std::vector<ValuePtr>(n, Value::triv())); }

// A random value of type t; lists have length <= max_len.
inline ValuePtr random_value(const BaseType& t, std::size_t max_len) {
  switch (t.kind) {
    case BaseType::Kind::Unit: return Value::triv();
    case BaseType::Kind::Sum:
      return uniform(0, 1) ? Value::inl(random_value(*t.left, max_len)) : Value::inr(random_value(*t.right, max_len));
    case BaseType::Kind::Prod: return Value::pair(random_value(*t.left, max_len), random_value(*t.right, max_len));
    case BaseType::Kind::List: {
      std::vector<ValuePtr> xs(uniform(0, max_len));
      for (auto& x : xs) x = random_value(*t.left, max_len / 2 + 1);
      return Value::list(xs);
    }
  }
  return nullptr;
}

inline UniVec random_univec(std::size_t k) {
  UniVec q(k);
  for (auto& x : q) x = small_rational();
  return q;
}

// Random nonnegative coefficients on a random subset of the indexes.
inline ResourcePoly random_poly(const Shape& shape, unsigned d, double density = 0.5) {
  ResourcePoly p = ResourcePoly::of_context(shape, d);
  std::bernoulli_distribution keep(density);
  for (auto& i : indexes_of(shape_types(shape), d))
    if (keep(rng())) p.set(i, small_rational());
  return p;
}

#ifndef AARA_CORPUS_DIR
#define AARA_CORPUS_DIR "corpus"
#endif

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline std::string corpus_path(const std::string& name) { return std::string(AARA_CORPUS_DIR) + "/" + name; }

inline CheckedProgram corpus(const std::string& name) {
  return check_program(parse_program(read_file(corpus_path(name))));
}

inline TypePtr L(TypePtr t) { return BaseType::list(std::move(t)); }
inline TypePtr U() { return BaseType::unit(); }

}  // namespace testing
