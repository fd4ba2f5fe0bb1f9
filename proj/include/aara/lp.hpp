#pragma once

#include "aara/rational.hpp"

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace aara {

// A nonnegative unknown.
struct LinVar {
  std::size_t id = 0;
};

class LinExpr {
 public:
  LinExpr() = default;
  LinExpr(Rational c) : constant_(std::move(c)) {}  // NOLINT(google-explicit-constructor)
  LinExpr(long c) : constant_(c) {}                 // NOLINT(google-explicit-constructor)
  LinExpr(LinVar v) { terms_[v.id] = 1; }           // NOLINT(google-explicit-constructor)

  LinExpr& operator+=(const LinExpr& o);
  LinExpr& operator-=(const LinExpr& o);
  LinExpr& operator*=(const Rational& k);
  friend LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
  friend LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
  friend LinExpr operator*(LinExpr a, const Rational& k) { return a *= k; }
  friend LinExpr operator*(const Rational& k, LinExpr a) { return a *= k; }
  LinExpr operator-() const { return *this * Rational(-1); }

  const std::map<std::size_t, Rational>& terms() const { return terms_; }
  const Rational& constant() const { return constant_; }
  bool is_constant() const { return terms_.empty(); }
  Rational eval(const std::vector<Rational>& values) const;

 private:
  std::map<std::size_t, Rational> terms_;
  Rational constant_;
};

enum class Rel { Le, Eq, Ge };

// expr rel 0
struct Constraint {
  LinExpr expr;
  Rel rel;
  std::string tag;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };
std::string to_string(LpStatus s);

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<Rational> values;  // indexed by LinVar::id
  Rational objective;
  std::size_t pivots = 0;
  std::string reason;  // tag of a violated constant constraint, if any

  const Rational& value(LinVar v) const { return values.at(v.id); }
  Rational eval(const LinExpr& e) const { return e.eval(values); }
};

class LpProblem {
 public:
  LinVar var(std::string tag);
  void add(const LinExpr& lhs, Rel rel, const LinExpr& rhs, std::string tag = {});
  void ge(const LinExpr& lhs, const LinExpr& rhs, std::string tag = {}) { add(lhs, Rel::Ge, rhs, std::move(tag)); }
  void eq(const LinExpr& lhs, const LinExpr& rhs, std::string tag = {}) { add(lhs, Rel::Eq, rhs, std::move(tag)); }
  void minimize(LinExpr obj) { objective_ = std::move(obj); }

  std::size_t num_vars() const { return tags_.size(); }
  const std::string& tag(LinVar v) const { return tags_.at(v.id); }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const LinExpr& objective() const { return objective_; }
  // A constraint without unknowns that does not hold.
  const std::string* violated_constant() const { return violated_.empty() ? nullptr : &violated_; }

  // One constraint per line.
  std::string dump() const;

 private:
  std::vector<std::string> tags_;
  std::vector<Constraint> constraints_;
  LinExpr objective_;
  std::string violated_;
};

// Two-phase simplex over exact rationals. Deterministic for a fixed problem.
LpSolution solve(const LpProblem& p);

// Exact feasibility of an assignment (nonnegativity included).
bool check(const LpProblem& p, const std::vector<Rational>& values, std::string* failed = nullptr);

}  // namespace aara
