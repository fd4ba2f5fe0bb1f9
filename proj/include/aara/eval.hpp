#pragma once

#include "aara/syntax.hpp"
#include "aara/typecheck.hpp"

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace aara {

enum class CostMetric { RunningTime, Tick, CostFree };

std::string to_string(CostMetric m);
CostMetric parse_metric(std::string_view s);  // "time" | "tick" | "costfree"

struct Value;
using ValuePtr = std::shared_ptr<const Value>;
struct EnvNode;
using Env = std::shared_ptr<const EnvNode>;

// Lists are cons cells carrying their length.
struct Value {
  enum class Kind { Triv, Inl, Inr, Pair, Nil, Cons, Closure };
  Kind kind;
  ValuePtr a, b;  // Inl/Inr payload in a; Pair components; Cons head and tail
  std::size_t length = 0;
  Env env;     // Closure
  ExprPtr fn;  // Closure: Fun or Lambda node

  static ValuePtr triv();
  static ValuePtr inl(ValuePtr v);
  static ValuePtr inr(ValuePtr v);
  static ValuePtr pair(ValuePtr a, ValuePtr b);
  static ValuePtr nil();
  static ValuePtr cons(ValuePtr h, ValuePtr t);
  static ValuePtr list(const std::vector<ValuePtr>& elems);
  static ValuePtr closure(Env env, ExprPtr fn);

  bool is_list() const { return kind == Kind::Nil || kind == Kind::Cons; }
};

std::vector<ValuePtr> list_elems(const ValuePtr& v);
bool value_equal(const Value& a, const Value& b);
std::string to_string(const Value& v);
inline std::string to_string(const ValuePtr& v) { return to_string(*v); }
ValuePtr parse_value(std::string_view text);
// Does v inhabit t?
bool has_type(const Value& v, const BaseType& t);

struct EnvNode {
  std::string name;
  ValuePtr value;
  Env next;
};
Env env_bind(Env env, std::string name, ValuePtr v);
ValuePtr env_lookup(const Env& env, const std::string& name);

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class FuelExhausted : public EvalError {
 public:
  using EvalError::EvalError;
};
// Raised by the `error` primitive.
class RuntimeError : public EvalError {
 public:
  using EvalError::EvalError;
};
// A well-typed program never gets stuck.
class StuckError : public EvalError {
 public:
  using EvalError::EvalError;
};

constexpr std::uint64_t kDefaultFuel = 10'000'000;

struct EvalResult {
  ValuePtr value;
  Rational cost;
  std::uint64_t steps = 0;  // rule applications
};

EvalResult eval(const Env& env, const ExprPtr& e, CostMetric metric, std::uint64_t fuel = kDefaultFuel);

// Applies a closure to an argument.
EvalResult apply(const ValuePtr& closure, const ValuePtr& arg, CostMetric metric, std::uint64_t fuel = kDefaultFuel);

// Cost of applying a closed arrow-typed program to input.
Rational measure_cost(const ExprPtr& program, const ValuePtr& input, CostMetric metric,
                      std::uint64_t fuel = kDefaultFuel);

// Runs a checked program: main on the given parameter values, or the entry function on inputs[0].
EvalResult run_program(const CheckedProgram& cp, const std::vector<ValuePtr>& inputs, CostMetric metric,
                       std::uint64_t fuel = kDefaultFuel);

// Running-time overhead of the general-recursion encoding of rec, given the number of
// base-typed free variables of the nil branch.
struct RecOverhead {
  int setup;  // before the first call, including its application
  int call;   // entering each call: the two case rules
  int nil;    // unpacking the captured variables
  int cons;   // per step, including the recursive application
};
RecOverhead rec_overhead(std::size_t captured);

// Replaces every rec by its encoding with fun, let, share and case.
ExprPtr desugar_rec(const TypingContext& ctx, const ExprPtr& e);

}  // namespace aara
