#pragma once

// Shared by the univariate and multivariate engines.

#include "aara/eval.hpp"
#include "aara/typecheck.hpp"
#include "aara/uni.hpp"

#include <string>

namespace aara::detail {

// Cost of one rule application under a metric, excluding whatever the premises cost.
Rational rule_cost(const Expr& e, CostMetric m);

// The program with rec replaced by its encoding, retypechecked.
struct Prepared {
  ExprPtr expr;
  TypeInfo info;
};
Prepared prepare(const CheckedProgram& cp);

std::string where(const Expr& e);

// (i)! * 1000^i, the weight of a degree-i coefficient in the objective.
Rational degree_weight(std::size_t i);

class Untypable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace aara::detail
