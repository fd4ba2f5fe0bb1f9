#pragma once

#include "aara/syntax.hpp"

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace aara {

class TypeError : public SyntaxError {
 public:
  using SyntaxError::SyntaxError;
};

class AffinityError : public TypeError {
 public:
  using TypeError::TypeError;
};

using TypingContext = std::vector<std::pair<std::string, SimpleType>>;

// Simple type of every sub-expression; unconstrained type variables default to unit.
struct TypeInfo {
  std::unordered_map<const Expr*, SimpleType> types;
  const SimpleType& of(const Expr& e) const;
  const TypePtr& base_of(const Expr& e) const;
};

SimpleType typecheck(const TypingContext& ctx, const ExprPtr& e, TypeInfo* info = nullptr);

struct CheckedProgram {
  Program program;
  ExprPtr expr;  // program.to_expr()
  TypingContext context;
  TypeInfo info;
  SimpleType type;

  const SimpleType& def_type(const std::string& name) const;
};

CheckedProgram check_program(Program p);

// Type of a variable bound somewhere inside e (binders are unique), or null.
struct BinderTypes {
  std::unordered_map<std::string, SimpleType> types;
};
BinderTypes binder_types(const TypingContext& ctx, const Expr& e, const TypeInfo& info);

}  // namespace aara
