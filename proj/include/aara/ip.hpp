#pragma once

// Inherently polynomial time: which base variables the running time of an
// expression may depend on polynomially.

#include "aara/typecheck.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace aara {

enum class TimeClass { Const, Poly };
std::string to_string(TimeClass t);

using TimeEnv = std::map<std::string, TimeClass>;
using VarSet = std::set<std::string>;

struct IpStep {
  std::string rule;  // "IP:Rec", ...
  std::string at;    // "@line:col" or ""
  VarSet V;
};

struct IpResult {
  TimeEnv delta;                 // every arrow variable classified along the way
  VarSet V;                      // least V for a base-typed expression
  std::optional<TimeClass> time; // set when the expression is arrow-typed
  std::vector<IpStep> trace;     // post-order
};

struct IpRejection {
  Span span;
  std::string obligation;
};

struct IpOutcome {
  bool accepted = false;
  IpResult result;
  IpRejection rejection;
};

// `delta` classifies arrow variables of ctx; unlisted ones count as Poly.
IpOutcome check_ip(const TypingContext& ctx, const ExprPtr& e, const TimeEnv& delta = {});
IpOutcome check_ip(const CheckedProgram& cp);

// Declarative check of  Δ; Γ ⊢ e poly^V  for a given V (weakening allowed anywhere).
bool ip_derivable(const TypingContext& ctx, const ExprPtr& e, const VarSet& V, const TimeEnv& delta = {});

// Lambda in an empty base context: Const, Poly, or a rejection.
IpOutcome classify_arrow(const TypingContext& ctx, const ExprPtr& lambda, const TimeEnv& delta = {});

struct AssumptionViolation {
  enum class Kind { ShareZeroPotential, NestedListMatch };
  Kind kind;
  std::string variable;
  Span span;
  std::string message() const;
};

// Scans the derivation whose root carries result.V.
std::vector<AssumptionViolation> check_assumption(const TypingContext& ctx, const ExprPtr& e, const IpResult& result);
std::vector<AssumptionViolation> check_assumption(const CheckedProgram& cp, const IpResult& result);

}  // namespace aara
