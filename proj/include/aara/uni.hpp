#pragma once

#include "aara/eval.hpp"
#include "aara/lp.hpp"
#include "aara/potential.hpp"
#include "aara/typecheck.hpp"

#include <optional>
#include <string>
#include <vector>

namespace aara {

// Raised for shapes the analyses do not handle; reported as Untypable.
class AnalysisUnsupported : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LpStats {
  std::size_t vars = 0;
  std::size_t constraints = 0;
  std::size_t pivots = 0;
  std::size_t body_copies = 0;  // function-body derivations
};

// The entry of a program: the parameters of main, or the parameter of the last definition.
struct EntryInfo {
  bool is_function = false;                                // last definition, analysed as a signature
  std::vector<std::pair<std::string, TypePtr>> params;     // main parameters, or the single parameter
  // Inputs split along curried/tuple parameters, with their source names.
  std::vector<std::pair<std::string, TypePtr>> components;
  TypePtr result;
};
EntryInfo entry_info(const CheckedProgram& cp);

struct UniJudgment {
  std::vector<std::pair<std::string, AnnotPtr>> inputs;
  Rational p;
  AnnotPtr out;
  Rational q;
};
std::string to_string(const UniJudgment& j);

struct UniOptions {
  unsigned degree = 2;
  CostMetric metric = CostMetric::Tick;
  std::size_t max_body_copies = 20000;
  std::optional<AnnotPtr> require_output;  // lower bound on the output annotation
  bool probe_higher_degree = false;        // on failure, try degree + 1 and report it
  bool keep_lp = false;
};

struct UniResult {
  bool ok = false;
  std::string reason;
  std::optional<unsigned> suggested_degree;
  UniJudgment judgment;
  Rational objective;
  LpStats stats;
  std::string lp_dump;
};

UniResult infer_uni(const CheckedProgram& cp, const UniOptions& opt);

// Is the judgment derivable (same constraint system, top-level annotation fixed)?
bool check_uni(const CheckedProgram& cp, const UniJudgment& j, CostMetric metric, unsigned degree);

// Potential of the inputs of a program under a judgment.
Rational input_potential(const UniJudgment& j, const std::vector<ValuePtr>& inputs);

struct SoundnessReport {
  std::size_t runs = 0;
  std::size_t violations = 0;
  std::size_t skipped = 0;  // runtime errors or fuel exhaustion
  Rational min_slack;       // over successful runs: p + Phi(in) - q - Phi(out) - cost
  std::string first_violation;
};

SoundnessReport soundness_probe(const CheckedProgram& cp, const UniJudgment& j, CostMetric metric,
                                const std::vector<std::vector<ValuePtr>>& inputs);

}  // namespace aara
