#pragma once

#include "aara/potential.hpp"
#include "aara/uni.hpp"

#include <optional>
#include <string>
#include <vector>

namespace aara {

// Inputs (main parameters or the entry parameter) with P over them, output with Q.
// The constant potential is the coefficient of the zero index.
struct MultiJudgment {
  ResourcePoly P;
  ResourcePoly Q;
};
std::string to_string(const MultiJudgment& j);

struct MultiOptions {
  unsigned degree = 2;
  CostMetric metric = CostMetric::Tick;
  std::size_t max_body_copies = 20000;
  std::optional<ResourcePoly> require_output;  // pinned exactly
  bool probe_higher_degree = false;
  bool keep_lp = false;
};

struct MultiResult {
  bool ok = false;
  std::string reason;
  std::optional<unsigned> suggested_degree;
  MultiJudgment judgment;
  Rational objective;
  LpStats stats;
  std::string lp_dump;
};

MultiResult infer_multi(const CheckedProgram& cp, const MultiOptions& opt);

// infer_multi with the output annotation fixed to Q.
MultiResult infer_with_output(const CheckedProgram& cp, CostMetric metric, unsigned degree, const ResourcePoly& Q);

bool check_multi(const CheckedProgram& cp, const MultiJudgment& j, CostMetric metric, unsigned degree);

// Shape of the inputs of a program: main parameters, or the single entry parameter.
Shape input_shape(const CheckedProgram& cp);

SoundnessReport soundness_probe(const CheckedProgram& cp, const MultiJudgment& j, CostMetric metric,
                                const std::vector<std::vector<ValuePtr>>& inputs);

}  // namespace aara
