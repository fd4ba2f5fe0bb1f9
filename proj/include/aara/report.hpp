#pragma once

// Closed-form bounds and the reports printed by the command-line tool.

#include "aara/ip.hpp"
#include "aara/multi.hpp"
#include "aara/tm.hpp"
#include "aara/uni.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace aara {

// A polynomial in the sizes of named inputs; exponent vectors index `vars`.
struct SizePoly {
  std::vector<std::string> vars;
  std::map<std::vector<unsigned>, Rational> terms;
};

// The input potential p + Phi(inputs) as a polynomial in component sizes, when it
// depends on list lengths only.
std::optional<SizePoly> size_poly(const UniJudgment& j, const EntryInfo& ei);
std::optional<SizePoly> size_poly(const MultiJudgment& j, const EntryInfo& ei);

// Standard form, with the top-degree part folded into c*(x+y+...)^k when it has that shape.
std::string render(const SizePoly& p);

// `names` replaces the default |component| labels.
std::string render_bound(const UniJudgment& j, const EntryInfo& ei, const std::vector<std::string>& names = {});
std::string render_bound(const MultiJudgment& j, const EntryInfo& ei, const std::vector<std::string>& names = {});

struct AnalysisReport {
  static constexpr int kVersion = 1;
  std::string program;
  std::string mode;  // uni | multi | ip | eval | tm
  unsigned degree = 0;
  std::string metric;
  bool ok = false;
  std::string signature;
  std::string rejection;
  std::string bound;
  std::optional<LpStats> lp;
  std::vector<std::pair<std::string, std::string>> details;
  std::optional<double> timing_ms;  // never part of the structured form
};

std::string to_text(const AnalysisReport& r);
std::string to_json(const AnalysisReport& r);

// With opt.keep_lp, the problem text goes to *lp_dump.
AnalysisReport report_uni(const std::string& id, const CheckedProgram& cp, const UniOptions& opt,
                          std::string* lp_dump = nullptr);
AnalysisReport report_multi(const std::string& id, const CheckedProgram& cp, const MultiOptions& opt,
                            std::string* lp_dump = nullptr);
AnalysisReport report_ip(const std::string& id, const CheckedProgram& cp);
AnalysisReport report_eval(const std::string& id, const CheckedProgram& cp, const std::vector<ValuePtr>& inputs,
                           CostMetric metric, std::uint64_t fuel);
AnalysisReport report_tm(const std::string& id, const TmSpec& spec, std::size_t max_len);

}  // namespace aara
