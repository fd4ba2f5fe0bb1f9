#pragma once

// Single-tape Turing machines over {0,1} and their compilation to RaML-lite.

#include "aara/eval.hpp"
#include "aara/potential.hpp"
#include "aara/typecheck.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace aara {

enum class Sym { Zero, One, LeftEnd, Blank };
enum class Move { L, R };

char sym_char(Sym s);  // '0' '1' '>' '_'

struct Transition {
  std::size_t next;
  Sym write;
  Move move;
};

struct TuringMachine {
  std::vector<std::string> states;
  std::size_t start = 0;
  std::size_t final = 0;
  std::map<std::pair<std::size_t, Sym>, Transition> delta;

  std::size_t state(const std::string& name) const;
};

class TmError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class StepLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Totality on non-final states and the left-end discipline.
void validate(const TuringMachine& m);

// p(n) = q0 + sum_i q[i-1] * C(n, i)
struct PolyBound {
  BigInt q0 = 0;
  std::vector<BigInt> q;

  unsigned degree() const;
  BigInt operator()(std::size_t n) const;
  std::string to_string() const;
};

// n^d as a bound.
PolyBound power_bound(unsigned d);

struct TmSpec {
  TuringMachine machine;
  std::optional<PolyBound> bound;
};

// Sections `states:`, `start:`, `final:`, `bound = q0 + (q1, ..., qk)`, `delta:` with
// one `q,s -> q',s',L|R` per line. Symbols 0 1 > _ (> is the left end, _ the blank).
TmSpec parse_tm(std::string_view text);

struct TmRun {
  std::string output;
  std::uint64_t steps = 0;
};

TmRun run_tm(const TuringMachine& m, std::string_view w, std::uint64_t max_steps);

enum class Fill { Blank, Unit };

// amp_0 .. amp_d for one fill, as RaML-lite definitions named ampb<i> / ampu<i>.
std::string amp_definitions(unsigned d, Fill fill);

// The definitions plus a typed entry `amp w acc` calling amp_d; w : L(unit + unit).
std::string amp_program(unsigned d, Fill fill);

std::string compile_tm_source(const TuringMachine& m, const PolyBound& p);
CheckedProgram compile_tm(const TuringMachine& m, const PolyBound& p);

// Tape list of the compiled program -> the machine's output convention.
std::string normalize_output(const Value& tape);

ValuePtr bits_value(std::string_view w);

struct CertifyReport {
  std::size_t inputs = 0;
  std::size_t output_mismatches = 0;
  std::size_t cost_below_steps = 0;
  std::size_t bound_violations = 0;  // p(|w|) < steps
  std::optional<std::string> first_problem;
  bool analysis_ok = false;
  std::string analysis;  // signature or reason
  unsigned degree = 0;
};

// Exhaustive sweep over all w with |w| <= max_len plus univariate inference.
CertifyReport certify_tm(const TuringMachine& m, const PolyBound& p, std::size_t max_len = 8);

}  // namespace aara
