#include "aara/tm.hpp"
#include "aara/uni.hpp"

#include "support.hpp"

#include <doctest.h>

#include <map>

using namespace aara;
using namespace testing;

namespace {

TmSpec machine(const std::string& name) { return parse_tm(read_file(corpus_path("tm/" + name + ".tm"))); }

std::vector<std::string> all_words(std::size_t max_len) {
  std::vector<std::string> out{""};
  for (std::size_t i = 0; i < out.size(); ++i)
    if (out[i].size() < max_len) {
      out.push_back(out[i] + "0");
      out.push_back(out[i] + "1");
    }
  return out;
}

// A second simulator: tape as a string, transitions as a text-keyed table.
std::pair<std::string, std::uint64_t> table_run(const TuringMachine& m, const std::string& w) {
  std::map<std::string, std::string> table;
  for (auto& [k, t] : m.delta)
    table[m.states[k.first] + sym_char(k.second)] =
        m.states[t.next] + "|" + sym_char(t.write) + (t.move == Move::L ? "L" : "R");
  std::string tape = ">" + w, q = m.states[m.start];
  std::size_t pos = 1;
  std::uint64_t n = 0;
  while (q != m.states[m.final]) {
    if (pos == tape.size()) tape += '_';
    const std::string& t = table.at(q + tape[pos]);
    auto bar = t.find('|');
    q = t.substr(0, bar);
    tape[pos] = t[bar + 1];
    pos = t[bar + 2] == 'L' ? pos - 1 : pos + 1;
    ++n;
  }
  auto end = tape.find('_', 1);
  return {tape.substr(1, end == std::string::npos ? std::string::npos : end - 1), n};
}

ValuePtr sym(Sym s) {
  auto u = Value::triv();
  switch (s) {
    case Sym::Zero: return Value::inl(u);
    case Sym::One: return Value::inr(Value::inl(u));
    case Sym::LeftEnd: return Value::inr(Value::inr(Value::inl(u)));
    case Sym::Blank: return Value::inr(Value::inr(Value::inr(u)));
  }
  return nullptr;
}

CheckedProgram amp(unsigned d, Fill f) { return check_program(parse_program(amp_program(d, f))); }

std::size_t length(const ValuePtr& v) { return list_elems(v).size(); }

}  // namespace

TEST_CASE("run_tm") {
  auto halt = machine("halt").machine;
  auto r = run_tm(halt, "101", 100);
  CHECK(r.output == "101");
  CHECK(r.steps == 1);

  auto flip = machine("bitflip").machine;
  r = run_tm(flip, "10", 100);
  CHECK(r.output == "01");
  CHECK(r.steps == 3);

  CHECK_THROWS_AS(run_tm(flip, "1111", 3), StepLimit);

  for (auto name : {"halt", "bitflip", "eraser"}) {
    auto m = machine(name).machine;
    for (auto& w : all_words(8)) {
      auto got = run_tm(m, w, 1000);
      auto want = table_run(m, w);
      CHECK(got.output == want.first);
      CHECK(got.steps == want.second);
    }
  }
}

TEST_CASE("machine validation") {
  const char* partial = "states: a f\nstart: a\nfinal: f\ndelta:\n a,0 -> f,0,R\n";
  CHECK_THROWS_AS(parse_tm(partial), TmError);
  const char* off_left =
      "states: a f\nstart: a\nfinal: f\ndelta:\n a,0 -> f,0,R\n a,1 -> f,1,R\n a,_ -> f,_,R\n a,> -> a,>,L\n";
  CHECK_THROWS_AS(parse_tm(off_left), TmError);
  const char* overwrite =
      "states: a f\nstart: a\nfinal: f\ndelta:\n a,0 -> f,>,R\n a,1 -> f,1,R\n a,_ -> f,_,R\n a,> -> a,>,R\n";
  CHECK_THROWS_AS(parse_tm(overwrite), TmError);
  auto spec = machine("bitflip");
  REQUIRE(spec.bound);
  CHECK(spec.bound->to_string() == "1 + (1, 1)");
  CHECK(spec.bound->degree() == 2);
}

TEST_CASE("power_bound") {
  for (unsigned d = 0; d <= 6; ++d) {
    auto p = power_bound(d);
    for (std::size_t n = 0; n <= 50; ++n) CHECK(p(n) == boost::multiprecision::pow(BigInt(n), d));
  }
}

TEST_CASE("normalize_output") {
  auto tape = Value::list({sym(Sym::LeftEnd), sym(Sym::One), sym(Sym::Zero), sym(Sym::Blank), sym(Sym::Blank)});
  CHECK(normalize_output(*tape) == "10");
  CHECK(normalize_output(*Value::list({sym(Sym::LeftEnd), sym(Sym::Blank)})) == "");
  CHECK_THROWS_AS(normalize_output(*Value::list({sym(Sym::One)})), TmError);
  CHECK_THROWS_AS(normalize_output(*Value::nil()), TmError);
}

TEST_CASE("amp size law and cost") {
  for (unsigned d = 0; d <= 3; ++d)
    for (Fill f : {Fill::Blank, Fill::Unit}) {
      auto cp = amp(d, f);
      for (std::size_t n = 0; n <= 8; ++n)
        for (std::size_t a : {0, 3}) {
          std::vector<ValuePtr> acc(a, f == Fill::Blank ? sym(Sym::Blank) : Value::triv());
          auto in = Value::pair(bits_value(std::string(n, '1')), Value::list(acc));
          auto r = run_program(cp, {in}, CostMetric::Tick);
          CHECK(BigInt(length(r.value)) == binomial(static_cast<long>(n), d) + a);
          CHECK(r.cost <= 2 * Rational(boost::multiprecision::pow(BigInt(n), d)));
        }
    }
  auto r0 = run_program(amp(0, Fill::Blank), {Value::pair(bits_value("0110"), Value::nil())}, CostMetric::Tick);
  CHECK(length(r0.value) == 1);
  auto r2 = run_program(amp(2, Fill::Blank), {Value::pair(bits_value("0110"), Value::nil())}, CostMetric::Tick);
  CHECK(length(r2.value) == 6);
}

TEST_CASE("amp annotation law") {
  const std::string symt = "(unit + (unit + (unit + unit)))";
  for (unsigned d = 0; d <= 4; ++d) {
    auto cp = amp(d, Fill::Blank);
    UniJudgment j;
    UniVec q(d);
    if (d > 0) {
      auto [c, v] = poly_to_binomial(d);
      for (std::size_t i = 0; i < d; ++i) q[i] = 2 * v[i];
    }
    std::string w = "L^" + to_string(q) + "(unit + unit)";
    if (d == 0) w = "L^(0)(unit + unit)";
    j.inputs = {{entry_info(cp).params[0].first, parse_annot(w + " * L^(1)" + symt)}};
    j.p = d == 0 ? 2 : 0;
    j.out = parse_annot("L^(1)" + symt);
    j.q = 0;
    CHECK_MESSAGE(check_uni(cp, j, CostMetric::Tick, std::max(1u, d)), to_string(j));
    // 2 n^d is tight only for d = 1; amp_0 needs exactly the one unit its cell carries.
    if (d == 0) {
      UniJudgment tight = j;
      tight.p = 1;
      CHECK(check_uni(cp, tight, CostMetric::Tick, 1));
      UniJudgment weak = j;
      weak.p = 0;
      CHECK_FALSE(check_uni(cp, weak, CostMetric::Tick, 1));
    }
    if (d == 1) {
      UniJudgment weak = j;
      UniVec q2 = q;
      q2[0] -= 1;
      weak.inputs[0].second = parse_annot("L^" + to_string(q2) + "(unit + unit) * L^(1)" + symt);
      CHECK_FALSE(check_uni(cp, weak, CostMetric::Tick, d));
    }
  }
}

TEST_CASE("compiled machines agree with the simulator") {
  for (auto name : {"halt", "bitflip", "eraser"}) {
    auto spec = machine(name);
    REQUIRE(spec.bound);
    auto rep = certify_tm(spec.machine, *spec.bound, 8);
    CHECK(rep.inputs == 511);
    CHECK_MESSAGE(rep.output_mismatches == 0, name << ": " << rep.first_problem.value_or(""));
    CHECK_MESSAGE(rep.cost_below_steps == 0, name);
    CHECK(rep.bound_violations == 0);
    CHECK_MESSAGE(rep.analysis_ok, name << ": " << rep.analysis);
    CHECK(rep.degree == std::max(1u, spec.bound->degree()));
  }
}

TEST_CASE("a bound that is too small is reported") {
  auto spec = machine("eraser");
  PolyBound tiny;
  tiny.q0 = 1;
  auto rep = certify_tm(spec.machine, tiny, 3);
  CHECK(rep.bound_violations == 15);
  REQUIRE(rep.first_problem);
  CHECK(rep.first_problem->find("bound violated") != std::string::npos);
}

TEST_CASE("compiled source is well-formed and typed") {
  auto spec = machine("eraser");
  auto cp = compile_tm(spec.machine, *spec.bound);
  auto ei = entry_info(cp);
  REQUIRE(ei.is_function);
  CHECK(to_string(ei.params[0].second) == "L(unit + unit)");
}

TEST_CASE("simulate carries one unit per cell") {
  auto spec = machine("eraser");
  std::string src = compile_tm_source(spec.machine, *spec.bound);
  src = src.substr(0, src.find("fun run w"));
  const std::string symt = "(unit + (unit + (unit + unit)))", state = "(unit + (unit + unit))";
  src += "def sim = lambda (s : " + state + ") (l1 : L" + symt + ") (l2 : L" + symt +
         ") (ps : L(unit)).\n  simulate s l1 l2 ps\n";
  auto cp = check_program(parse_program(src));
  UniJudgment j;
  j.inputs = {{entry_info(cp).params[0].first,
               parse_annot(state + " * (L^(1)" + symt + " * (L^(1)" + symt + " * L^(1)(unit)))")}};
  j.p = 0;
  j.out = parse_annot("L^(0)" + symt);
  j.q = 0;
  CHECK(check_uni(cp, j, CostMetric::Tick, 1));
  UniJudgment weak = j;
  weak.inputs[0].second = parse_annot(state + " * (L^(1)" + symt + " * (L^(1)" + symt + " * L^(0)(unit)))");
  CHECK_FALSE(check_uni(cp, weak, CostMetric::Tick, 1));
}
