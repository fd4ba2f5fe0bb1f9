#include "aara/tm.hpp"

#include "aara/parser.hpp"
#include "aara/uni.hpp"

#include <algorithm>
#include <sstream>

namespace aara {

namespace {

constexpr Sym kSyms[] = {Sym::Zero, Sym::One, Sym::LeftEnd, Sym::Blank};

std::optional<Sym> parse_sym(std::string_view s) {
  if (s == "0") return Sym::Zero;
  if (s == "1") return Sym::One;
  if (s == ">" || s == "⊢") return Sym::LeftEnd;
  if (s == "_" || s == "⊔") return Sym::Blank;
  return std::nullopt;
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

// ------------------------------------------------------------ source emission

const char* const kSymType = "unit + (unit + (unit + unit))";

class Emitter {
 public:
  std::string fresh(const char* base) { return base + std::to_string(++n_); }

  // "let ... in " binding `target` to alternative i of a right-nested n-ary sum of units.
  std::string sum_value(const std::string& target, std::size_t i, std::size_t n) {
    std::string u = fresh("u"), s = "let " + u + " = <> in ";
    std::size_t wraps = i;
    std::string cur = u;
    if (i + 1 < n) {
      std::string v = wraps == 0 ? target : fresh("v");
      s += "let " + v + " = inl " + cur + " in ";
      cur = v;
    } else {
      wraps = n - 1;
    }
    for (std::size_t k = 0; k < wraps; ++k) {
      std::string v = k + 1 == wraps ? target : fresh("v");
      s += "let " + v + " = inr " + cur + " in ";
      cur = v;
    }
    return s;
  }

  std::string sym_value(const std::string& target, Sym s) {
    return sum_value(target, static_cast<std::size_t>(s), 4);
  }

  // Case analysis on a right-nested n-ary sum of units.
  std::string sum_case(const std::string& x, const std::vector<std::string>& alts) {
    std::string out, scrut = x;
    std::size_t n = alts.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (i + 2 == n) {
        out += "case " + scrut + " { inl _ -> " + alts[i] + " | inr _ -> " + alts[i + 1] + " }";
        break;
      }
      std::string rest = fresh("r");
      out += "case " + scrut + " { inl _ -> " + alts[i] + " | inr " + rest + " -> ";
      scrut = rest;
    }
    for (std::size_t i = 0; i + 2 < n; ++i) out += " }";
    return out;
  }

 private:
  int n_ = 0;
};

std::string amp_name(unsigned i, Fill f) { return std::string(f == Fill::Blank ? "ampb" : "ampu") + std::to_string(i); }

std::string amp_defs(unsigned d, Fill fill, Emitter& em) {
  std::ostringstream o;
  std::string cell = fill == Fill::Blank ? em.sym_value("c", Sym::Blank) : "let c = <> in ";
  o << "fun " << amp_name(0, fill) << " <v, acc> = " << cell << "c :: acc\n\n";
  for (unsigned i = 1; i <= d; ++i) {
    o << "fun " << amp_name(i, fill) << " <v, acc> =\n"
      << "  case v {\n"
      << "    [] -> acc\n"
      << "  | (x :: xs) ->\n"
      << "      share xs as xs1, xs2 in\n"
      << "      let _ = tick 1 in\n"
      << "      let acc1 = " << amp_name(i - 1, fill) << " xs1 acc in\n"
      << "      " << amp_name(i, fill) << " xs2 acc1\n"
      << "  }\n\n";
  }
  return o.str();
}

Sym decode_sym(const Value& v) {
  auto bad = [] { return TmError("malformed tape symbol"); };
  if (v.kind == Value::Kind::Inl) return Sym::Zero;
  if (v.kind != Value::Kind::Inr) throw bad();
  const Value& a = *v.a;
  if (a.kind == Value::Kind::Inl) return Sym::One;
  if (a.kind != Value::Kind::Inr) throw bad();
  const Value& b = *a.a;
  if (b.kind == Value::Kind::Inl) return Sym::LeftEnd;
  if (b.kind == Value::Kind::Inr) return Sym::Blank;
  throw bad();
}

}  // namespace

char sym_char(Sym s) {
  switch (s) {
    case Sym::Zero: return '0';
    case Sym::One: return '1';
    case Sym::LeftEnd: return '>';
    case Sym::Blank: return '_';
  }
  return '?';
}

std::size_t TuringMachine::state(const std::string& name) const {
  auto it = std::find(states.begin(), states.end(), name);
  if (it == states.end()) throw TmError("unknown state " + name);
  return static_cast<std::size_t>(it - states.begin());
}

void validate(const TuringMachine& m) {
  if (m.states.size() < 2) throw TmError("a machine needs at least two states");
  if (m.start >= m.states.size() || m.final >= m.states.size()) throw TmError("start or final state out of range");
  if (m.start == m.final) throw TmError("start state must differ from the final state");
  for (std::size_t q = 0; q < m.states.size(); ++q) {
    if (q == m.final) continue;
    for (Sym s : kSyms) {
      auto it = m.delta.find({q, s});
      std::string at = m.states[q] + "," + sym_char(s);
      if (it == m.delta.end()) throw TmError("no transition for " + at);
      const Transition& t = it->second;
      if (t.next >= m.states.size()) throw TmError("transition " + at + " targets an unknown state");
      if (s == Sym::LeftEnd && (t.write != Sym::LeftEnd || t.move != Move::R))
        throw TmError("transition " + at + " must keep the left end marker and move right");
      if (s != Sym::LeftEnd && t.write == Sym::LeftEnd)
        throw TmError("transition " + at + " writes the left end marker");
    }
  }
  for (auto& [k, t] : m.delta)
    if (k.first == m.final) throw TmError("the final state has outgoing transitions");
}

unsigned PolyBound::degree() const {
  for (std::size_t i = q.size(); i-- > 0;)
    if (q[i] != 0) return static_cast<unsigned>(i + 1);
  return 0;
}

BigInt PolyBound::operator()(std::size_t n) const {
  BigInt v = q0;
  for (std::size_t i = 0; i < q.size(); ++i) v += q[i] * binomial(static_cast<long>(n), static_cast<long>(i + 1));
  return v;
}

std::string PolyBound::to_string() const {
  std::string s = q0.str();
  if (q.empty()) return s;
  s += " + (";
  for (std::size_t i = 0; i < q.size(); ++i) s += (i ? ", " : "") + q[i].str();
  return s + ")";
}

PolyBound power_bound(unsigned d) {
  auto [c, v] = poly_to_binomial(d);
  PolyBound p;
  p.q0 = numerator(c);
  for (auto& x : v) p.q.push_back(numerator(x));
  return p;
}

TmSpec parse_tm(std::string_view text) {
  TmSpec spec;
  TuringMachine& m = spec.machine;
  std::optional<std::string> start, fin;
  std::vector<std::tuple<std::string, Sym, std::string, Sym, Move, int>> raw;
  bool in_delta = false;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& msg) { return TmError("line " + std::to_string(lineno) + ": " + msg); };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    line = trim(line);
    if (line.empty()) continue;
    if (line.find("->") != std::string::npos) {
      if (!in_delta) throw fail("transition outside the delta section");
      auto arrow = line.find("->");
      auto lhs = split(line.substr(0, arrow), ',');
      auto rhs = split(line.substr(arrow + 2), ',');
      if (lhs.size() != 2 || rhs.size() != 3) throw fail("expected 'q,s -> q',s',L|R'");
      auto s = parse_sym(lhs[1]), w = parse_sym(rhs[1]);
      if (!s || !w) throw fail("unknown symbol");
      if (rhs[2] != "L" && rhs[2] != "R") throw fail("direction must be L or R");
      raw.emplace_back(lhs[0], *s, rhs[0], *w, rhs[2] == "L" ? Move::L : Move::R, lineno);
      continue;
    }
    auto sep = line.find_first_of(":=");
    if (sep == std::string::npos) throw fail("expected 'key: value'");
    std::string key = trim(line.substr(0, sep)), val = trim(line.substr(sep + 1));
    in_delta = false;
    if (key == "states") {
      std::istringstream vs(val);
      std::string q;
      while (vs >> q) {
        if (std::find(m.states.begin(), m.states.end(), q) != m.states.end()) throw fail("duplicate state " + q);
        m.states.push_back(q);
      }
    } else if (key == "start") {
      start = val;
    } else if (key == "final") {
      fin = val;
    } else if (key == "delta") {
      in_delta = true;
    } else if (key == "bound") {
      PolyBound p;
      auto plus = val.find('+');
      try {
        p.q0 = BigInt(trim(val.substr(0, plus)));
        if (plus != std::string::npos) {
          std::string rest = trim(val.substr(plus + 1));
          if (rest.size() < 2 || rest.front() != '(' || rest.back() != ')') throw fail("bound must be q0 + (q1, ...)");
          for (auto& c : split(rest.substr(1, rest.size() - 2), ','))
            if (!c.empty()) p.q.push_back(BigInt(c));
        }
      } catch (const std::runtime_error& e) {
        if (dynamic_cast<const TmError*>(&e)) throw;
        throw fail("bad bound coefficient");
      }
      for (auto& c : p.q)
        if (c < 0) throw fail("bound coefficients must be nonnegative");
      if (p.q0 < 0) throw fail("bound coefficients must be nonnegative");
      spec.bound = p;
    } else {
      throw fail("unknown key " + key);
    }
  }
  if (!start || !fin) throw TmError("missing start or final state");
  m.start = m.state(*start);
  m.final = m.state(*fin);
  for (auto& [q, s, q2, w, mv, ln] : raw) {
    lineno = ln;
    auto [it, fresh] = m.delta.emplace(std::pair{m.state(q), s}, Transition{m.state(q2), w, mv});
    if (!fresh) throw fail("duplicate transition");
  }
  validate(m);
  return spec;
}

TmRun run_tm(const TuringMachine& m, std::string_view w, std::uint64_t max_steps) {
  std::vector<Sym> tape{Sym::LeftEnd};
  for (char c : w) {
    if (c != '0' && c != '1') throw TmError("input must be a bit string");
    tape.push_back(c == '0' ? Sym::Zero : Sym::One);
  }
  std::size_t head = 1, q = m.start;
  TmRun r;
  while (q != m.final) {
    if (r.steps == max_steps) throw StepLimit("step limit " + std::to_string(max_steps) + " reached");
    if (head >= tape.size()) tape.resize(head + 1, Sym::Blank);
    const Transition& t = m.delta.at({q, tape[head]});
    tape[head] = t.write;
    q = t.next;
    if (t.move == Move::L) {
      if (head == 0) throw TmError("head moved left of the left end");
      --head;
    } else {
      ++head;
    }
    ++r.steps;
  }
  for (std::size_t i = 1; i < tape.size() && tape[i] != Sym::Blank; ++i) r.output += sym_char(tape[i]);
  return r;
}

std::string amp_definitions(unsigned d, Fill fill) {
  Emitter em;
  return amp_defs(d, fill, em);
}

std::string amp_program(unsigned d, Fill fill) {
  std::string elem = fill == Fill::Blank ? std::string("(") + kSymType + ")" : "unit";
  return amp_definitions(d, fill) + "def amp = lambda (v : L(unit + unit)) (acc : L(" + elem + ")).\n  " +
         amp_name(d, fill) + " v acc\n";
}

std::string compile_tm_source(const TuringMachine& m, const PolyBound& p) {
  validate(m);
  Emitter em;
  std::ostringstream o;
  unsigned d = p.degree();
  o << "(* Compiled machine, bound p(n) = " << p.to_string() << ". *)\n\n";
  o << amp_defs(d, Fill::Blank, em) << amp_defs(d, Fill::Unit, em);

  o << "fun load <v, acc> =\n"
    << "  case v {\n"
    << "    [] -> acc\n"
    << "  | (x :: xs) ->\n"
    << "      let _ = tick 1 in\n"
    << "      let r = load xs acc in\n"
    << "      let c = case x { inl u -> inl u | inr u -> let o = inl u in inr o } in\n"
    << "      c :: r\n"
    << "  }\n\n";

  o << "fun shift <l1, l2> =\n"
    << "  case l1 { [] -> l2 | (x :: xs) -> let _ = tick 1 in let ys = x :: l2 in shift xs ys }\n\n";

  const std::size_t n = m.states.size();
  std::vector<std::string> by_state;
  for (std::size_t q = 0; q < n; ++q) {
    if (q == m.final) {
      by_state.push_back("error");
      continue;
    }
    std::vector<std::string> by_sym;
    for (Sym s : kSyms) {
      const Transition& t = m.delta.at({q, s});
      std::string b = em.sym_value("b", t.write);
      std::string body;
      if (t.next == m.final) {
        body = "(" + b + "let t = b :: rest in shift l1 t)";
      } else {
        std::string sn = em.sum_value("sn", t.next, n);
        if (t.move == Move::R)
          body = "(" + b + "let l1n = b :: l1 in " + sn + "simulate sn l1n rest ps1)";
        else
          body = "(case l1 { [] -> error | (h :: l1t) -> " + b + "let t1 = b :: rest in let t2 = h :: t1 in " + sn +
                 "simulate sn l1t t2 ps1 })";
      }
      by_sym.push_back(body);
    }
    by_state.push_back("(" + em.sum_case("c", by_sym) + ")");
  }
  o << "fun simulate <s, l1, l2, ps> =\n"
    << "  case ps {\n"
    << "    [] -> shift l1 l2\n"
    << "  | (p :: ps1) ->\n"
    << "      let _ = tick 1 in\n"
    << "      case l2 {\n"
    << "        [] -> error\n"
    << "      | (c :: rest) ->\n"
    << "          " << em.sum_case("s", by_state) << "\n"
    << "      }\n"
    << "  }\n\n";

  // One copy of w per amp call and one for the tape.
  std::size_t copies = 1;
  for (auto& c : p.q) copies += 2 * static_cast<std::size_t>(c);
  std::vector<std::string> ws;
  o << "fun run w =\n";
  if (copies == 1) {
    ws.push_back("w");
  } else {
    o << "  share w as ";
    for (std::size_t i = 0; i < copies; ++i) {
      ws.push_back("w" + std::to_string(i + 1));
      o << (i ? ", " : "") << ws.back();
    }
    o << " in\n";
  }
  std::size_t next_w = 0;
  o << "  let e0 = [] in " << em.sym_value("c0", Sym::LeftEnd) << "let l1 = c0 :: e0 in\n";
  auto reservoir = [&](Fill f, const std::string& prefix) {
    std::string acc = prefix + "0";
    o << "  let " << acc << " = [] in\n";
    int k = 0;
    for (BigInt i = 0; i < p.q0; ++i) {
      std::string cell = f == Fill::Blank ? em.sym_value("k", Sym::Blank) : "let k = <> in ";
      std::string nx = prefix + std::to_string(++k);
      o << "  " << cell << "let " << nx << " = k :: " << acc << " in\n";
      acc = nx;
    }
    for (std::size_t i = 0; i < p.q.size(); ++i)
      for (BigInt r = 0; r < p.q[i]; ++r) {
        std::string nx = prefix + std::to_string(++k);
        o << "  let " << nx << " = " << amp_name(static_cast<unsigned>(i + 1), f) << " " << ws[next_w++] << " "
          << acc << " in\n";
        acc = nx;
      }
    return acc;
  };
  std::string blanks = reservoir(Fill::Blank, "a");
  o << "  let l2 = load " << ws[next_w++] << " " << blanks << " in\n";
  std::string ps = reservoir(Fill::Unit, "z");
  o << "  " << em.sum_value("s0", m.start, n) << "simulate s0 l1 l2 " << ps << "\n";
  return o.str();
}

CheckedProgram compile_tm(const TuringMachine& m, const PolyBound& p) {
  return check_program(parse_program(compile_tm_source(m, p)));
}

std::string normalize_output(const Value& tape) {
  auto cells = list_elems(std::make_shared<Value>(tape));
  if (cells.empty() || decode_sym(*cells[0]) != Sym::LeftEnd) throw TmError("tape does not start with the left end");
  std::string out;
  for (std::size_t i = 1; i < cells.size(); ++i) {
    Sym s = decode_sym(*cells[i]);
    if (s == Sym::Blank) break;
    if (s == Sym::LeftEnd) throw TmError("left end marker inside the tape");
    out += sym_char(s);
  }
  return out;
}

ValuePtr bits_value(std::string_view w) {
  std::vector<ValuePtr> xs;
  for (char c : w) {
    if (c != '0' && c != '1') throw TmError("input must be a bit string");
    xs.push_back(c == '0' ? Value::inl(Value::triv()) : Value::inr(Value::triv()));
  }
  return Value::list(xs);
}

CertifyReport certify_tm(const TuringMachine& m, const PolyBound& p, std::size_t max_len) {
  CertifyReport rep;
  CheckedProgram cp = compile_tm(m, p);
  auto note = [&](const std::string& w, const std::string& what) {
    if (!rep.first_problem) rep.first_problem = "w=\"" + w + "\": " + what;
  };
  for (std::size_t len = 0; len <= max_len; ++len)
    for (std::size_t bits = 0; bits < (std::size_t{1} << len); ++bits) {
      std::string w;
      for (std::size_t i = 0; i < len; ++i) w += (bits >> (len - 1 - i)) & 1 ? '1' : '0';
      ++rep.inputs;
      BigInt limit = p(len);
      TmRun ref;
      try {
        ref = run_tm(m, w, static_cast<std::uint64_t>(limit));
      } catch (const StepLimit&) {
        ++rep.bound_violations;
        note(w, "bound violated: more than " + limit.str() + " steps");
        continue;
      }
      EvalResult r = run_program(cp, {bits_value(w)}, CostMetric::Tick);
      std::string got = normalize_output(*r.value);
      if (got != ref.output) {
        ++rep.output_mismatches;
        note(w, "output \"" + got + "\" differs from \"" + ref.output + "\"");
      }
      if (r.cost < Rational(ref.steps)) {
        ++rep.cost_below_steps;
        note(w, "tick cost below step count");
      }
    }
  UniOptions opt;
  opt.degree = rep.degree = std::max(1u, p.degree());
  opt.metric = CostMetric::Tick;
  UniResult u = infer_uni(cp, opt);
  rep.analysis_ok = u.ok;
  rep.analysis = u.ok ? to_string(u.judgment) : u.reason;
  return rep;
}

}  // namespace aara
