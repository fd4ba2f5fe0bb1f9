#include "aara/report.hpp"

#include <json.hpp>

#include <algorithm>
#include <sstream>

namespace aara {

namespace {

using Mono = std::vector<unsigned>;
using Terms = std::map<Mono, Rational>;

void add_to(Terms& acc, const Terms& t, const Rational& scale = 1) {
  for (auto& [m, c] : t) {
    Rational& slot = acc[m];
    slot += scale * c;
    if (slot == 0) acc.erase(m);
  }
}

Terms mul(const Terms& a, const Terms& b) {
  Terms out;
  for (auto& [ma, ca] : a)
    for (auto& [mb, cb] : b) {
      Mono m(ma.size());
      for (std::size_t i = 0; i < m.size(); ++i) m[i] = ma[i] + mb[i];
      add_to(out, Terms{{m, ca * cb}});
    }
  return out;
}

Terms constant(std::size_t nv, const Rational& c) {
  if (c == 0) return {};
  return {{Mono(nv, 0), c}};
}

Terms var_minus(std::size_t nv, std::size_t v, long j) {
  Mono m(nv, 0);
  m[v] = 1;
  Terms t{{m, 1}};
  add_to(t, constant(nv, -j));
  return t;
}

// C(x_v, k) = x_v (x_v - 1) ... (x_v - k + 1) / k!
Terms binom(std::size_t nv, std::size_t v, unsigned k) {
  Terms t = constant(nv, 1);
  for (unsigned j = 0; j < k; ++j) t = mul(t, var_minus(nv, v, j));
  Terms out;
  add_to(out, t, 1 / factorial(k));
  return out;
}

bool zero_annot_deep(const AnnotBase& a) {
  for (auto& q : a.q)
    if (q != 0) return false;
  return (!a.left || zero_annot_deep(*a.left)) && (!a.right || zero_annot_deep(*a.right));
}

std::optional<Terms> uni_component(const AnnotBase& a, std::size_t nv, std::size_t v) {
  if (zero_annot_deep(a)) return Terms{};
  if (a.kind != BaseType::Kind::List || !zero_annot_deep(*a.left)) return std::nullopt;
  Terms t;
  for (std::size_t i = 0; i < a.q.size(); ++i) add_to(t, binom(nv, v, static_cast<unsigned>(i + 1)), a.q[i]);
  return t;
}

std::optional<Terms> multi_component(const Index& i, std::size_t nv, std::size_t v) {
  if (is_zero(i)) return constant(nv, 1);
  if (i.kind != Index::Kind::List) return std::nullopt;
  for (auto& k : i.kids)
    if (!is_zero(k)) return std::nullopt;
  return binom(nv, v, static_cast<unsigned>(i.kids.size()));
}

std::vector<std::string> labels(const EntryInfo& ei, const std::vector<std::string>& names) {
  if (!names.empty()) return names;
  std::vector<std::string> out;
  for (auto& [n, t] : ei.components) out.push_back("|" + n + "|");
  return out;
}

unsigned total(const Mono& m) {
  unsigned s = 0;
  for (auto e : m) s += e;
  return s;
}

std::string mono_text(const Mono& m, const std::vector<std::string>& vars) {
  std::string s;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i] == 0) continue;
    if (!s.empty()) s += "*";
    s += vars[i];
    if (m[i] > 1) s += "^" + std::to_string(m[i]);
  }
  return s;
}

std::string term_text(const Rational& c, const std::string& body) {
  if (body.empty()) return to_string(c);
  if (c == 1) return body;
  if (c == -1) return "-" + body;
  return to_string(c) + "*" + body;
}

std::string join_terms(const std::vector<std::string>& parts) {
  if (parts.empty()) return "0";
  std::string s = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i)
    s += parts[i][0] == '-' ? " - " + parts[i].substr(1) : " + " + parts[i];
  return s;
}

}  // namespace

std::optional<SizePoly> size_poly(const UniJudgment& j, const EntryInfo& ei) {
  SizePoly sp;
  std::size_t nv = ei.components.size();
  for (auto& [n, t] : ei.components) sp.vars.push_back(n);
  std::vector<AnnotPtr> parts;
  if (ei.is_function) {
    if (j.inputs.size() != 1) return std::nullopt;
    AnnotPtr rest = j.inputs[0].second;
    for (std::size_t i = 0; i + 1 < nv; ++i) {
      if (rest->kind != BaseType::Kind::Prod) return std::nullopt;
      parts.push_back(rest->left);
      rest = rest->right;
    }
    parts.push_back(rest);
  } else {
    for (auto& [n, a] : j.inputs) parts.push_back(a);
  }
  if (parts.size() != nv) return std::nullopt;
  add_to(sp.terms, constant(nv, j.p));
  for (std::size_t v = 0; v < nv; ++v) {
    auto t = uni_component(*parts[v], nv, v);
    if (!t) return std::nullopt;
    add_to(sp.terms, *t);
  }
  return sp;
}

std::optional<SizePoly> size_poly(const MultiJudgment& j, const EntryInfo& ei) {
  SizePoly sp;
  std::size_t nv = ei.components.size();
  for (auto& [n, t] : ei.components) sp.vars.push_back(n);
  for (auto& [idx, c] : j.P.coeffs) {
    if (c == 0) continue;
    std::vector<const Index*> parts;
    if (ei.is_function) {
      const Index* rest = &idx.at(0);
      for (std::size_t i = 0; i + 1 < nv; ++i) {
        if (is_zero(*rest)) {
          parts.push_back(rest);
          continue;
        }
        if (rest->kind != Index::Kind::Pair) return std::nullopt;
        parts.push_back(&rest->kids[0]);
        rest = &rest->kids[1];
      }
      parts.push_back(rest);
    } else {
      for (auto& i : idx) parts.push_back(&i);
    }
    if (parts.size() != nv) return std::nullopt;
    Terms t = constant(nv, 1);
    for (std::size_t v = 0; v < nv; ++v) {
      auto f = multi_component(*parts[v], nv, v);
      if (!f) return std::nullopt;
      t = mul(t, *f);
    }
    add_to(sp.terms, t, c);
  }
  return sp;
}

std::string render(const SizePoly& p) {
  const auto& vars = p.vars;
  unsigned top = 0;
  for (auto& [m, c] : p.terms) top = std::max(top, total(m));

  // Try c * (sum of the variables in the top part)^top.
  std::optional<std::string> folded;
  if (top >= 2) {
    std::vector<std::size_t> used;
    for (std::size_t v = 0; v < vars.size(); ++v)
      for (auto& [m, c] : p.terms)
        if (total(m) == top && m[v] > 0) {
          used.push_back(v);
          break;
        }
    if (used.size() >= 2) {
      std::size_t nv = vars.size();
      Mono lead(nv, 0);
      lead[used[0]] = top;
      auto it = p.terms.find(lead);
      if (it != p.terms.end()) {
        Terms sum;
        for (auto v : used) add_to(sum, binom(nv, v, 1));
        Terms power = constant(nv, 1);
        for (unsigned k = 0; k < top; ++k) power = mul(power, sum);
        Terms actual;
        for (auto& [m, c] : p.terms)
          if (total(m) == top) actual[m] = c;
        Terms diff = actual;
        add_to(diff, power, -it->second);
        if (diff.empty()) {
          std::string names;
          for (auto v : used) names += (names.empty() ? "" : "+") + vars[v];
          folded = term_text(it->second, "(" + names + ")^" + std::to_string(top));
        }
      }
    }
  }

  std::vector<std::pair<Mono, Rational>> order(p.terms.begin(), p.terms.end());
  std::stable_sort(order.begin(), order.end(), [](auto& a, auto& b) {
    unsigned ta = total(a.first), tb = total(b.first);
    if (ta != tb) return ta < tb;
    return b.first < a.first;
  });
  std::vector<std::string> parts;
  for (auto& [m, c] : order) {
    if (folded && total(m) == top) continue;
    parts.push_back(term_text(c, mono_text(m, vars)));
  }
  if (folded) parts.push_back(*folded);
  return join_terms(parts);
}

std::string render_bound(const UniJudgment& j, const EntryInfo& ei, const std::vector<std::string>& names) {
  auto sp = size_poly(j, ei);
  if (!sp) {
    std::string s = to_string(j.p);
    for (auto& [n, a] : j.inputs) s += " + Phi(" + n + " : " + to_string(*a) + ")";
    return s;
  }
  sp->vars = labels(ei, names);
  return render(*sp);
}

std::string render_bound(const MultiJudgment& j, const EntryInfo& ei, const std::vector<std::string>& names) {
  auto sp = size_poly(j, ei);
  if (!sp) return "P" + to_string(j.P);
  sp->vars = labels(ei, names);
  return render(*sp);
}

std::string to_text(const AnalysisReport& r) {
  std::ostringstream o;
  o << "program: " << r.program << "\n";
  o << "mode: " << r.mode;
  if (r.mode == "uni" || r.mode == "multi") o << " (degree " << r.degree << ", metric " << r.metric << ")";
  if (r.mode == "eval") o << " (metric " << r.metric << ")";
  o << "\n";
  o << "result: " << (r.ok ? "ok" : "rejected") << "\n";
  if (!r.signature.empty()) o << "signature: " << r.signature << "\n";
  if (!r.bound.empty()) o << "bound: cost <= " << r.bound << "\n";
  if (!r.rejection.empty()) o << "reason: " << r.rejection << "\n";
  for (auto& [k, v] : r.details) o << k << ": " << v << "\n";
  if (r.lp)
    o << "lp: " << r.lp->vars << " vars, " << r.lp->constraints << " constraints, " << r.lp->pivots << " pivots, "
      << r.lp->body_copies << " body copies\n";
  if (r.timing_ms) o << "time: " << *r.timing_ms << " ms\n";
  return o.str();
}

std::string to_json(const AnalysisReport& r) {
  nlohmann::ordered_json j;
  j["version"] = AnalysisReport::kVersion;
  j["program"] = r.program;
  j["mode"] = r.mode;
  if (r.mode == "uni" || r.mode == "multi") j["degree"] = r.degree;
  if (!r.metric.empty()) j["metric"] = r.metric;
  j["ok"] = r.ok;
  if (!r.signature.empty()) j["signature"] = r.signature;
  if (!r.bound.empty()) j["bound"] = r.bound;
  if (!r.rejection.empty()) j["rejection"] = r.rejection;
  if (!r.details.empty()) {
    nlohmann::ordered_json d = nlohmann::ordered_json::object();
    for (auto& [k, v] : r.details) d[k] = v;
    j["details"] = d;
  }
  if (r.lp)
    j["lp"] = {{"vars", r.lp->vars},
               {"constraints", r.lp->constraints},
               {"pivots", r.lp->pivots},
               {"body_copies", r.lp->body_copies}};
  return j.dump(2) + "\n";
}

AnalysisReport report_uni(const std::string& id, const CheckedProgram& cp, const UniOptions& opt,
                          std::string* lp_dump) {
  AnalysisReport r;
  r.program = id;
  r.mode = "uni";
  r.degree = opt.degree;
  r.metric = to_string(opt.metric);
  UniResult u = infer_uni(cp, opt);
  if (lp_dump) *lp_dump = u.lp_dump;
  r.lp = u.stats;
  r.ok = u.ok;
  if (!u.ok) {
    r.rejection = u.reason;
    if (u.suggested_degree) r.details.emplace_back("suggested degree", std::to_string(*u.suggested_degree));
    return r;
  }
  EntryInfo ei = entry_info(cp);
  if (ei.is_function) {
    // Show source parameter names rather than the desugared binder.
    std::string label;
    for (auto& [n, t] : ei.components) label += (label.empty() ? "" : ", ") + n;
    u.judgment.inputs.at(0).first = ei.components.size() > 1 ? "<" + label + ">" : label;
  }
  r.signature = to_string(u.judgment);
  r.bound = render_bound(u.judgment, ei);
  if (ei.is_function)
    r.details.emplace_back("input", to_string(*u.judgment.inputs.at(0).second));
  else
    for (auto& [n, a] : u.judgment.inputs) r.details.emplace_back("input " + n, to_string(*a));
  return r;
}

AnalysisReport report_multi(const std::string& id, const CheckedProgram& cp, const MultiOptions& opt,
                            std::string* lp_dump) {
  AnalysisReport r;
  r.program = id;
  r.mode = "multi";
  r.degree = opt.degree;
  r.metric = to_string(opt.metric);
  MultiResult m = infer_multi(cp, opt);
  if (lp_dump) *lp_dump = m.lp_dump;
  r.lp = m.stats;
  r.ok = m.ok;
  if (!m.ok) {
    r.rejection = m.reason;
    if (m.suggested_degree) r.details.emplace_back("suggested degree", std::to_string(*m.suggested_degree));
    return r;
  }
  r.signature = to_string(m.judgment);
  r.bound = render_bound(m.judgment, entry_info(cp));
  return r;
}

AnalysisReport report_ip(const std::string& id, const CheckedProgram& cp) {
  AnalysisReport r;
  r.program = id;
  r.mode = "ip";
  IpOutcome o = check_ip(cp);
  r.ok = o.accepted;
  if (!o.accepted) {
    const Span& s = o.rejection.span;
    r.rejection = (s.line > 0 ? std::to_string(s.line) + ":" + std::to_string(s.col) + ": " : "") +
                  o.rejection.obligation;
    return r;
  }
  std::string delta;
  for (auto& [f, t] : o.result.delta) delta += (delta.empty() ? "" : ", ") + f + ": " + to_string(t);
  r.details.emplace_back("delta", "{" + delta + "}");
  if (o.result.time) {
    r.details.emplace_back("entry", to_string(*o.result.time));
  } else {
    std::string v;
    for (auto& x : o.result.V) v += (v.empty() ? "" : ", ") + x;
    r.details.emplace_back("V", "{" + v + "}");
  }
  std::size_t k = 0;
  for (auto& s : o.result.trace)
    if (s.rule == "IP:Rec") {
      std::string v;
      for (auto& x : s.V) v += (v.empty() ? "" : ", ") + x;
      r.details.emplace_back("rec at " + s.at.substr(s.at.empty() ? 0 : 1), "{" + v + "}");
    }
  for (auto& a : check_assumption(cp, o.result)) r.details.emplace_back("assumption " + std::to_string(++k), a.message());
  if (k == 0) r.details.emplace_back("assumption", "clean");
  return r;
}

AnalysisReport report_eval(const std::string& id, const CheckedProgram& cp, const std::vector<ValuePtr>& inputs,
                           CostMetric metric, std::uint64_t fuel) {
  AnalysisReport r;
  r.program = id;
  r.mode = "eval";
  r.metric = to_string(metric);
  try {
    EvalResult e = run_program(cp, inputs, metric, fuel);
    r.ok = true;
    r.details.emplace_back("value", to_string(e.value));
    r.details.emplace_back("cost", to_string(e.cost));
  } catch (const EvalError& e) {
    r.rejection = e.what();
  }
  return r;
}

AnalysisReport report_tm(const std::string& id, const TmSpec& spec, std::size_t max_len) {
  if (!spec.bound) throw TmError("machine has no `bound` line");
  AnalysisReport r;
  r.program = id;
  r.mode = "tm";
  r.metric = "tick";
  CertifyReport c = certify_tm(spec.machine, *spec.bound, max_len);
  r.degree = c.degree;
  r.ok = c.analysis_ok && c.output_mismatches == 0 && c.cost_below_steps == 0 && c.bound_violations == 0;
  if (c.analysis_ok)
    r.signature = c.analysis;
  else
    r.rejection = c.analysis;
  if (c.first_problem && r.rejection.empty()) r.rejection = *c.first_problem;
  r.details.emplace_back("step bound", spec.bound->to_string());
  r.details.emplace_back("inputs", std::to_string(c.inputs));
  r.details.emplace_back("output mismatches", std::to_string(c.output_mismatches));
  r.details.emplace_back("cost below steps", std::to_string(c.cost_below_steps));
  r.details.emplace_back("bound violations", std::to_string(c.bound_violations));
  return r;
}

}  // namespace aara
