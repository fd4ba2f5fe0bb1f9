#include "aara/multi.hpp"
#include "aara/uni.hpp"

#include "support.hpp"

#include <doctest.h>

using namespace aara;
using namespace testing;

namespace {

std::vector<std::vector<ValuePtr>> random_inputs(const CheckedProgram& cp, std::size_t n, std::size_t max_len) {
  std::vector<std::vector<ValuePtr>> out;
  auto ei = entry_info(cp);
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<ValuePtr> in;
    for (auto& [name, t] : ei.params) in.push_back(random_value(*t, max_len));
    out.push_back(in);
  }
  return out;
}

UniResult infer(const CheckedProgram& cp, unsigned d, CostMetric m) {
  UniOptions opt;
  opt.degree = d;
  opt.metric = m;
  return infer_uni(cp, opt);
}

// Lower the highest nonzero coefficient of the first list annotation found.
bool decrement(AnnotPtr& a) {
  if (!a) return false;
  if (a->kind == BaseType::Kind::List) {
    for (std::size_t i = a->q.size(); i-- > 0;)
      if (a->q[i] > 0) {
        UniVec q = a->q;
        q[i] -= 1;
        a = AnnotBase::list(q, a->left);
        return true;
      }
  }
  AnnotPtr l = a->left, r = a->right;
  if (decrement(l)) {
    a = a->kind == BaseType::Kind::Sum ? AnnotBase::sum(l, r) : a->kind == BaseType::Kind::Prod ? AnnotBase::prod(l, r)
                                                                                                  : AnnotBase::list(a->q, l);
    return true;
  }
  if (decrement(r)) {
    a = a->kind == BaseType::Kind::Sum ? AnnotBase::sum(l, r) : AnnotBase::prod(l, r);
    return true;
  }
  return false;
}

}  // namespace

TEST_CASE("decremented signatures are caught by the probe") {
  for (auto [file, d] : {std::pair{"append.raml", 1u}, std::pair{"quicksort.raml", 2u}}) {
    auto cp = corpus(file);
    auto r = infer(cp, d, CostMetric::Tick);
    REQUIRE(r.ok);
    UniJudgment bad = r.judgment;
    REQUIRE(decrement(bad.inputs[0].second));
    CHECK_FALSE(check_uni(cp, bad, CostMetric::Tick, d));
    std::size_t found = 0;
    for (int round = 0; round < 20 && found == 0; ++round)
      found = soundness_probe(cp, bad, CostMetric::Tick, random_inputs(cp, 50, 20)).violations;
    CHECK_MESSAGE(found > 0, file);
  }
}

TEST_CASE("raising the degree never hurts") {
  for (auto [file, d0] : {std::pair{"append.raml", 1u}, std::pair{"quicksort.raml", 2u}, std::pair{"amp2.raml", 2u},
                          std::pair{"append_rec.raml", 1u}}) {
    auto cp = corpus(file);
    for (CostMetric m : {CostMetric::Tick, CostMetric::RunningTime}) {
      auto lo = infer(cp, d0, m);
      REQUIRE_MESSAGE(lo.ok, file);
      for (unsigned d = d0 + 1; d <= d0 + 2; ++d) {
        auto hi = infer(cp, d, m);
        REQUIRE_MESSAGE(hi.ok, file << " d=" << d);
        CHECK_MESSAGE(hi.objective <= lo.objective, file << " d=" << d);
        lo = hi;
      }
    }
  }
}

TEST_CASE("corpus-wide empirical soundness") {
  const char* files[] = {"append.raml",   "append_rec.raml", "append_main.raml", "self_append.raml", "quicksort.raml",
                         "multiply.raml", "share_step.raml", "amp1.raml",        "amp2.raml"};
  for (const char* f : files) {
    auto cp = corpus(f);
    for (CostMetric m : {CostMetric::Tick, CostMetric::RunningTime}) {
      auto inputs = random_inputs(cp, 30, 30);
      for (unsigned d = 1; d <= 3; ++d) {
        auto u = infer(cp, d, m);
        if (!u.ok) continue;
        auto rep = soundness_probe(cp, u.judgment, m, inputs);
        CHECK_MESSAGE(rep.violations == 0, f << " uni " << rep.first_violation);
        break;
      }
      bool typed = false;
      for (unsigned d = 1; d <= 3 && !typed; ++d) {
        MultiOptions mo;
        mo.degree = d;
        mo.metric = m;
        auto r = infer_multi(cp, mo);
        if (!r.ok) continue;
        auto rep = soundness_probe(cp, r.judgment, m, inputs);
        CHECK_MESSAGE(rep.violations == 0, f << " multi " << rep.first_violation);
        CHECK(rep.runs == inputs.size());
        typed = true;
      }
      CHECK_MESSAGE(typed, f);
    }
  }
}
