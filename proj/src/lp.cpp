#include "aara/lp.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace aara {

LinExpr& LinExpr::operator+=(const LinExpr& o) {
  for (const auto& [v, c] : o.terms_) {
    auto [it, fresh] = terms_.try_emplace(v, c);
    if (!fresh) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }
  constant_ += o.constant_;
  return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& o) {
  for (const auto& [v, c] : o.terms_) {
    auto [it, fresh] = terms_.try_emplace(v, -c);
    if (!fresh) {
      it->second -= c;
      if (it->second == 0) terms_.erase(it);
    }
  }
  constant_ -= o.constant_;
  return *this;
}

LinExpr& LinExpr::operator*=(const Rational& k) {
  if (k == 0) {
    terms_.clear();
    constant_ = 0;
    return *this;
  }
  for (auto& [v, c] : terms_) c *= k;
  constant_ *= k;
  return *this;
}

Rational LinExpr::eval(const std::vector<Rational>& values) const {
  Rational r = constant_;
  for (const auto& [v, c] : terms_) r += c * values.at(v);
  return r;
}

std::string to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
  }
  return "?";
}

LinVar LpProblem::var(std::string tag) {
  tags_.push_back(std::move(tag));
  return {tags_.size() - 1};
}

namespace {
bool holds(const Rational& x, Rel rel) {
  switch (rel) {
    case Rel::Le: return x <= 0;
    case Rel::Eq: return x == 0;
    case Rel::Ge: return x >= 0;
  }
  return false;
}
}  // namespace

void LpProblem::add(const LinExpr& lhs, Rel rel, const LinExpr& rhs, std::string tag) {
  LinExpr e = lhs - rhs;
  if (e.is_constant()) {
    if (!holds(e.constant(), rel) && violated_.empty()) violated_ = tag.empty() ? "constant constraint" : tag;
    return;
  }
  // Implied by nonnegativity of the unknowns.
  bool all_pos = true, all_neg = true;
  for (const auto& [v, c] : e.terms()) {
    all_pos = all_pos && c > 0;
    all_neg = all_neg && c < 0;
  }
  if (rel == Rel::Ge && all_pos && e.constant() >= 0) return;
  if (rel == Rel::Le && all_neg && e.constant() <= 0) return;
  constraints_.push_back({std::move(e), rel, std::move(tag)});
}

namespace {
std::string fmt_expr(const LinExpr& e) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [v, c] : e.terms()) {
    Rational a = abs(c);
    os << (c < 0 ? (first ? "-" : " - ") : (first ? "" : " + "));
    if (a != 1) os << to_string(a) << " ";
    os << "x" << v;
    first = false;
  }
  if (e.constant() != 0 || first) {
    Rational a = abs(e.constant());
    os << (e.constant() < 0 ? (first ? "-" : " - ") : (first ? "" : " + ")) << to_string(a);
  }
  return os.str();
}
}  // namespace

std::string LpProblem::dump() const {
  std::ostringstream os;
  os << "minimize: " << fmt_expr(objective_) << "\n";
  for (std::size_t i = 0; i < constraints_.size(); ++i) {
    const auto& c = constraints_[i];
    os << "c" << i << ": " << fmt_expr(c.expr) << (c.rel == Rel::Le ? " <= 0" : c.rel == Rel::Eq ? " = 0" : " >= 0");
    if (!c.tag.empty()) os << "  # " << c.tag;
    os << "\n";
  }
  for (std::size_t v = 0; v < tags_.size(); ++v) os << "x" << v << " : " << tags_[v] << "\n";
  return os.str();
}

namespace {

struct Entry {
  std::size_t col;
  Rational v;
};
using Row = std::vector<Entry>;

const Rational* find(const Row& r, std::size_t col) {
  auto it = std::lower_bound(r.begin(), r.end(), col, [](const Entry& e, std::size_t c) { return e.col < c; });
  return it != r.end() && it->col == col ? &it->v : nullptr;
}

// dst -= f * src
void axpy(Row& dst, const Rational& f, const Row& src) {
  Row out;
  out.reserve(dst.size() + src.size());
  std::size_t i = 0, j = 0;
  while (i < dst.size() || j < src.size()) {
    if (j == src.size() || (i < dst.size() && dst[i].col < src[j].col)) {
      out.push_back(std::move(dst[i++]));
    } else if (i == dst.size() || src[j].col < dst[i].col) {
      out.push_back({src[j].col, -f * src[j].v});
      ++j;
    } else {
      Rational v = dst[i].v - f * src[j].v;
      if (v != 0) out.push_back({dst[i].col, std::move(v)});
      ++i;
      ++j;
    }
  }
  dst = std::move(out);
}

class Simplex {
 public:
  explicit Simplex(const LpProblem& p) : p_(p) {}

  LpSolution run() {
    LpSolution sol;
    if (auto* v = p_.violated_constant()) {
      sol.reason = *v;
      return sol;
    }
    build();
    // phase 1
    obj_.clear();
    zc_ = 0;
    for (std::size_t c = first_art_; c < ncols_; ++c) obj_.push_back({c, Rational(1)});
    for (std::size_t i = 0; i < rows_.size(); ++i)
      if (basis_[i] >= first_art_) price_out(i, Rational(1));
    if (!iterate(sol.pivots)) throw std::logic_error("phase 1 cannot be unbounded");
    if (zc_ > 0) {
      sol.status = LpStatus::Infeasible;
      return sol;
    }
    drop_artificials(sol.pivots);
    // phase 2
    obj_.clear();
    for (const auto& [v, c] : p_.objective().terms()) obj_.push_back({v, c});
    zc_ = p_.objective().constant();
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const Rational* c = find_obj_coeff(basis_[i]);
      if (c) price_out(i, Rational(*c));
    }
    if (!iterate(sol.pivots)) {
      sol.status = LpStatus::Unbounded;
      return sol;
    }
    sol.status = LpStatus::Optimal;
    sol.values.assign(p_.num_vars(), Rational(0));
    for (std::size_t i = 0; i < rows_.size(); ++i)
      if (basis_[i] < p_.num_vars()) sol.values[basis_[i]] = rhs_[i];
    sol.objective = p_.objective().eval(sol.values);
    return sol;
  }

 private:
  const LpProblem& p_;
  std::vector<Row> rows_;
  std::vector<Rational> rhs_;
  std::vector<std::size_t> basis_;
  Row obj_;  // reduced costs; objective = zc_ + sum obj_j x_j
  Rational zc_;
  std::size_t ncols_ = 0, first_art_ = 0;
  bool phase2_ = false;

  const Rational* find_obj_coeff(std::size_t col) const {
    const auto& t = p_.objective().terms();
    auto it = t.find(col);
    return it == t.end() ? nullptr : &it->second;
  }

  // Removes the basic variable of row i (with objective coefficient c) from the objective.
  void price_out(std::size_t i, const Rational& c) {
    axpy(obj_, c, rows_[i]);
    zc_ += c * rhs_[i];
  }

  void build() {
    std::size_t n = p_.num_vars();
    std::size_t slack = n;
    struct Pending {
      Row row;
      Rational b;
      bool needs_art;
    };
    std::vector<Pending> pend;
    for (const Constraint& c : p_.constraints()) {
      Row row;
      for (const auto& [v, a] : c.expr.terms()) row.push_back({v, a});
      Rational b = -c.expr.constant();
      Rel rel = c.rel;
      if (b < 0 || (b == 0 && rel == Rel::Ge)) {
        for (auto& e : row) e.v = -e.v;
        b = -b;
        rel = rel == Rel::Ge ? Rel::Le : rel == Rel::Le ? Rel::Ge : Rel::Eq;
      }
      bool art = rel != Rel::Le;
      if (rel != Rel::Eq) row.push_back({slack++, Rational(rel == Rel::Le ? 1 : -1)});
      pend.push_back({std::move(row), std::move(b), art});
    }
    first_art_ = slack;
    std::size_t art = slack;
    for (auto& pr : pend) {
      if (pr.needs_art) {
        pr.row.push_back({art, Rational(1)});
        basis_.push_back(art++);
      } else {
        basis_.push_back(pr.row.back().col);  // the slack
      }
      rows_.push_back(std::move(pr.row));
      rhs_.push_back(std::move(pr.b));
    }
    ncols_ = art;
  }

  bool banned(std::size_t col) const { return phase2_ && col >= first_art_; }

  // Returns false when unbounded.
  bool iterate(std::size_t& pivots) {
    int degenerate_run = 0;
    const int bland_after = 50;
    for (;;) {
      bool bland = degenerate_run >= bland_after;
      std::size_t enter = ncols_;
      const Rational* best = nullptr;
      for (const Entry& e : obj_) {
        if (e.v >= 0 || banned(e.col)) continue;
        if (bland) {
          enter = e.col;
          break;
        }
        if (!best || e.v < *best) {
          best = &e.v;
          enter = e.col;
        }
      }
      if (enter == ncols_) return true;
      std::size_t leave = rows_.size();
      Rational best_ratio;
      for (std::size_t i = 0; i < rows_.size(); ++i) {
        const Rational* a = find(rows_[i], enter);
        if (!a || *a <= 0) continue;
        Rational ratio = rhs_[i] / *a;
        if (leave == rows_.size() || ratio < best_ratio || (ratio == best_ratio && basis_[i] < basis_[leave])) {
          leave = i;
          best_ratio = std::move(ratio);
        }
      }
      if (leave == rows_.size()) return false;
      degenerate_run = best_ratio == 0 ? degenerate_run + 1 : 0;
      pivot(leave, enter);
      ++pivots;
    }
  }

  void pivot(std::size_t r, std::size_t j) {
    Rational inv = 1 / *find(rows_[r], j);
    for (auto& e : rows_[r]) e.v *= inv;
    rhs_[r] *= inv;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (i == r) continue;
      const Rational* a = find(rows_[i], j);
      if (!a) continue;
      Rational f = *a;
      axpy(rows_[i], f, rows_[r]);
      rhs_[i] -= f * rhs_[r];
    }
    if (const Rational* d = find(obj_, j)) {
      Rational f = *d;
      zc_ += f * rhs_[r];
      axpy(obj_, f, rows_[r]);
    }
    basis_[r] = j;
  }

  void drop_artificials(std::size_t& pivots) {
    for (std::size_t i = 0; i < rows_.size();) {
      if (basis_[i] < first_art_) {
        ++i;
        continue;
      }
      std::size_t k = ncols_;
      for (const Entry& e : rows_[i])
        if (e.col < first_art_) {
          k = e.col;
          break;
        }
      if (k == ncols_) {  // redundant row
        rows_.erase(rows_.begin() + static_cast<long>(i));
        rhs_.erase(rhs_.begin() + static_cast<long>(i));
        basis_.erase(basis_.begin() + static_cast<long>(i));
        continue;
      }
      pivot(i, k);
      ++pivots;
      ++i;
    }
    for (auto& row : rows_) std::erase_if(row, [&](const Entry& e) { return e.col >= first_art_; });
    phase2_ = true;
  }
};

}  // namespace

LpSolution solve(const LpProblem& p) { return Simplex(p).run(); }

bool check(const LpProblem& p, const std::vector<Rational>& values, std::string* failed) {
  if (values.size() != p.num_vars()) {
    if (failed) *failed = "assignment has the wrong number of unknowns";
    return false;
  }
  if (auto* v = p.violated_constant()) {
    if (failed) *failed = *v;
    return false;
  }
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] < 0) {
      if (failed) *failed = "negative unknown x" + std::to_string(i);
      return false;
    }
  for (std::size_t i = 0; i < p.constraints().size(); ++i) {
    const Constraint& c = p.constraints()[i];
    if (!holds(c.expr.eval(values), c.rel)) {
      if (failed) *failed = "c" + std::to_string(i) + (c.tag.empty() ? "" : " (" + c.tag + ")");
      return false;
    }
  }
  return true;
}

}  // namespace aara
