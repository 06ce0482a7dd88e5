#include "abelia/mdl.hpp"

#include <map>
#include <optional>
#include <stdexcept>

namespace abelia::mdl {
namespace {

using Row = std::vector<std::int64_t>;

// Incremental rank over Q; rows are kept in echelon form with mpq entries.
class RankTracker {
 public:
  explicit RankTracker(std::size_t cols) : cols_(cols) {}

  void add(const Row& r) {
    if (rows_.size() == cols_) return;
    std::vector<mpq_class> v(cols_);
    for (std::size_t j = 0; j < cols_; ++j) v[j] = static_cast<long>(r[j]);
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      std::size_t p = pivots_[i];
      if (sgn(v[p]) == 0) continue;
      mpq_class f = v[p] / rows_[i][p];
      for (std::size_t j = p; j < cols_; ++j) v[j] -= f * rows_[i][j];
    }
    for (std::size_t j = 0; j < cols_; ++j)
      if (sgn(v[j]) != 0) {
        rows_.push_back(std::move(v));
        pivots_.push_back(j);
        return;
      }
  }
  std::size_t rank() const { return rows_.size(); }

 private:
  std::size_t cols_;
  std::vector<std::vector<mpq_class>> rows_;
  std::vector<std::size_t> pivots_;
};

// Points of [-bound, bound]^n, first coordinate fastest.
template <class F>
void for_each_point(std::size_t n, int bound, F&& visit) {
  Row x(n, -bound);
  for (;;) {
    visit(x);
    std::size_t i = 0;
    while (i < n && x[i] == bound) x[i++] = -bound;
    if (i == n) return;
    ++x[i];
  }
}

// Integer system A x = rhs_k for each base coordinate k.
struct GroundSystem {
  std::vector<Row> a;
  std::vector<Row> rhs;

  bool solves(const Row& x, std::size_t k) const {
    for (std::size_t e = 0; e < a.size(); ++e) {
      std::int64_t s = 0;
      for (std::size_t j = 0; j < x.size(); ++j) s += a[e][j] * x[j];
      if (s != rhs[e][k]) return false;
    }
    return true;
  }
};

GroundSystem ground_system(std::span<const DimEquation> eqs, const std::vector<VarId>& vars, std::size_t nbase) {
  std::map<VarId, std::size_t> col;
  for (std::size_t i = 0; i < vars.size(); ++i) col[vars[i]] = i;
  GroundSystem g;
  for (const auto& eq : eqs) {
    dims::Dimension h = eq.homogeneous();
    Row row(vars.size(), 0), r(nbase, 0);
    for (auto [v, e] : h.var_exponents()) {
      auto it = col.find(v);
      if (it == col.end()) throw std::invalid_argument("equation mentions a variable outside the enumerated set");
      row[it->second] = e;
    }
    for (auto [b, e] : h.base_exponents()) r[b] = -e;
    g.a.push_back(row);
    g.rhs.push_back(r);
  }
  return g;
}

// Ground instances of a substitution on one base coordinate: x = offset + M f
// for integer parameter vectors f.
class InstanceSet {
 public:
  InstanceSet(const Substitution& s, const std::vector<VarId>& vars, std::size_t k) {
    std::vector<dims::Dimension> images;
    std::set<VarId> params;
    for (VarId v : vars) {
      images.push_back(unify::apply_substitution(s, dims::Dimension::var(v)));
      for (auto [p, e] : images.back().var_exponents()) params.insert(p);
    }
    params_.assign(params.begin(), params.end());
    for (const auto& img : images) {
      std::vector<mpq_class> row;
      for (VarId p : params_) row.emplace_back(static_cast<long>(img.var_exponent(p)));
      map_.push_back(std::move(row));
      offset_.push_back(img.base_exponent(k));
    }
  }

  // Solves M f = x - offset over Q and accepts integral, consistent f.
  bool contains(const Row& x) const {
    const std::size_t n = map_.size(), p = params_.size();
    std::vector<std::vector<mpq_class>> m(n, std::vector<mpq_class>(p + 1));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < p; ++j) m[i][j] = map_[i][j];
      m[i][p] = static_cast<long>(x[i] - offset_[i]);
    }
    std::size_t r = 0;
    std::vector<std::size_t> pivot_col;
    for (std::size_t c = 0; c < p && r < n; ++c) {
      std::size_t piv = r;
      while (piv < n && sgn(m[piv][c]) == 0) ++piv;
      if (piv == n) continue;
      std::swap(m[piv], m[r]);
      mpq_class d = m[r][c];
      for (auto& e : m[r]) e /= d;
      for (std::size_t i = 0; i < n; ++i) {
        if (i == r || sgn(m[i][c]) == 0) continue;
        mpq_class f = m[i][c];
        for (std::size_t j = 0; j <= p; ++j) m[i][j] -= f * m[r][j];
      }
      pivot_col.push_back(c);
      ++r;
    }
    for (std::size_t i = r; i < n; ++i)
      if (sgn(m[i][p]) != 0) return false;
    // free parameters would make the map non-injective; a principal
    // unifier never has them, and integrality is then a per-pivot check
    if (pivot_col.size() != p) return false;
    for (std::size_t i = 0; i < r; ++i)
      if (m[i][p].get_den() != 1) return false;
    return true;
  }

 private:
  std::vector<VarId> params_;
  std::vector<std::vector<mpq_class>> map_;
  std::vector<std::int64_t> offset_;
};

}  // namespace

MdlScore description_length(const Substitution& s, const std::set<VarId>& system_vars) {
  MdlScore m;
  m.free_vars = unify::free_variable_count(s, system_vars);
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), 2, m.free_vars);
  m.score = mpq_class(1, den);
  return m;
}

BruteForce brute_force_map(std::span<const DimEquation> eqs, const std::vector<VarId>& vars, int bound,
                           const dims::Context& ctx) {
  if (vars.size() > 4) throw std::invalid_argument("brute force limited to four variables");
  if (bound < 0 || bound > 6) throw std::invalid_argument("brute force bound must lie in 0..6");
  const std::size_t n = vars.size(), nbase = ctx.basis().size();
  GroundSystem g = ground_system(eqs, vars, nbase);

  BruteForce out;
  out.solvable_in_box = true;
  for (std::size_t k = 0; k < nbase; ++k) {
    RankTracker rank(n);
    std::optional<Row> first;
    std::size_t count = 0;
    for_each_point(n, bound, [&](const Row& x) {
      if (!g.solves(x, k)) return;
      ++count;
      if (!first) {
        first = x;
        return;
      }
      Row d(n);
      for (std::size_t j = 0; j < n; ++j) d[j] = x[j] - (*first)[j];
      rank.add(d);
    });
    out.solutions += count;
    if (count == 0) {
      out.solvable_in_box = false;
      out.free_vars = 0;
      return out;
    }
    out.free_vars = std::max(out.free_vars, rank.rank());
  }
  return out;
}

namespace {

bool same_in_box(std::span<const DimEquation> eqs, const std::vector<VarId>& vars, int bound, const dims::Context& ctx,
                 const Substitution& s) {
  GroundSystem g = ground_system(eqs, vars, ctx.basis().size());
  for (std::size_t k = 0; k < ctx.basis().size(); ++k) {
    InstanceSet inst(s, vars, k);
    bool same = true;
    for_each_point(vars.size(), bound, [&](const Row& x) {
      if (same && g.solves(x, k) != inst.contains(x)) same = false;
    });
    if (!same) return false;
  }
  return true;
}

}  // namespace

Agreement map_agreement(std::span<const DimEquation> eqs, const std::vector<VarId>& vars, int bound, dims::Context& ctx) {
  Agreement ag;
  ag.brute = brute_force_map(eqs, vars, bound, ctx);
  auto result = unify::solve_system(eqs, ctx);
  if (auto* s = std::get_if<Substitution>(&result)) {
    ag.solver_solved = true;
    ag.solver_free = description_length(*s, std::set<VarId>(vars.begin(), vars.end())).free_vars;
    if (!ag.brute.solvable_in_box) {
      ag.outcome = Agreement::Outcome::skipped;
      ag.skip = Agreement::Skip::no_solution_in_box;
    } else if (ag.solver_free == ag.brute.free_vars) {
      ag.outcome = Agreement::Outcome::agree;
    } else {
      ag.outcome = Agreement::Outcome::disagree;
      if (ag.brute.free_vars < ag.solver_free && same_in_box(eqs, vars, bound, ctx, *s)) {
        ag.outcome = Agreement::Outcome::skipped;
        ag.skip = Agreement::Skip::box_deficit;
      }
    }
  } else {
    ag.outcome = ag.brute.solvable_in_box ? Agreement::Outcome::disagree : Agreement::Outcome::agree;
  }
  return ag;
}

const char* to_string(Agreement::Skip s) {
  switch (s) {
    case Agreement::Skip::none: return "none";
    case Agreement::Skip::no_solution_in_box: return "no-solution-in-box";
    case Agreement::Skip::box_deficit: return "box-deficit";
  }
  return "?";
}

const char* to_string(Agreement::Outcome o) {
  switch (o) {
    case Agreement::Outcome::agree: return "agree";
    case Agreement::Outcome::disagree: return "disagree";
    case Agreement::Outcome::skipped: return "skipped";
  }
  return "?";
}

}  // namespace abelia::mdl
