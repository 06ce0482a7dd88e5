#include "abelia/unify.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <optional>

namespace abelia::unify {
namespace {

struct Row {
  std::vector<mpz_class> var;
  std::vector<mpz_class> base;
};

const mpz_class& zero() {
  static const mpz_class z = 0;
  return z;
}

const mpz_class& coef(const Row& r, std::size_t j) { return j < r.var.size() ? r.var[j] : zero(); }

// dst += c * src
void axpy(Row& dst, const mpz_class& c, const Row& src) {
  if (dst.var.size() < src.var.size()) dst.var.resize(src.var.size());
  for (std::size_t j = 0; j < src.var.size(); ++j)
    if (sgn(src.var[j]) != 0) mpz_addmul(dst.var[j].get_mpz_t(), c.get_mpz_t(), src.var[j].get_mpz_t());
  for (std::size_t b = 0; b < src.base.size(); ++b)
    if (sgn(src.base[b]) != 0) mpz_addmul(dst.base[b].get_mpz_t(), c.get_mpz_t(), src.base[b].get_mpz_t());
}

dims::Exponent to_exponent(const mpz_class& v) {
  if (!v.fits_slong_p()) throw std::overflow_error("unifier exponent exceeds 64-bit range");
  return v.get_si();
}

Dimension to_dimension(const Row& r, const std::vector<VarId>& ids) {
  Dimension d;
  for (std::size_t b = 0; b < r.base.size(); ++b)
    if (sgn(r.base[b]) != 0) d.add_base(b, to_exponent(r.base[b]));
  for (std::size_t j = 0; j < r.var.size(); ++j)
    if (sgn(r.var[j]) != 0) d.add_var(ids[j], to_exponent(r.var[j]));
  return d;
}

// Fraction-free Gauss-Jordan elimination over the rationals. Every stored
// row carries the same pivot value d (the current pivot minor) in its own
// pivot column and zero in the others. When d divides every entry the
// rational solution is already an integral parametrization and therefore
// principal; otherwise the integer eliminator below takes over.
class RationalEliminator {
 public:
  explicit RationalEliminator(std::size_t nbase) : nbase_(nbase) {}

  /// False when the equation contradicts the rows taken so far.
  bool add(const Dimension& h) {
    Row t;
    t.base.resize(nbase_);
    for (auto [i, e] : h.base_exponents()) t.base.at(i) = static_cast<long>(e);
    for (auto [v, e] : h.var_exponents()) {
      std::size_t j = column(v);
      if (t.var.size() <= j) t.var.resize(j + 1);
      t.var[j] = static_cast<long>(e);
    }
    // t <- d*t - sum t[p_k] * row_k clears every pivot column
    std::vector<mpz_class> at_pivot(rows_.size());
    for (std::size_t k = 0; k < rows_.size(); ++k) at_pivot[k] = coef(t, pivots_[k]);
    scale(t, d_);
    for (std::size_t k = 0; k < rows_.size(); ++k)
      if (sgn(at_pivot[k]) != 0) axpy(t, -at_pivot[k], rows_[k]);
    std::optional<std::size_t> pivot;
    for (std::size_t j = 0; j < t.var.size(); ++j) {
      if (sgn(t.var[j]) == 0) continue;
      int cmp = pivot ? mpz_cmpabs(t.var[j].get_mpz_t(), t.var[*pivot].get_mpz_t()) : -1;
      if (cmp < 0 || (cmp == 0 && ids_[j] > ids_[*pivot])) pivot = j;
    }
    if (!pivot) {
      for (const auto& b : t.base)
        if (sgn(b) != 0) return false;
      return true;
    }
    // t[p] is the new pivot minor; existing rows move to it and clear column p
    const std::size_t p = *pivot;
    const mpz_class dn = t.var[p];
    mpz_class c;
    for (auto& row : rows_) {
      c = coef(row, p);
      scale(row, dn);
      if (sgn(c) != 0) axpy(row, -c, t);
      divexact(row, d_);
    }
    rows_.push_back(std::move(t));
    pivots_.push_back(p);
    d_ = dn;
    return true;
  }

  std::optional<Substitution> integral() const {
    Substitution s;
    std::vector<bool> bound(ids_.size());
    for (std::size_t k = 0; k < rows_.size(); ++k) {
      const Row& row = rows_[k];
      Row r;
      r.var.resize(row.var.size());
      r.base.resize(nbase_);
      for (std::size_t j = 0; j < row.var.size(); ++j) {
        if (j == pivots_[k] || sgn(row.var[j]) == 0) continue;
        if (!mpz_divisible_p(row.var[j].get_mpz_t(), d_.get_mpz_t())) return std::nullopt;
        mpz_divexact(r.var[j].get_mpz_t(), row.var[j].get_mpz_t(), d_.get_mpz_t());
        r.var[j] = -r.var[j];
      }
      for (std::size_t b = 0; b < nbase_; ++b) {
        if (sgn(row.base[b]) == 0) continue;
        if (!mpz_divisible_p(row.base[b].get_mpz_t(), d_.get_mpz_t())) return std::nullopt;
        mpz_divexact(r.base[b].get_mpz_t(), row.base[b].get_mpz_t(), d_.get_mpz_t());
        r.base[b] = -r.base[b];
      }
      s.bindings.emplace(ids_[pivots_[k]], to_dimension(r, ids_));
      bound[pivots_[k]] = true;
    }
    for (std::size_t j = 0; j < ids_.size(); ++j)
      if (!bound[j]) s.free.insert(ids_[j]);
    return s;
  }

 private:
  std::size_t column(VarId v) {
    auto [it, inserted] = col_.try_emplace(v, ids_.size());
    if (inserted) ids_.push_back(v);
    return it->second;
  }

  static void scale(Row& r, const mpz_class& f) {
    if (f == 1) return;
    for (auto& v : r.var) v *= f;
    for (auto& b : r.base) b *= f;
  }

  static void divexact(Row& r, const mpz_class& f) {
    if (f == 1) return;
    for (auto& v : r.var) mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), f.get_mpz_t());
    for (auto& b : r.base) mpz_divexact(b.get_mpz_t(), b.get_mpz_t(), f.get_mpz_t());
  }

  std::size_t nbase_;
  std::vector<VarId> ids_;
  std::map<VarId, std::size_t> col_;
  std::vector<Row> rows_;
  std::vector<std::size_t> pivots_;
  mpz_class d_ = 1;
};

// Integer elimination. A binding only mentions variables that were unbound
// when it was made; bindings stay triangular until result().
class Eliminator {
 public:
  explicit Eliminator(Context& ctx) : ctx_(&ctx), nbase_(ctx.basis().size()) {}

  // Returns an error when the equation has no solution; state is then
  // partially updated (callers that continue must restore a snapshot).
  std::optional<UnifyError> add(const DimEquation& eq) {
    Row t = to_row(eq.homogeneous());
    substitute(t);
    for (;;) {
      std::optional<std::size_t> pivot;
      std::size_t nvars = 0;
      for (std::size_t j = 0; j < t.var.size(); ++j) {
        if (sgn(t.var[j]) == 0) continue;
        ++nvars;
        if (!pivot) {
          pivot = j;
          continue;
        }
        int c = mpz_cmpabs(t.var[j].get_mpz_t(), t.var[*pivot].get_mpz_t());
        // ties go to the newest variable so user-written ones stay free
        if (c < 0 || (c == 0 && ids_[j] > ids_[*pivot])) pivot = j;
      }
      if (!pivot) {
        for (const auto& b : t.base)
          if (sgn(b) != 0) return UnifyError{UnifyErrorKind::inconsistent, to_dimension(t, ids_), {eq.provenance}};
        return std::nullopt;
      }
      const std::size_t x = *pivot;
      const mpz_class c = t.var[x];

      bool divides = true;
      for (std::size_t j = 0; j < t.var.size() && divides; ++j)
        if (j != x && sgn(t.var[j]) != 0 && !mpz_divisible_p(t.var[j].get_mpz_t(), c.get_mpz_t())) divides = false;
      for (std::size_t b = 0; b < nbase_ && divides; ++b)
        if (sgn(t.base[b]) != 0 && !mpz_divisible_p(t.base[b].get_mpz_t(), c.get_mpz_t())) divides = false;

      if (divides) {
        // x = -(rest of t) / c
        Row r;
        r.var.resize(t.var.size());
        r.base.resize(nbase_);
        for (std::size_t j = 0; j < t.var.size(); ++j)
          if (j != x && sgn(t.var[j]) != 0) mpz_divexact(r.var[j].get_mpz_t(), t.var[j].get_mpz_t(), c.get_mpz_t()), r.var[j] = -r.var[j];
        for (std::size_t b = 0; b < nbase_; ++b)
          if (sgn(t.base[b]) != 0) mpz_divexact(r.base[b].get_mpz_t(), t.base[b].get_mpz_t(), c.get_mpz_t()), r.base[b] = -r.base[b];
        bind(x, std::move(r));
        return std::nullopt;
      }
      if (nvars == 1) return UnifyError{UnifyErrorKind::divisibility, to_dimension(t, ids_), {eq.provenance}};

      // x = z - sum floor(t_y / c) y - sum floor(t_b / c) b, which leaves
      // c*z + sum (t_y mod c) y + sum (t_b mod c) b to solve.
      std::size_t z = column(ctx_->fresh(eq.provenance));
      auxiliary_.push_back(z);
      if (t.var.size() <= z) t.var.resize(z + 1);
      Row r;
      r.var.resize(z + 1);
      r.base.resize(nbase_);
      r.var[z] = 1;
      mpz_class q;
      for (std::size_t j = 0; j < t.var.size(); ++j) {
        if (j == x || sgn(t.var[j]) == 0) continue;
        mpz_fdiv_qr(q.get_mpz_t(), t.var[j].get_mpz_t(), t.var[j].get_mpz_t(), c.get_mpz_t());
        r.var[j] = -q;
      }
      for (std::size_t b = 0; b < nbase_; ++b) {
        if (sgn(t.base[b]) == 0) continue;
        mpz_fdiv_qr(q.get_mpz_t(), t.base[b].get_mpz_t(), t.base[b].get_mpz_t(), c.get_mpz_t());
        r.base[b] = -q;
      }
      t.var[z] = c;
      t.var[x] = 0;
      bind(x, std::move(r));
    }
  }

  // Bound auxiliaries are dropped: nothing else refers to them once the
  // bindings are reduced, and their ground values can outgrow 64 bits.
  Substitution result() const {
    std::vector<std::optional<Row>> reduced(ids_.size());
    mpz_class c;
    for (auto it = bound_.rbegin(); it != bound_.rend(); ++it) {
      Row r = *bind_[*it];
      for (std::size_t j = 0; j < r.var.size(); ++j) {
        if (sgn(r.var[j]) == 0 || !reduced[j]) continue;
        c = r.var[j];
        r.var[j] = 0;
        axpy(r, c, *reduced[j]);
      }
      reduced[*it] = std::move(r);
    }
    Substitution s;
    for (std::size_t j = 0; j < ids_.size(); ++j) {
      if (!reduced[j])
        s.free.insert(ids_[j]);
      else if (std::find(auxiliary_.begin(), auxiliary_.end(), j) == auxiliary_.end())
        s.bindings.emplace(ids_[j], to_dimension(*reduced[j], ids_));
    }
    return s;
  }

 private:
  std::size_t column(VarId id) {
    auto [it, inserted] = col_.try_emplace(id, ids_.size());
    if (inserted) {
      ids_.push_back(id);
      bind_.emplace_back();
    }
    return it->second;
  }

  Row to_row(const Dimension& d) {
    Row r;
    r.base.resize(nbase_);
    for (auto [i, e] : d.base_exponents()) r.base.at(i) = static_cast<long>(e);
    for (auto [v, e] : d.var_exponents()) {
      std::size_t j = column(v);
      if (r.var.size() <= j) r.var.resize(j + 1);
      r.var[j] = static_cast<long>(e);
    }
    return r;
  }

  // one pass in bind order clears every bound variable from t
  void substitute(Row& t) const {
    mpz_class c;
    for (std::size_t k : bound_) {
      if (sgn(coef(t, k)) == 0) continue;
      c = t.var[k];
      t.var[k] = 0;
      axpy(t, c, *bind_[k]);
    }
  }

  void bind(std::size_t x, Row r) {
    bind_[x] = std::move(r);
    bound_.push_back(x);
  }

  Context* ctx_;
  std::size_t nbase_;
  std::vector<VarId> ids_;
  std::map<VarId, std::size_t> col_;
  std::vector<std::optional<Row>> bind_;
  std::vector<std::size_t> bound_;
  std::vector<std::size_t> auxiliary_;
};

}  // namespace

const char* to_string(UnifyErrorKind kind) {
  switch (kind) {
    case UnifyErrorKind::inconsistent: return "inconsistent";
    case UnifyErrorKind::divisibility: return "divisibility";
  }
  return "?";
}

std::string UnifyError::message(const Context& ctx) const {
  std::string residual_text = dims::format_dimension(residual, ctx);
  if (kind == UnifyErrorKind::inconsistent)
    return "dimension mismatch: residual " + residual_text + " cannot equal 1";
  return "no integer solution: residual " + residual_text + " is not divisible by its variable exponents";
}

UnifyResult unify(const Dimension& a, const Dimension& b, Context& ctx) {
  const DimEquation eq{a, b, {}};
  return solve_system(std::span(&eq, 1), ctx);
}

UnifyResult solve_system(std::span<const DimEquation> eqs, Context& ctx) {
  RationalEliminator fast(ctx.basis().size());
  bool consistent = true;
  for (const auto& eq : eqs)
    if (!(consistent = fast.add(eq.homogeneous()))) break;
  if (consistent)
    if (auto s = fast.integral()) return *s;

  Eliminator elim(ctx);
  for (const auto& eq : eqs)
    if (auto err = elim.add(eq)) return *err;
  return elim.result();
}

SystemSolution solve_system_collect(std::span<const DimEquation> eqs, Context& ctx) {
  RationalEliminator fast(ctx.basis().size());
  bool consistent = true;
  for (const auto& eq : eqs)
    if (!(consistent = fast.add(eq.homogeneous()))) break;
  if (consistent)
    if (auto s = fast.integral()) return {*s, {}};

  Eliminator elim(ctx);
  SystemSolution out;
  for (const auto& eq : eqs) {
    Eliminator snapshot = elim;
    if (auto err = elim.add(eq)) {
      out.errors.push_back(std::move(*err));
      elim = std::move(snapshot);
    }
  }
  out.substitution = elim.result();
  return out;
}

Dimension apply_substitution(const Substitution& s, const Dimension& d) {
  Dimension r;
  for (auto [i, e] : d.base_exponents()) r.add_base(i, e);
  for (auto [v, e] : d.var_exponents()) {
    auto it = s.bindings.find(v);
    if (it == s.bindings.end())
      r.add_var(v, e);
    else
      r = dims::dim_combine(r, it->second, e);
  }
  return r;
}

std::size_t free_variable_count(const Substitution& s, const std::set<VarId>& system_vars) {
  std::set<VarId> free = s.free;
  for (VarId v : system_vars)
    if (!s.binds(v)) free.insert(v);
  return free.size();
}

std::set<VarId> system_variables(std::span<const DimEquation> eqs) {
  std::set<VarId> vars;
  for (const auto& eq : eqs) {
    for (const auto& [v, e] : eq.lhs.var_exponents()) vars.insert(v);
    for (const auto& [v, e] : eq.rhs.var_exponents()) vars.insert(v);
  }
  return vars;
}

}  // namespace abelia::unify
