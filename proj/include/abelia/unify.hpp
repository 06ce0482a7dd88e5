#pragma once

// Principal unification over the free abelian group of dimensions.
//
// Equations are kept in homogeneous form t = lhs * rhs^-1 = 1. Solving first
// runs fraction-free elimination over the rationals; when the common pivot
// divides every row, that parametrization is integral and is returned as
// is. Otherwise integer elimination in the style of Kennedy's units-of-
// measure algorithm takes over: the variable with the smallest exponent is
// either eliminated outright (when it divides every other exponent) or
// replaced by a fresh variable through a unimodular change of variables that
// reduces the remaining exponents modulo the pivot. Internal arithmetic is
// arbitrary precision.

#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "abelia/dims.hpp"

namespace abelia::unify {

using dims::Context;
using dims::Dimension;
using dims::VarId;

struct DimEquation {
  Dimension lhs;
  Dimension rhs;
  std::string provenance;

  Dimension homogeneous() const { return lhs / rhs; }
};

/// Idempotent substitution: no bound variable occurs in any binding.
struct Substitution {
  std::map<VarId, Dimension> bindings;
  std::set<VarId> free;

  bool binds(VarId v) const { return bindings.contains(v); }
  friend bool operator==(const Substitution&, const Substitution&) = default;
};

enum class UnifyErrorKind { inconsistent, divisibility };

const char* to_string(UnifyErrorKind kind);

struct UnifyError {
  UnifyErrorKind kind;
  Dimension residual;
  std::vector<std::string> provenance;

  std::string message(const Context& ctx) const;
};

using UnifyResult = std::variant<Substitution, UnifyError>;

UnifyResult unify(const Dimension& a, const Dimension& b, Context& ctx);

/// Simultaneous most general unifier; stops at the first failing equation.
UnifyResult solve_system(std::span<const DimEquation> eqs, Context& ctx);

/// Collect-all variant: a failing equation is recorded and skipped, and the
/// substitution covers every equation that could be solved.
struct SystemSolution {
  Substitution substitution;
  std::vector<UnifyError> errors;
};
SystemSolution solve_system_collect(std::span<const DimEquation> eqs, Context& ctx);

Dimension apply_substitution(const Substitution& s, const Dimension& d);

/// Nullity of the constraint matrix: unbound system variables plus the
/// fresh variables the elimination left free.
std::size_t free_variable_count(const Substitution& s, const std::set<VarId>& system_vars);

/// Variables that occur in the equations, in id order.
std::set<VarId> system_variables(std::span<const DimEquation> eqs);

}  // namespace abelia::unify
