#pragma once

// Description-length scoring of substitutions, and a brute-force check
// that the principal unifier is the hypothesis with fewest free variables.

#include <gmpxx.h>

#include <set>
#include <span>
#include <string>
#include <vector>

#include "abelia/unify.hpp"

namespace abelia::mdl {

using unify::DimEquation;
using unify::Substitution;
using unify::VarId;

struct MdlScore {
  std::size_t free_vars = 0;
  mpq_class score = 1;  // exactly 2^-free_vars
  std::size_t constraints_violated = 0;

  /// "1", "1/2", "1/1024", ...
  std::string score_text() const { return score.get_str(); }
};

MdlScore description_length(const Substitution& s, const std::set<VarId>& system_vars);

struct BruteForce {
  bool solvable_in_box = false;
  std::size_t free_vars = 0;
  std::size_t solutions = 0;  // summed over base coordinates
};

/// Enumerates every assignment in [-bound, bound]^|vars|, one base
/// coordinate at a time, and returns the largest affine dimension of a
/// coordinate's solution set. Throws std::invalid_argument for more than
/// four variables, a bound above 6, or an equation mentioning a variable
/// outside `vars`.
BruteForce brute_force_map(std::span<const DimEquation> eqs, const std::vector<VarId>& vars, int bound,
                           const dims::Context& ctx);

struct Agreement {
  enum class Outcome { agree, disagree, skipped };
  /// Why a case was skipped: nothing solves the system inside the box, or
  /// the box solutions equal the unifier's instances in the box but are
  /// too few to span every free direction.
  enum class Skip { none, no_solution_in_box, box_deficit };
  Outcome outcome = Outcome::agree;
  Skip skip = Skip::none;
  bool solver_solved = false;
  std::size_t solver_free = 0;
  BruteForce brute;
};

/// Runs the solver and the enumeration on the same system. A solvable
/// system with no solution inside the box is skipped; so is a count deficit
/// where the enumerated set is exactly the unifier's instance set within the
/// box (the box is too small to show the remaining directions).
Agreement map_agreement(std::span<const DimEquation> eqs, const std::vector<VarId>& vars, int bound, dims::Context& ctx);

const char* to_string(Agreement::Outcome o);
const char* to_string(Agreement::Skip s);

}  // namespace abelia::mdl
