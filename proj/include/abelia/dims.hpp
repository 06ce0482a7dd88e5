#pragma once

// Physical dimensions as elements of a free abelian group.
//
// A Dimension is a sparse exponent vector over the base dimensions of a
// Basis plus an exponent vector over dimension variables. Variables are
// allocated by a Context (one elaboration session), which also owns the
// basis and the derived-unit aliases used by the text grammar.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace abelia::dims {

using Exponent = std::int64_t;

/// Ordered set of base dimension symbols. Default is the seven SI bases.
class Basis {
 public:
  Basis() = default;
  explicit Basis(std::vector<std::string> symbols);

  static Basis si();

  std::size_t size() const { return symbols_.size(); }
  const std::string& symbol(std::size_t index) const { return symbols_.at(index); }
  const std::vector<std::string>& symbols() const { return symbols_; }
  std::optional<std::size_t> index_of(std::string_view symbol) const;

  friend bool operator==(const Basis&, const Basis&) = default;

 private:
  std::vector<std::string> symbols_;
};

struct VarId {
  std::uint32_t value = 0;
  friend auto operator<=>(const VarId&, const VarId&) = default;
};

struct DimVariable {
  VarId id;
  std::string name;    // rendered with a leading '
  std::string origin;  // node or edge that introduced it
  bool fresh = false;  // introduced by elaboration rather than written by the user
};

class Dimension {
 public:
  Dimension() = default;

  static Dimension base(std::size_t index, Exponent e = 1);
  static Dimension var(VarId id, Exponent e = 1);

  Exponent base_exponent(std::size_t index) const;
  Exponent var_exponent(VarId id) const;
  const std::map<std::size_t, Exponent>& base_exponents() const { return base_; }
  const std::map<VarId, Exponent>& var_exponents() const { return vars_; }

  bool is_identity() const { return base_.empty() && vars_.empty(); }
  bool is_ground() const { return vars_.empty(); }

  // Adds e to the stored exponent, dropping the entry when it reaches zero.
  void add_base(std::size_t index, Exponent e);
  void add_var(VarId id, Exponent e);

  Dimension inverse() const;
  Dimension pow(Exponent k) const;

  friend Dimension operator*(const Dimension& a, const Dimension& b);
  friend Dimension operator/(const Dimension& a, const Dimension& b);
  friend bool operator==(const Dimension&, const Dimension&) = default;

 private:
  std::map<std::size_t, Exponent> base_;
  std::map<VarId, Exponent> vars_;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One elaboration session: basis, derived aliases and the variable table.
class Context {
 public:
  Context() : Context(Basis::si()) {}
  explicit Context(Basis basis);

  const Basis& basis() const { return basis_; }

  /// Returns the variable named `name`, allocating it on first use.
  VarId variable(std::string_view name, std::string_view origin = {});
  /// Allocates a variable with a generated name that cannot clash.
  VarId fresh(std::string_view origin = {});

  std::optional<VarId> find_variable(std::string_view name) const;
  const DimVariable& var(VarId id) const { return vars_.at(id.value); }
  std::size_t variable_count() const { return vars_.size(); }

  const std::map<std::string, Dimension, std::less<>>& aliases() const { return aliases_; }

 private:
  Basis basis_;
  std::vector<DimVariable> vars_;
  std::map<std::string, VarId, std::less<>> by_name_;
  std::map<std::string, Dimension, std::less<>> aliases_;
  std::uint32_t fresh_counter_ = 0;
};

/// a * b^k in the group.
Dimension dim_combine(const Dimension& a, const Dimension& b, Exponent k);

/// Dimension of d(out)/d(in): out * in^-1.
Dimension gradient_dimension(const Dimension& d_out, const Dimension& d_in);

/// Grammar: unit (("*"|"/") unit)*, unit = symbol ("^" signed-int)?
/// A symbol is a base dimension, a derived alias, the literal 1, or a
/// variable written 'name. Unknown variables are allocated in `ctx`.
Dimension parse_dimension(std::string_view text, Context& ctx);

/// Canonical rendering: variables in id order, then bases in basis order.
std::string format_dimension(const Dimension& d, const Context& ctx);

}  // namespace abelia::dims
