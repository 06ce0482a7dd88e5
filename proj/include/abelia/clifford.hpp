#pragma once

// Cayley tables of real Clifford algebras Cl(p,q,r) and grade bookkeeping.
//
// Generators are ordered degenerate first, then positive, then negative, so
// Cl(3,0,1) gets e0 as its null direction. A blade is the bitmask of its
// generators; the product of two blades is always the XOR of the masks
// times a sign in {-1, 0, +1}.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace abelia::clifford {

constexpr int kMaxGenerators = 12;

struct Signature {
  int p = 0;
  int q = 0;
  int r = 0;

  int n() const { return p + q + r; }
  /// Square of each generator in canonical order: r zeros, p ones, q minus ones.
  std::vector<int> metric() const;
  std::string to_string() const;
  friend bool operator==(const Signature&, const Signature&) = default;
};

using Blade = std::uint32_t;

inline int grade(Blade b) { return __builtin_popcount(b); }

class GradeSet {
 public:
  GradeSet() = default;
  static GradeSet single(int k) { return GradeSet(std::uint32_t{1} << k); }
  static GradeSet range(int lo, int hi);
  static GradeSet all(int n) { return range(0, n); }
  static GradeSet from_bits(std::uint32_t bits) { return GradeSet(bits); }

  void insert(int k) { bits_ |= std::uint32_t{1} << k; }
  bool contains(int k) const { return k >= 0 && k < 32 && ((bits_ >> k) & 1); }
  bool empty() const { return bits_ == 0; }
  bool subset_of(GradeSet o) const { return (bits_ & ~o.bits_) == 0; }
  std::uint32_t bits() const { return bits_; }
  std::vector<int> members() const;
  /// "{0,2,4}"; the empty set renders as "{}".
  std::string to_string() const;

  GradeSet operator|(GradeSet o) const { return GradeSet(bits_ | o.bits_); }
  GradeSet operator&(GradeSet o) const { return GradeSet(bits_ & o.bits_); }
  friend bool operator==(GradeSet, GradeSet) = default;

 private:
  explicit GradeSet(std::uint32_t bits) : bits_(bits) {}
  std::uint32_t bits_ = 0;
};

/// Parses "0,2,4" or "{0,2,4}" or "2".
GradeSet parse_grade_set(const std::string& text);

class CayleyTable {
 public:
  /// Throws std::invalid_argument when n exceeds kMaxGenerators.
  explicit CayleyTable(Signature sig);
  /// Explicit generator squares in declared order (each 0, 1 or -1).
  explicit CayleyTable(std::vector<int> metric);

  const Signature& signature() const { return sig_; }
  int generators() const { return static_cast<int>(metric_.size()); }
  std::size_t blades() const { return std::size_t{1} << metric_.size(); }
  const std::vector<int>& metric() const { return metric_; }
  Blade degenerate_mask() const { return degenerate_; }

  int sign(Blade a, Blade b) const { return signs_[(std::size_t{a} << metric_.size()) | b]; }
  static Blade result(Blade a, Blade b) { return a ^ b; }

  /// "1", "e0", "e12", ...; indices count from 0 when degenerate
  /// generators exist and from 1 otherwise.
  std::string blade_name(Blade b) const;
  std::vector<Blade> blades_of(GradeSet g) const;

 private:
  void build();

  Signature sig_;
  std::vector<int> metric_;
  Blade degenerate_ = 0;
  std::vector<std::int8_t> signs_;
};

CayleyTable build_cayley(Signature sig);

/// {j + k} when j + k <= n, else empty.
GradeSet grade_outer(int j, int k, int n);
/// { |k - j| + 2i : 0 <= i <= min(j,k) } restricted to 0..n.
GradeSet grade_geometric(int j, int k, int n);
/// Union of grade_geometric over all pairs.
GradeSet grade_geometric(GradeSet a, GradeSet b, int n);

/// Grades reachable through a nonzero table entry from A x B.
GradeSet grade_product_set(const CayleyTable& t, GradeSet a, GradeSet b);
/// Grades reachable by the outer product (no shared generators).
GradeSet grade_wedge_set(const CayleyTable& t, GradeSet a, GradeSet b);

struct Sparsity {
  std::size_t nonzero = 0;
  std::size_t total = 0;
};

Sparsity sparsity_count(const CayleyTable& t, GradeSet a, GradeSet b);

class Multivector {
 public:
  Multivector() = default;
  explicit Multivector(Signature sig) : sig_(sig) {}

  const Signature& signature() const { return sig_; }
  const std::map<Blade, double>& coefficients() const { return coeffs_; }
  double operator[](Blade b) const;
  /// Stores v; a zero erases the component.
  void set(Blade b, double v);
  GradeSet grade_set() const;

  friend bool operator==(const Multivector&, const Multivector&) = default;

 private:
  Signature sig_;
  std::map<Blade, double> coeffs_;
};

/// Each output component is summed exactly and rounded once.
/// Throws std::invalid_argument on signature mismatch.
Multivector mv_geometric_product(const CayleyTable& t, const Multivector& x, const Multivector& y);

/// Reversion: grade g picks up (-1)^(g(g-1)/2).
Multivector reverse(const Multivector& x);

}  // namespace abelia::clifford
