#pragma once

// Exact accumulation of products of binary64 values, plus the rounded
// left-to-right accumulation it is compared against.

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <span>
#include <string>

#include "abelia/clifford.hpp"

namespace abelia::numeric {

enum class Format { binary32, binary64 };

const char* to_string(Format f);
Format parse_format(const std::string& text);  // "f32", "binary32", "f64", ...

/// Rounds x to the nearest value of `f` (ties to even), returned as double.
double round_to(Format f, double x);

/// Kulisch-style fixed-point register. Bit i carries weight 2^(i - kLsb);
/// the range covers every product of two finite doubles, subnormals
/// included, with more than a hundred carry-guard bits on top.
class ExactAccumulator {
 public:
  static constexpr int kLimbs = 68;
  static constexpr int kLsb = 2150;

  void add(double x) { add_product(x, 1.0); }
  void add_product(double a, double b);
  void clear() { limbs_.fill(0); }

  int sign() const;
  bool is_zero() const { return sign() == 0; }

  /// One round-to-nearest-even conversion of the held value.
  double to_double() const;
  float to_float() const;
  double round(Format f) const { return f == Format::binary32 ? to_float() : to_double(); }

  mpq_class to_rational() const;

 private:
  std::array<std::uint64_t, kLimbs> limbs_{};
};

/// Per-step rounded accumulator: every product and every partial sum is
/// rounded to the chosen format.
class NaiveAccumulator {
 public:
  explicit NaiveAccumulator(Format f) : format_(f) {}

  void add_product(double a, double b);
  double value() const { return format_ == Format::binary32 ? static_cast<double>(f_) : d_; }

 private:
  Format format_;
  float f_ = 0.0f;
  double d_ = 0.0;
};

struct DotResult {
  mpq_class exact;
  double rounded;
};

/// Throws std::invalid_argument on length mismatch, non-finite input, or a
/// binary32 input that is not a float value.
DotResult exact_dot(std::span<const double> a, std::span<const double> b, Format f = Format::binary64);
double naive_dot(std::span<const double> a, std::span<const double> b, Format f);

struct DriftOptions {
  Format format = Format::binary32;
  clifford::GradeSet input = clifford::GradeSet::single(2);
  std::uint64_t seed = 1;
  /// Draw coefficients from small integers instead of uniform reals.
  bool integer_coefficients = false;
};

struct DriftResult {
  double exact_max = 0.0;
  double naive_max = 0.0;
  /// Grades that are zero by law in the probed product.
  clifford::GradeSet structural_zero;
  int steps = 0;
};

/// Closed-loop structural-zero probe. Each step perturbs the state w by a
/// random element of the input grades and forms y = w * reverse(w), once
/// with exact accumulation per output blade and once with per-step
/// rounding. y equals its own reverse, so its grade 2 and 3 (mod 4)
/// components vanish by law. The maximum magnitude seen in those
/// components is recorded for each mode; each mode then renormalises its
/// own w by sqrt|y_0| and carries it into the next step.
/// Throws std::invalid_argument when no reachable grade is a structural zero.
DriftResult drift_probe(const clifford::CayleyTable& table, int steps, const DriftOptions& options = {});

}  // namespace abelia::numeric
