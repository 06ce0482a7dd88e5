#pragma once

// Closed real intervals with outward-rounded arithmetic. An endpoint is
// only nudged outward when the operation that produced it was inexact.

#include <optional>
#include <string>

namespace abelia {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  static Interval point(double x) { return {x, x}; }

  bool contains(double x) const { return lo <= x && x <= hi; }
  bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
  bool contains_zero() const { return lo <= 0.0 && 0.0 <= hi; }
  /// Largest |x| over the interval.
  double magnitude() const;
  /// Smallest nonzero |x| among the endpoints, if any endpoint is nonzero.
  std::optional<double> smallest_nonzero_endpoint() const;
  std::string to_string() const;

  friend bool operator==(const Interval&, const Interval&) = default;
};

Interval operator+(const Interval& a, const Interval& b);
Interval operator-(const Interval& a, const Interval& b);
Interval operator-(const Interval& a);
Interval operator*(const Interval& a, const Interval& b);
/// Throws std::domain_error when b contains zero.
Interval operator/(const Interval& a, const Interval& b);
Interval pow(const Interval& a, int k);
Interval hull(const Interval& a, const Interval& b);

}  // namespace abelia
