#include "abelia/interval.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace abelia {
namespace {

constexpr double kInf = HUGE_VAL;

double down(double x) { return std::nextafter(x, -kInf); }
double up(double x) { return std::nextafter(x, kInf); }

// Sign of (exact - rounded) for a + b; 0 when exact.
int add_error(double a, double b, double s) {
  if (std::isinf(s)) return s > 0 ? 1 : -1;  // overflowed: exact lies below +inf / above -inf
  double bb = s - a;
  double err = (a - (s - bb)) + (b - bb);
  return (err > 0) - (err < 0);
}

bool tiny(double x) { return x != 0.0 && std::fabs(x) < std::ldexp(1.0, -969); }

int mul_error(double a, double b, double p) {
  if (a == 0.0 || b == 0.0) return 0;
  if (std::isinf(p)) return p > 0 ? 1 : -1;
  if (p == 0.0 || tiny(p)) return 2;  // underflow: direction not tracked
  double err = std::fma(a, b, -p);
  return (err > 0) - (err < 0);
}

int div_error(double a, double b, double q) {
  if (a == 0.0) return 0;
  if (std::isinf(q)) return q > 0 ? 1 : -1;
  if (q == 0.0 || tiny(q)) return 2;
  double r = std::fma(-q, b, a);
  int sr = (r > 0) - (r < 0);
  return b > 0 ? sr : -sr;
}

// Lower and upper bounds of an operation result given its rounding error sign.
double lower(double v, int err) {
  if (err == 0 || err == 1) return std::isinf(v) && v > 0 ? DBL_MAX : v;
  return down(v);
}
double upper(double v, int err) {
  if (err == 0 || err == -1) return std::isinf(v) && v < 0 ? -DBL_MAX : v;
  return up(v);
}

double add_lo(double a, double b) { double s = a + b; return lower(s, add_error(a, b, s)); }
double add_hi(double a, double b) { double s = a + b; return upper(s, add_error(a, b, s)); }
double mul_lo(double a, double b) { double p = a * b; return lower(p, mul_error(a, b, p)); }
double mul_hi(double a, double b) { double p = a * b; return upper(p, mul_error(a, b, p)); }
double div_lo(double a, double b) { double q = a / b; return lower(q, div_error(a, b, q)); }
double div_hi(double a, double b) { double q = a / b; return upper(q, div_error(a, b, q)); }

// x^k for x >= 0, rounded down or up.
double pow_lo(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r = mul_lo(r, x);
  return std::max(r, 0.0);
}
double pow_hi(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r = mul_hi(r, x);
  return r;
}

}  // namespace

double Interval::magnitude() const { return std::max(std::fabs(lo), std::fabs(hi)); }

std::optional<double> Interval::smallest_nonzero_endpoint() const {
  std::optional<double> m;
  for (double e : {lo, hi})
    if (e != 0.0 && (!m || std::fabs(e) < *m)) m = std::fabs(e);
  return m;
}

std::string Interval::to_string() const {
  std::ostringstream os;
  os.precision(17);
  os << '[' << lo << ", " << hi << ']';
  return os.str();
}

Interval operator+(const Interval& a, const Interval& b) { return {add_lo(a.lo, b.lo), add_hi(a.hi, b.hi)}; }

Interval operator-(const Interval& a) { return {-a.hi, -a.lo}; }

Interval operator-(const Interval& a, const Interval& b) { return a + (-b); }

Interval operator*(const Interval& a, const Interval& b) {
  double lo = kInf, hi = -kInf;
  for (double x : {a.lo, a.hi})
    for (double y : {b.lo, b.hi}) {
      lo = std::min(lo, mul_lo(x, y));
      hi = std::max(hi, mul_hi(x, y));
    }
  return {lo, hi};
}

Interval operator/(const Interval& a, const Interval& b) {
  if (b.contains_zero()) throw std::domain_error("division by an interval containing zero");
  double lo = kInf, hi = -kInf;
  for (double x : {a.lo, a.hi})
    for (double y : {b.lo, b.hi}) {
      lo = std::min(lo, div_lo(x, y));
      hi = std::max(hi, div_hi(x, y));
    }
  return {lo, hi};
}

Interval pow(const Interval& a, int k) {
  if (k == 0) return Interval::point(1.0);
  if (k < 0) return Interval::point(1.0) / pow(a, -k);
  if (k % 2 == 1) {
    double lo = a.lo >= 0 ? pow_lo(a.lo, k) : -pow_hi(-a.lo, k);
    double hi = a.hi >= 0 ? pow_hi(a.hi, k) : -pow_lo(-a.hi, k);
    return {lo, hi};
  }
  if (a.lo >= 0) return {pow_lo(a.lo, k), pow_hi(a.hi, k)};
  if (a.hi <= 0) return {pow_lo(-a.hi, k), pow_hi(-a.lo, k)};
  return {0.0, pow_hi(a.magnitude(), k)};
}

Interval hull(const Interval& a, const Interval& b) { return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)}; }

}  // namespace abelia
