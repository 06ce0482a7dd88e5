#include "abelia/numeric.hpp"

#include <bit>
#include <cfloat>
#include <cmath>
#include <stdexcept>

namespace abelia::numeric {
namespace {

struct Decomposed {
  std::uint64_t mantissa;  // odd, or zero
  int exponent;
  bool negative;
};

Decomposed decompose(double x) {
  if (x == 0.0) return {0, 0, false};
  int e = 0;
  double f = std::frexp(std::fabs(x), &e);
  auto m = static_cast<std::uint64_t>(std::ldexp(f, 53));
  e -= 53;
  int tz = std::countr_zero(m);
  return {m >> tz, e + tz, std::signbit(x)};
}

// Target formats as (precision, lowest exponent of a subnormal ulp, emax).
struct Target {
  int precision;
  int min_exp;
  int max_exp;  // values >= 2^max_exp overflow
};

constexpr Target kBinary64{53, -1074, 1024};
constexpr Target kBinary32{24, -149, 128};

void check_inputs(std::span<const double> a, std::span<const double> b, Format f) {
  if (a.size() != b.size()) throw std::invalid_argument("dot product operands differ in length");
  auto check = [f](double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite dot product input");
    if (f == Format::binary32 && static_cast<double>(static_cast<float>(x)) != x)
      throw std::invalid_argument("input is not a binary32 value");
  };
  for (double x : a) check(x);
  for (double x : b) check(x);
}

}  // namespace

const char* to_string(Format f) { return f == Format::binary32 ? "binary32" : "binary64"; }

Format parse_format(const std::string& text) {
  if (text == "f32" || text == "binary32" || text == "float32") return Format::binary32;
  if (text == "f64" || text == "binary64" || text == "float64") return Format::binary64;
  throw std::invalid_argument("unknown format '" + text + "'");
}

double round_to(Format f, double x) { return f == Format::binary32 ? static_cast<double>(static_cast<float>(x)) : x; }

void ExactAccumulator::add_product(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b)) throw std::invalid_argument("non-finite accumulator input");
  Decomposed x = decompose(a), y = decompose(b);
  if (x.mantissa == 0 || y.mantissa == 0) return;
  unsigned __int128 p = static_cast<unsigned __int128>(x.mantissa) * y.mantissa;
  int shift = x.exponent + y.exponent + kLsb;  // >= 2 for doubles
  int limb = shift / 64, off = shift % 64;
  std::uint64_t part[3] = {
      static_cast<std::uint64_t>(p) << off,
      off ? static_cast<std::uint64_t>(p >> (64 - off)) : static_cast<std::uint64_t>(p >> 64),
      off ? static_cast<std::uint64_t>(p >> (128 - off)) : 0,
  };
  if (!(x.negative ^ y.negative)) {
    unsigned carry = 0;
    for (int i = limb; i < kLimbs; ++i) {
      std::uint64_t add = i - limb < 3 ? part[i - limb] : 0;
      if (i - limb >= 3 && carry == 0) break;
      std::uint64_t s = limbs_[i] + add;
      unsigned c1 = s < add;
      std::uint64_t t = s + carry;
      unsigned c2 = t < s;
      limbs_[i] = t;
      carry = c1 | c2;
    }
  } else {
    unsigned borrow = 0;
    for (int i = limb; i < kLimbs; ++i) {
      std::uint64_t sub = i - limb < 3 ? part[i - limb] : 0;
      if (i - limb >= 3 && borrow == 0) break;
      std::uint64_t s = limbs_[i] - sub;
      unsigned b1 = limbs_[i] < sub;
      std::uint64_t t = s - borrow;
      unsigned b2 = s < static_cast<std::uint64_t>(borrow);
      limbs_[i] = t;
      borrow = b1 | b2;
    }
  }
}

int ExactAccumulator::sign() const {
  if (limbs_[kLimbs - 1] >> 63) return -1;
  for (auto l : limbs_)
    if (l) return 1;
  return 0;
}

namespace {

using Limbs = std::array<std::uint64_t, ExactAccumulator::kLimbs>;

Limbs magnitude(const Limbs& v, bool negative) {
  if (!negative) return v;
  Limbs m;
  unsigned carry = 1;
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::uint64_t t = ~v[i] + carry;
    carry = carry && t == 0;
    m[i] = t;
  }
  return m;
}

bool bit(const Limbs& m, int i) { return (m[i / 64] >> (i % 64)) & 1; }

bool any_below(const Limbs& m, int i) {
  for (int l = 0; l < i / 64; ++l)
    if (m[l]) return true;
  int r = i % 64;
  return r && (m[i / 64] & ((std::uint64_t{1} << r) - 1));
}

double round_limbs(const Limbs& v, bool negative, Target t) {
  Limbs m = magnitude(v, negative);
  int top = -1;
  for (int l = ExactAccumulator::kLimbs - 1; l >= 0; --l)
    if (m[l]) {
      top = l * 64 + 63 - std::countl_zero(m[l]);
      break;
    }
  if (top < 0) return 0.0;
  const int lsb = ExactAccumulator::kLsb;
  int lo = std::max(top - t.precision + 1, t.min_exp + lsb);
  std::uint64_t kept = 0;
  for (int i = top; i >= lo; --i) kept = (kept << 1) | bit(m, i);
  if (lo > 0 && bit(m, lo - 1) && (any_below(m, lo - 1) || (kept & 1))) ++kept;
  double r = std::ldexp(static_cast<double>(kept), lo - lsb);
  if (r >= std::ldexp(1.0, t.max_exp)) r = HUGE_VAL;
  return negative ? -r : r;
}

}  // namespace

double ExactAccumulator::to_double() const { return round_limbs(limbs_, sign() < 0, kBinary64); }

float ExactAccumulator::to_float() const { return static_cast<float>(round_limbs(limbs_, sign() < 0, kBinary32)); }

mpq_class ExactAccumulator::to_rational() const {
  bool negative = sign() < 0;
  Limbs m = magnitude(limbs_, negative);
  mpz_class num;
  mpz_import(num.get_mpz_t(), m.size(), -1, sizeof(std::uint64_t), 0, 0, m.data());
  if (negative) num = -num;
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), 2, kLsb);
  mpq_class q(num, den);
  q.canonicalize();
  return q;
}

void NaiveAccumulator::add_product(double a, double b) {
  if (format_ == Format::binary32) {
    float p = static_cast<float>(a) * static_cast<float>(b);
    f_ = f_ + p;
  } else {
    double p = a * b;
    d_ = d_ + p;
  }
}

DotResult exact_dot(std::span<const double> a, std::span<const double> b, Format f) {
  check_inputs(a, b, f);
  ExactAccumulator acc;
  for (std::size_t i = 0; i < a.size(); ++i) acc.add_product(a[i], b[i]);
  return {acc.to_rational(), acc.round(f)};
}

double naive_dot(std::span<const double> a, std::span<const double> b, Format f) {
  check_inputs(a, b, f);
  NaiveAccumulator acc(f);
  for (std::size_t i = 0; i < a.size(); ++i) acc.add_product(a[i], b[i]);
  return acc.value();
}

}  // namespace abelia::numeric
