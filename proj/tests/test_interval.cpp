#include <doctest.h>

#include <gmpxx.h>

#include <cfloat>
#include <cmath>
#include <random>

#include "abelia/interval.hpp"

using abelia::Interval;

namespace {

bool encloses(const Interval& i, const mpq_class& exact) { return mpq_class(i.lo) <= exact && exact <= mpq_class(i.hi); }

}  // namespace

TEST_CASE("exact operations are not widened") {
  Interval a{1, 2}, b{3, 4};
  CHECK(a + b == Interval{4, 6});
  CHECK(a - b == Interval{-3, -1});
  CHECK(a * b == Interval{3, 8});
  CHECK(Interval{-2, 3} * Interval{-1, 4} == Interval{-8, 12});
  CHECK(Interval{1, 2} / Interval{4, 8} == Interval{0.125, 0.5});
  CHECK(pow(Interval{-2, 3}, 2) == Interval{0, 9});
  CHECK(pow(Interval{-2, -1}, 2) == Interval{1, 4});
  CHECK(pow(Interval{-2, 3}, 3) == Interval{-8, 27});
  CHECK(pow(Interval{2, 4}, -1) == Interval{0.25, 0.5});
  CHECK(pow(Interval{-5, 5}, 0) == Interval{1, 1});
}

TEST_CASE("inexact results are widened outward") {
  Interval third = Interval::point(1) / Interval::point(3);
  CHECK(third.lo < third.hi);
  CHECK(encloses(third, mpq_class(1, 3)));
  Interval s = Interval::point(0.1) + Interval::point(0.2);
  CHECK(encloses(s, mpq_class(0.1) + mpq_class(0.2)));
}

TEST_CASE("division by an interval containing zero") {
  const Interval a{1, 2}, straddle{-1, 1}, touch{0, 1};
  CHECK_THROWS_AS(a / straddle, std::domain_error);
  CHECK_THROWS_AS(a / touch, std::domain_error);
  CHECK_THROWS_AS(pow(touch, -2), std::domain_error);
}

TEST_CASE("overflow stays enclosing") {
  Interval big{DBL_MAX, DBL_MAX};
  Interval s = big + big;
  CHECK(s.lo == DBL_MAX);
  CHECK(std::isinf(s.hi));
}

TEST_CASE("enclosure of exact results (property)") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  auto rnd = [&] {
    double a = u(rng), b = u(rng);
    return Interval{std::min(a, b), std::max(a, b)};
  };
  for (int trial = 0; trial < 2000; ++trial) {
    Interval a = rnd(), b = rnd();
    for (double x : {a.lo, a.hi, 0.5 * (a.lo + a.hi)})
      for (double y : {b.lo, b.hi, 0.5 * (b.lo + b.hi)}) {
        mpq_class X(x), Y(y);
        CHECK(encloses(a + b, X + Y));
        CHECK(encloses(a - b, X - Y));
        CHECK(encloses(a * b, X * Y));
        if (!b.contains_zero()) CHECK(encloses(a / b, X / Y));
        CHECK(encloses(pow(a, 3), X * X * X));
      }
  }
}
