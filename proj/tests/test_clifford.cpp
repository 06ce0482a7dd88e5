#include <doctest.h>

#include <random>
#include <stdexcept>

#include "abelia/clifford.hpp"
#include "clifford_oracle.hpp"

using namespace abelia::clifford;
using abelia::testing::mask_of;
using abelia::testing::multiply_words;
using abelia::testing::word_of;

namespace {

Sparsity oracle_sparsity(const CayleyTable& t, GradeSet a, GradeSet b) {
  Sparsity s;
  for (unsigned x = 0; x < t.blades(); ++x) {
    if (!a.contains(grade(x))) continue;
    for (unsigned y = 0; y < t.blades(); ++y) {
      if (!b.contains(grade(y))) continue;
      ++s.total;
      s.nonzero += multiply_words(word_of(x), word_of(y), t.metric()).sign != 0;
    }
  }
  return s;
}

Multivector random_mv(std::mt19937_64& rng, const CayleyTable& t, GradeSet g) {
  std::uniform_int_distribution<int> coef(-4, 4);
  std::uniform_int_distribution<int> keep(0, 2);
  Multivector m(t.signature());
  for (Blade b : t.blades_of(g))
    if (keep(rng)) m.set(b, coef(rng) + 0.25 * coef(rng));
  return m;
}

}  // namespace

TEST_CASE("build_cayley examples") {
  CayleyTable pga(Signature{3, 0, 1});
  CHECK(pga.blades() == 16);
  CHECK(pga.blades() * pga.blades() == 256);
  CHECK(pga.blade_name(1) == "e0");
  CHECK(pga.blade_name(0b0110) == "e12");
  CHECK(pga.degenerate_mask() == 1);

  CayleyTable trivial(Signature{0, 0, 0});
  CHECK(trivial.blades() == 1);
  CHECK(trivial.sign(0, 0) == 1);
  CHECK(CayleyTable::result(0, 0) == 0);

  CayleyTable neg(Signature{0, 1, 0});
  CHECK(neg.sign(1, 1) == -1);
  CHECK(CayleyTable::result(1, 1) == 0);
  CHECK(neg.blade_name(1) == "e1");

  CHECK_THROWS_AS(CayleyTable(Signature{10, 2, 1}), std::invalid_argument);
  CHECK_THROWS_AS(CayleyTable(std::vector<int>{1, 2}), std::invalid_argument);
}

TEST_CASE("blade names past nine generators") {
  CayleyTable t(Signature{11, 0, 0});
  CHECK(t.blade_name(1u << 10) == "e11");
  CHECK(t.blade_name((1u << 0) | (1u << 10)) == "e1_11");
}

TEST_CASE("grade_outer examples") {
  CHECK(grade_outer(1, 1, 4) == GradeSet::single(2));
  CHECK(grade_outer(2, 3, 4).empty());
  CHECK(grade_outer(0, 2, 4) == GradeSet::single(2));
}

TEST_CASE("grade_geometric examples") {
  CHECK(grade_geometric(2, 2, 4).to_string() == "{0,2,4}");
  CHECK(grade_geometric(1, 1, 4).to_string() == "{0,2}");
  CHECK(grade_geometric(0, 3, 4).to_string() == "{3}");
  CHECK(grade_geometric(3, 3, 4).to_string() == "{0,2,4}");
}

TEST_CASE("grade_product_set examples") {
  CayleyTable pga(Signature{3, 0, 1});
  GradeSet bi = GradeSet::single(2);
  GradeSet g = grade_product_set(pga, bi, bi);
  CHECK(g.subset_of(parse_grade_set("0,2,4")));
  CHECK_FALSE(g.contains(1));
  CHECK_FALSE(g.contains(3));
  CHECK(grade_product_set(pga, GradeSet::single(0), GradeSet::single(0)) == GradeSet::single(0));
  CayleyTable e2(Signature{2, 0, 0});
  CHECK(grade_product_set(e2, GradeSet::single(1), GradeSet::single(1)).to_string() == "{0,2}");
  // a purely degenerate algebra has nothing but the outer product
  CayleyTable null2(Signature{0, 0, 2});
  CHECK(grade_product_set(null2, GradeSet::single(1), GradeSet::single(1)).to_string() == "{2}");
}

TEST_CASE("sparsity_count examples") {
  CayleyTable pga(Signature{3, 0, 1});
  auto full = sparsity_count(pga, GradeSet::all(4), GradeSet::all(4));
  CHECK(full.total == 256);
  CHECK(full.nonzero == oracle_sparsity(pga, GradeSet::all(4), GradeSet::all(4)).nonzero);

  CayleyTable e2(Signature{2, 0, 0});
  auto vv = sparsity_count(e2, GradeSet::single(1), GradeSet::single(1));
  CHECK(vv.nonzero == 4);
  CHECK(vv.total == 4);

  auto bb = sparsity_count(pga, GradeSet::single(2), GradeSet::single(2));
  CHECK(bb.total == 36);
  CHECK(bb.nonzero == oracle_sparsity(pga, GradeSet::single(2), GradeSet::single(2)).nonzero);
  CHECK(bb.nonzero == 27);
}

TEST_CASE("parse_grade_set") {
  CHECK(parse_grade_set("{0,2,4}").to_string() == "{0,2,4}");
  CHECK(parse_grade_set("2") == GradeSet::single(2));
  CHECK(parse_grade_set("").empty());
  CHECK_THROWS_AS(parse_grade_set("1,"), std::invalid_argument);
  CHECK_THROWS_AS(parse_grade_set("a"), std::invalid_argument);
  CHECK_THROWS_AS(parse_grade_set("99"), std::invalid_argument);
}

TEST_CASE("mv_geometric_product examples") {
  CayleyTable pga(Signature{3, 0, 1});
  std::mt19937_64 rng(3);
  Multivector one(pga.signature());
  one.set(0, 1.0);
  Multivector y = random_mv(rng, pga, GradeSet::all(4));
  CHECK(mv_geometric_product(pga, one, y) == y);

  CayleyTable neg(Signature{0, 1, 0});
  Multivector e1(neg.signature());
  e1.set(1, 1.0);
  auto sq = mv_geometric_product(neg, e1, e1);
  CHECK(sq.coefficients().size() == 1);
  CHECK(sq[0] == -1.0);

  Multivector e01(pga.signature()), e02(pga.signature());
  e01.set(0b0011, 1.0);
  e02.set(0b0101, 1.0);
  CHECK(mv_geometric_product(pga, e01, e02).coefficients().empty());

  Multivector other(Signature{2, 0, 0});
  CHECK_THROWS_AS(mv_geometric_product(pga, one, other), std::invalid_argument);
}

TEST_CASE("table equals the symbolic word oracle for every signature up to n = 5") {
  for (int n = 0; n <= 5; ++n)
    for (int r = 0; r <= n; ++r)
      for (int q = 0; q + r <= n; ++q) {
        CayleyTable t(Signature{n - q - r, q, r});
        for (Blade a = 0; a < t.blades(); ++a)
          for (Blade b = 0; b < t.blades(); ++b) {
            auto w = multiply_words(word_of(a), word_of(b), t.metric());
            CHECK(t.sign(a, b) == w.sign);
            if (w.sign != 0) CHECK(mask_of(w.word) == CayleyTable::result(a, b));
          }
      }
}

TEST_CASE("XOR and structural-zero laws") {
  for (Signature sig : {Signature{3, 0, 1}, Signature{2, 1, 2}, Signature{0, 3, 1}, Signature{4, 1, 0}}) {
    CayleyTable t(sig);
    for (Blade a = 0; a < t.blades(); ++a)
      for (Blade b = 0; b < t.blades(); ++b) {
        CHECK((t.sign(a, b) == 0) == ((a & b & t.degenerate_mask()) != 0));
        CHECK(grade(CayleyTable::result(a, b)) == grade(a ^ b));
      }
  }
}

TEST_CASE("associativity (property)") {
  auto check = [](const CayleyTable& t, Blade a, Blade b, Blade c) {
    int left = t.sign(a, b) * t.sign(a ^ b, c);
    int right = t.sign(b, c) * t.sign(a, b ^ c);
    CHECK(left == right);
  };
  for (int n = 0; n <= 4; ++n)
    for (int r = 0; r <= n; ++r)
      for (int q = 0; q + r <= n; ++q) {
        CayleyTable t(Signature{n - q - r, q, r});
        for (Blade a = 0; a < t.blades(); ++a)
          for (Blade b = 0; b < t.blades(); ++b)
            for (Blade c = 0; c < t.blades(); ++c) check(t, a, b, c);
      }
  std::mt19937_64 rng(8);
  for (Signature sig : {Signature{5, 2, 1}, Signature{3, 3, 2}, Signature{6, 0, 1}}) {
    CayleyTable t(sig);
    std::uniform_int_distribution<Blade> pick(0, static_cast<Blade>(t.blades() - 1));
    for (int i = 0; i < 20000; ++i) check(t, pick(rng), pick(rng), pick(rng));
  }
}

TEST_CASE("grade inference is sound on random multivectors (property)") {
  std::mt19937_64 rng(21);
  std::vector<CayleyTable> tables;
  for (Signature sig : {Signature{3, 0, 1}, Signature{2, 0, 0}, Signature{1, 1, 1}, Signature{3, 1, 0}})
    tables.emplace_back(sig);
  for (int trial = 0; trial < 1000; ++trial) {
    const CayleyTable& t = tables[trial % tables.size()];
    std::uniform_int_distribution<std::uint32_t> bits(1, (1u << (t.generators() + 1)) - 1);
    GradeSet a = GradeSet::from_bits(bits(rng)), b = GradeSet::from_bits(bits(rng));
    Multivector x = random_mv(rng, t, a), y = random_mv(rng, t, b);
    GradeSet got = mv_geometric_product(t, x, y).grade_set();
    GradeSet inferred = grade_product_set(t, a, b);
    CHECK(got.subset_of(inferred));
    CHECK(inferred.subset_of(grade_geometric(a, b, t.generators())));
  }
}

TEST_CASE("reverse") {
  CayleyTable pga(Signature{3, 0, 1});
  Multivector x(pga.signature());
  for (Blade b = 0; b < 16; ++b) x.set(b, 1.0);
  auto r = reverse(x);
  for (Blade b = 0; b < 16; ++b) CHECK(r[b] == ((grade(b) == 2 || grade(b) == 3) ? -1.0 : 1.0));
}
