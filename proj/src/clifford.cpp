#include "abelia/clifford.hpp"

#include <bit>
#include <cctype>
#include <stdexcept>

#include "abelia/numeric.hpp"

namespace abelia::clifford {

std::vector<int> Signature::metric() const {
  std::vector<int> m;
  m.insert(m.end(), r, 0);
  m.insert(m.end(), p, 1);
  m.insert(m.end(), q, -1);
  return m;
}

std::string Signature::to_string() const {
  return "Cl(" + std::to_string(p) + "," + std::to_string(q) + "," + std::to_string(r) + ")";
}

GradeSet GradeSet::range(int lo, int hi) {
  GradeSet g;
  for (int k = lo; k <= hi; ++k) g.insert(k);
  return g;
}

std::vector<int> GradeSet::members() const {
  std::vector<int> out;
  for (int k = 0; k < 32; ++k)
    if (contains(k)) out.push_back(k);
  return out;
}

std::string GradeSet::to_string() const {
  std::string s = "{";
  for (int k : members()) {
    if (s.size() > 1) s += ',';
    s += std::to_string(k);
  }
  return s + "}";
}

GradeSet parse_grade_set(const std::string& text) {
  GradeSet g;
  std::size_t i = 0;
  auto skip = [&] {
    while (i < text.size() && (std::isspace(static_cast<unsigned char>(text[i])) || text[i] == '{' || text[i] == '}')) ++i;
  };
  skip();
  bool expect_number = true;
  while (i < text.size()) {
    if (expect_number) {
      if (!std::isdigit(static_cast<unsigned char>(text[i]))) throw std::invalid_argument("bad grade set '" + text + "'");
      int k = 0;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
        k = k * 10 + (text[i++] - '0');
        if (k > kMaxGenerators) throw std::invalid_argument("grade out of range in '" + text + "'");
      }
      g.insert(k);
      expect_number = false;
    } else {
      if (text[i] != ',') throw std::invalid_argument("bad grade set '" + text + "'");
      ++i;
      expect_number = true;
    }
    skip();
  }
  if (expect_number && !g.empty()) throw std::invalid_argument("bad grade set '" + text + "'");
  return g;
}

CayleyTable::CayleyTable(Signature sig) : sig_(sig) {
  if (sig.p < 0 || sig.q < 0 || sig.r < 0) throw std::invalid_argument("negative signature count");
  if (sig.n() > kMaxGenerators) throw std::invalid_argument("signature " + sig.to_string() + " exceeds 12 generators");
  metric_ = sig.metric();
  build();
}

CayleyTable::CayleyTable(std::vector<int> metric) : metric_(std::move(metric)) {
  if (metric_.size() > static_cast<std::size_t>(kMaxGenerators)) throw std::invalid_argument("more than 12 generators");
  for (int m : metric_) {
    if (m == 0)
      ++sig_.r;
    else if (m == 1)
      ++sig_.p;
    else if (m == -1)
      ++sig_.q;
    else
      throw std::invalid_argument("generator square must be 0, 1 or -1");
  }
  build();
}

void CayleyTable::build() {
  const std::size_t n = metric_.size(), size = std::size_t{1} << n;
  for (std::size_t i = 0; i < n; ++i)
    if (metric_[i] == 0) degenerate_ |= Blade{1} << i;
  signs_.assign(size * size, 0);
  for (Blade a = 0; a < size; ++a) {
    for (Blade b = 0; b < size; ++b) {
      // transpositions: each factor of b passes every higher factor of a
      int swaps = 0;
      for (Blade rest = b; rest; rest &= rest - 1) swaps += grade(a >> (std::countr_zero(rest) + 1));
      int s = swaps % 2 ? -1 : 1;
      for (Blade shared = a & b; shared; shared &= shared - 1) s *= metric_[std::countr_zero(shared)];
      signs_[(std::size_t{a} << n) | b] = static_cast<std::int8_t>(s);
    }
  }
}

std::string CayleyTable::blade_name(Blade b) const {
  if (b == 0) return "1";
  const int base = sig_.r > 0 ? 0 : 1;
  const bool wide = generators() - 1 + base >= 10;
  std::string s = "e";
  for (int i = 0; i < generators(); ++i) {
    if (!((b >> i) & 1)) continue;
    if (wide && s.size() > 1) s += '_';
    s += std::to_string(i + base);
  }
  return s;
}

std::vector<Blade> CayleyTable::blades_of(GradeSet g) const {
  std::vector<Blade> out;
  for (Blade b = 0; b < blades(); ++b)
    if (g.contains(grade(b))) out.push_back(b);
  return out;
}

CayleyTable build_cayley(Signature sig) { return CayleyTable(sig); }

GradeSet grade_outer(int j, int k, int n) { return j + k <= n ? GradeSet::single(j + k) : GradeSet{}; }

GradeSet grade_geometric(int j, int k, int n) {
  GradeSet g;
  int lo = j > k ? j - k : k - j;
  for (int i = 0; i <= std::min(j, k); ++i)
    if (lo + 2 * i <= n) g.insert(lo + 2 * i);
  return g;
}

GradeSet grade_geometric(GradeSet a, GradeSet b, int n) {
  GradeSet g;
  for (int j : a.members())
    for (int k : b.members()) g = g | grade_geometric(j, k, n);
  return g;
}

GradeSet grade_product_set(const CayleyTable& t, GradeSet a, GradeSet b) {
  GradeSet g;
  auto bs = t.blades_of(b);
  for (Blade x : t.blades_of(a))
    for (Blade y : bs)
      if (t.sign(x, y) != 0) g.insert(grade(x ^ y));
  return g;
}

GradeSet grade_wedge_set(const CayleyTable& t, GradeSet a, GradeSet b) {
  GradeSet g;
  for (int j : a.members())
    for (int k : b.members()) g = g | grade_outer(j, k, t.generators());
  return g;
}

Sparsity sparsity_count(const CayleyTable& t, GradeSet a, GradeSet b) {
  Sparsity s;
  auto as = t.blades_of(a), bs = t.blades_of(b);
  s.total = as.size() * bs.size();
  for (Blade x : as)
    for (Blade y : bs) s.nonzero += t.sign(x, y) != 0;
  return s;
}

double Multivector::operator[](Blade b) const {
  auto it = coeffs_.find(b);
  return it == coeffs_.end() ? 0.0 : it->second;
}

void Multivector::set(Blade b, double v) {
  if (v == 0.0)
    coeffs_.erase(b);
  else
    coeffs_[b] = v;
}

GradeSet Multivector::grade_set() const {
  GradeSet g;
  for (const auto& [b, v] : coeffs_) g.insert(grade(b));
  return g;
}

Multivector mv_geometric_product(const CayleyTable& t, const Multivector& x, const Multivector& y) {
  if (!(x.signature() == t.signature()) || !(y.signature() == t.signature()))
    throw std::invalid_argument("multivector signature does not match the table");
  std::map<Blade, numeric::ExactAccumulator> acc;
  for (const auto& [a, xa] : x.coefficients()) {
    for (const auto& [b, yb] : y.coefficients()) {
      int s = t.sign(a, b);
      if (s != 0) acc[a ^ b].add_product(s * xa, yb);
    }
  }
  Multivector out(t.signature());
  for (const auto& [c, sum] : acc) out.set(c, sum.to_double());
  return out;
}

Multivector reverse(const Multivector& x) {
  Multivector out(x.signature());
  for (const auto& [b, v] : x.coefficients()) {
    int g = grade(b);
    out.set(b, (g * (g - 1) / 2) % 2 ? -v : v);
  }
  return out;
}

}  // namespace abelia::clifford
