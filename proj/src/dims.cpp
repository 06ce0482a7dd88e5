#include "abelia/dims.hpp"

#include <cctype>
#include <charconv>
#include <set>

namespace abelia::dims {
namespace {

Exponent checked_add(Exponent a, Exponent b) {
  Exponent r;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("dimension exponent overflow");
  return r;
}

Exponent checked_mul(Exponent a, Exponent b) {
  Exponent r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("dimension exponent overflow");
  return r;
}

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

bool valid_symbol(std::string_view s) {
  if (s.empty() || !is_ident_start(s.front())) return false;
  for (char c : s)
    if (!is_ident_char(c)) return false;
  return true;
}

template <class Key>
void add_entry(std::map<Key, Exponent>& m, const Key& key, Exponent e) {
  if (e == 0) return;
  auto [it, inserted] = m.try_emplace(key, e);
  if (inserted) return;
  it->second = checked_add(it->second, e);
  if (it->second == 0) m.erase(it);
}

}  // namespace

Basis::Basis(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
  std::set<std::string_view> seen;
  for (const auto& s : symbols_) {
    if (!valid_symbol(s)) throw ParseError("invalid base dimension symbol '" + s + "'");
    if (!seen.insert(s).second) throw ParseError("duplicate base dimension symbol '" + s + "'");
  }
}

Basis Basis::si() { return Basis({"kg", "m", "s", "A", "K", "mol", "cd"}); }

std::optional<std::size_t> Basis::index_of(std::string_view symbol) const {
  for (std::size_t i = 0; i < symbols_.size(); ++i)
    if (symbols_[i] == symbol) return i;
  return std::nullopt;
}

Dimension Dimension::base(std::size_t index, Exponent e) {
  Dimension d;
  d.add_base(index, e);
  return d;
}

Dimension Dimension::var(VarId id, Exponent e) {
  Dimension d;
  d.add_var(id, e);
  return d;
}

Exponent Dimension::base_exponent(std::size_t index) const {
  auto it = base_.find(index);
  return it == base_.end() ? 0 : it->second;
}

Exponent Dimension::var_exponent(VarId id) const {
  auto it = vars_.find(id);
  return it == vars_.end() ? 0 : it->second;
}

void Dimension::add_base(std::size_t index, Exponent e) { add_entry(base_, index, e); }
void Dimension::add_var(VarId id, Exponent e) { add_entry(vars_, id, e); }

Dimension Dimension::inverse() const { return pow(-1); }

Dimension Dimension::pow(Exponent k) const {
  Dimension r;
  if (k == 0) return r;
  for (auto [i, e] : base_) r.base_.emplace(i, checked_mul(e, k));
  for (auto [v, e] : vars_) r.vars_.emplace(v, checked_mul(e, k));
  return r;
}

Dimension operator*(const Dimension& a, const Dimension& b) { return dim_combine(a, b, 1); }
Dimension operator/(const Dimension& a, const Dimension& b) { return dim_combine(a, b, -1); }

Dimension dim_combine(const Dimension& a, const Dimension& b, Exponent k) {
  Dimension r = a;
  for (auto [i, e] : b.base_exponents()) r.add_base(i, checked_mul(e, k));
  for (auto [v, e] : b.var_exponents()) r.add_var(v, checked_mul(e, k));
  return r;
}

Dimension gradient_dimension(const Dimension& d_out, const Dimension& d_in) {
  return dim_combine(d_out, d_in, -1);
}

Context::Context(Basis basis) : basis_(std::move(basis)) {
  struct AliasDef {
    const char* name;
    std::vector<std::pair<const char*, Exponent>> expansion;
  };
  const std::vector<AliasDef> defs = {
      {"N", {{"kg", 1}, {"m", 1}, {"s", -2}}},
      {"J", {{"kg", 1}, {"m", 2}, {"s", -2}}},
      {"Pa", {{"kg", 1}, {"m", -1}, {"s", -2}}},
      {"W", {{"kg", 1}, {"m", 2}, {"s", -3}}},
      {"Hz", {{"s", -1}}},
      {"C", {{"A", 1}, {"s", 1}}},
      {"V", {{"kg", 1}, {"m", 2}, {"s", -3}, {"A", -1}}},
  };
  for (const auto& def : defs) {
    if (basis_.index_of(def.name)) continue;  // a declared base wins over the alias
    Dimension d;
    bool available = true;
    for (auto [sym, e] : def.expansion) {
      auto idx = basis_.index_of(sym);
      if (!idx) {
        available = false;
        break;
      }
      d.add_base(*idx, e);
    }
    if (available) aliases_.emplace(def.name, std::move(d));
  }
}

VarId Context::variable(std::string_view name, std::string_view origin) {
  if (auto it = by_name_.find(name); it != by_name_.end()) return it->second;
  if (!valid_symbol(name)) throw ParseError("invalid variable name '" + std::string(name) + "'");
  VarId id{static_cast<std::uint32_t>(vars_.size())};
  vars_.push_back({id, std::string(name), std::string(origin), false});
  by_name_.emplace(std::string(name), id);
  return id;
}

VarId Context::fresh(std::string_view origin) {
  std::string name;
  do {
    name = "_" + std::to_string(++fresh_counter_);
  } while (by_name_.contains(name));
  VarId id = variable(name, origin);
  vars_[id.value].fresh = true;
  return id;
}

std::optional<VarId> Context::find_variable(std::string_view name) const {
  if (auto it = by_name_.find(name); it != by_name_.end()) return it->second;
  return std::nullopt;
}

namespace {

class DimParser {
 public:
  DimParser(std::string_view text, Context& ctx) : text_(text), ctx_(ctx) {}

  Dimension parse() {
    skip_ws();
    if (pos_ == text_.size()) fail("empty dimension");
    Dimension result = unit();
    for (;;) {
      skip_ws();
      if (pos_ == text_.size()) break;
      char op = text_[pos_];
      if (op != '*' && op != '/') fail("expected '*' or '/'");
      ++pos_;
      Dimension rhs = unit();
      result = dim_combine(result, rhs, op == '*' ? 1 : -1);
    }
    return result;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what + " at offset " + std::to_string(pos_) + " in \"" + std::string(text_) + "\"");
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string_view identifier() {
    std::size_t start = pos_;
    if (pos_ >= text_.size() || !is_ident_start(text_[pos_])) fail("expected a symbol");
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
    return text_.substr(start, pos_ - start);
  }

  Dimension unit() {
    skip_ws();
    if (pos_ >= text_.size()) fail("expected a symbol");
    Dimension d;
    if (text_[pos_] == '\'') {
      ++pos_;
      d = Dimension::var(ctx_.variable(identifier()));
    } else if (text_[pos_] == '1' && (pos_ + 1 == text_.size() || !is_ident_char(text_[pos_ + 1]))) {
      ++pos_;
    } else {
      std::size_t at = pos_;
      std::string_view sym = identifier();
      if (auto idx = ctx_.basis().index_of(sym)) {
        d = Dimension::base(*idx);
      } else if (auto it = ctx_.aliases().find(sym); it != ctx_.aliases().end()) {
        d = it->second;
      } else {
        pos_ = at;
        fail("unknown dimension symbol '" + std::string(sym) + "'");
      }
    }
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '^') {
      ++pos_;
      skip_ws();
      std::size_t start = pos_;
      if (pos_ < text_.size() && text_[pos_] == '-') ++pos_;
      std::size_t digits = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (pos_ == digits) fail("malformed exponent");
      Exponent k = 0;
      auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, k);
      if (ec != std::errc{}) fail("malformed exponent");
      d = d.pow(k);
    }
    return d;
  }

  std::string_view text_;
  Context& ctx_;
  std::size_t pos_ = 0;
};

}  // namespace

Dimension parse_dimension(std::string_view text, Context& ctx) { return DimParser(text, ctx).parse(); }

std::string format_dimension(const Dimension& d, const Context& ctx) {
  if (d.is_identity()) return "1";
  std::string out;
  auto emit = [&out](std::string_view sym, Exponent e) {
    if (!out.empty()) out += '*';
    out += sym;
    if (e != 1) {
      out += '^';
      out += std::to_string(e);
    }
  };
  for (auto [v, e] : d.var_exponents()) emit("'" + ctx.var(v).name, e);
  for (auto [i, e] : d.base_exponents()) emit(ctx.basis().symbol(i), e);
  return out;
}

}  // namespace abelia::dims
