#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "abelia/graph.hpp"
#include "graph_gen.hpp"

using namespace abelia;
using namespace abelia::graph;
using abelia::clifford::GradeSet;

namespace {

std::string slurp(const std::string& name) {
  std::ifstream in(std::string(ABELIA_SPEC_DIR) + "/" + name);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SpecErrorKind load_error(const std::string& text) {
  try {
    load_spec(text);
  } catch (const SpecError& e) {
    return e.kind();
  }
  FAIL("spec loaded");
  return SpecErrorKind::parse;
}

const NodeReport& node(const ElaborationReport& r, const std::string& id) {
  for (const auto& n : r.nodes)
    if (n.id == id) return n;
  throw std::out_of_range(id);
}

// Standard posit with es = 2, decoded bit by bit.
double decode_posit(std::uint32_t bits, int n) {
  if (bits == 0) return 0.0;
  int i = n - 2;
  int first = (bits >> i) & 1, run = 0;
  while (i >= 0 && static_cast<int>((bits >> i) & 1) == first) {
    ++run;
    --i;
  }
  int k = first ? run - 1 : -run;
  --i;  // terminator
  int e = 0;
  for (int j = 0; j < 2; ++j) {
    e <<= 1;
    if (i >= 0) e |= (bits >> i) & 1, --i;
  }
  int fb = i + 1;
  double f = fb > 0 ? static_cast<double>(bits & ((1u << fb) - 1)) / std::ldexp(1.0, fb) : 0.0;
  return std::ldexp(1.0 + f, 4 * k + e);
}

}  // namespace

TEST_CASE("load_spec: minimal add graph") {
  Graph g = load_spec(R"({"nodes":[{"id":"a","role":"input","dim":"m"},{"id":"b","role":"input","dim":"m"},
    {"id":"c","role":"output"}],"edges":[{"op":"add","inputs":["a","b"],"output":"c"}]})");
  CHECK(g.nodes.size() == 3);
  CHECK(g.edges.size() == 1);
}

TEST_CASE("load_spec: F=ma nodes") {
  Graph g = load_spec(slurp("fma.json"));
  std::vector<std::string> ids;
  for (const auto& n : g.nodes) ids.push_back(n.id);
  CHECK(ids == std::vector<std::string>{"F", "m", "a", "ma", "loss"});
}

TEST_CASE("load_spec: errors") {
  CHECK(load_error(slurp("malformed_unknown_node.json")) == SpecErrorKind::unknown_node);
  CHECK(load_error(slurp("malformed_cycle.json")) == SpecErrorKind::cycle);
  CHECK(load_error(slurp("malformed_syntax.json")) == SpecErrorKind::parse);
  CHECK(load_error(R"({"nodes":[{"id":"a","role":"input","dim":"m"},{"id":"a","role":"input","dim":"m"}]})") ==
        SpecErrorKind::duplicate_id);
  CHECK(load_error(R"({"nodes":[{"id":"a","role":"input","dim":"m"},{"id":"b","role":"output"}],
    "edges":[{"op":"add","inputs":["a"],"output":"b"}]})") == SpecErrorKind::arity);
  CHECK(load_error(R"({"nodes":[{"id":"a","role":"input"}]})") == SpecErrorKind::invalid);
  CHECK(load_error(R"({"signature":{"p":2},"nodes":[{"id":"a","role":"input","dim":"m"}]})") ==
        SpecErrorKind::invalid);
  CHECK(load_error(R"({"nodes":[{"id":"a","role":"input","dim":"m"},{"id":"b","role":"output"}],
    "edges":[{"op":"pow","inputs":["a"],"output":"b"}]})") == SpecErrorKind::parse);
  CHECK(load_error(R"({"nodes":[{"id":"a","role":"input","dim":"m"},{"id":"b","role":"intermediate"}]})") ==
        SpecErrorKind::invalid);
  CHECK(load_error(R"({"nodes":[{"id":"a","role":"input","dim":"furlong"}]})") == SpecErrorKind::parse);
  CHECK(load_error(R"({"signature":{"p":13},"nodes":[]})") == SpecErrorKind::invalid);
}

TEST_CASE("generate_constraints") {
  SUBCASE("F=ma") {
    Graph g = load_spec(slurp("fma.json"));
    auto t = generate_constraints(g);
    CHECK(t.equations.size() == 3);
    auto& ctx = g.context();
    auto s = unify::solve_system(t.equations, ctx);
    REQUIRE(std::holds_alternative<unify::Substitution>(s));
    auto sub = std::get<unify::Substitution>(s);
    CHECK(dims::format_dimension(unify::apply_substitution(sub, t.node[3]), ctx) == "kg*m*s^-2");
    CHECK(dims::format_dimension(unify::apply_substitution(sub, t.node[4]), ctx) == "kg*m*s^-2");
  }
  SUBCASE("single neg") {
    Graph g = load_spec(R"({"nodes":[{"id":"a","role":"input","dim":"m"},{"id":"b","role":"output"}],
      "edges":[{"op":"neg","inputs":["a"],"output":"b"}]})");
    CHECK(generate_constraints(g).equations.size() == 1);
  }
  SUBCASE("pow 2") {
    Graph g = load_spec(R"({"nodes":[{"id":"a","role":"input","dim":"m"},{"id":"b","role":"output"}],
      "edges":[{"op":"pow","k":2,"inputs":["a"],"output":"b"}]})");
    auto s = solve_dimensions(g);
    CHECK(dims::format_dimension(s.node_dims[1], g.context()) == "m^2");
  }
}

TEST_CASE("propagate_grades") {
  SUBCASE("bivector product in PGA") {
    Graph g = load_spec(slurp("pga_bivector.json"));
    auto r = propagate_grades(g, g.algebra->table());
    CHECK(r.errors.empty());
    REQUIRE(r.grades[2]);
    CHECK(r.grades[2]->subset_of(GradeSet::from_bits(0b10101)));
    CHECK(!r.grades[2]->contains(1));
    CHECK(!r.grades[2]->contains(3));
  }
  SUBCASE("odd projection is structurally zero") {
    Graph g = load_spec(slurp("pga_project_odd.json"));
    auto r = propagate_grades(g, g.algebra->table());
    REQUIRE(r.errors.size() == 1);
    CHECK(r.errors[0].kind == "grade-structural-zero");
    CHECK(g.nodes[r.errors[0].node].id == "v");
  }
  SUBCASE("scalar chain") {
    Graph g = load_spec(R"({"signature":{"p":2},"nodes":[{"id":"a","role":"input","dim":"m","grades":[0]},
      {"id":"b","role":"intermediate"},{"id":"c","role":"output"}],
      "edges":[{"op":"mul","inputs":["a","a"],"output":"b"},{"op":"pow","k":3,"inputs":["b"],"output":"c"}]})");
    auto r = propagate_grades(g, g.algebra->table());
    CHECK(r.errors.empty());
    for (const auto& s : r.grades) CHECK(*s == GradeSet::single(0));
  }
  SUBCASE("declared output must contain the computed set") {
    Graph g = load_spec(R"({"signature":{"p":3},"nodes":[{"id":"a","role":"input","dim":"m","grades":[1]},
      {"id":"b","role":"output","grades":[2]}],"edges":[{"op":"geometric","inputs":["a","a"],"output":"b"}]})");
    auto r = propagate_grades(g, g.algebra->table());
    REQUIRE(r.errors.size() == 1);
    CHECK(r.errors[0].kind == "grade-mismatch");
  }
  SUBCASE("mul needs a scalar operand") {
    Graph g = load_spec(R"({"signature":{"p":3},"nodes":[{"id":"a","role":"input","dim":"m","grades":[1]},
      {"id":"b","role":"output"}],"edges":[{"op":"mul","inputs":["a","a"],"output":"b"}]})");
    auto r = propagate_grades(g, g.algebra->table());
    REQUIRE(r.errors.size() == 1);
    CHECK(r.errors[0].kind == "grade-operand");
  }
}

TEST_CASE("classify_escape") {
  Graph g = load_spec(slurp("escape.json"));
  auto c = classify_escape(g);
  auto at = [&](const char* id) { return c[g.index_of(id)]; };
  CHECK(at("y") == EscapeClass::ReturnEscaping);
  CHECK(at("h") == EscapeClass::ByRefEscaping);  // output via neg, and an external sink
  CHECK(at("x") == EscapeClass::StackScoped);
  CHECK(at("later") == EscapeClass::ClosureCaptured);
  CHECK(at("big") == EscapeClass::ClosureCaptured);
  CHECK(at("w") == EscapeClass::StackScoped);
  CHECK(join(EscapeClass::ReturnEscaping, EscapeClass::ByRefEscaping) == EscapeClass::ByRefEscaping);
}

TEST_CASE("classify_escape: adding an edge never lowers a class") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    Graph g = testgen::random_scalar_graph(rng);
    auto before = classify_escape(g);
    std::size_t a = rng() % g.nodes.size();
    Edge e;
    switch (rng() % 3) {
      case 0:
        e.op = OpKind::consume_external;
        e.inputs = {a};
        break;
      case 1: {
        e.op = OpKind::neg;
        e.inputs = {a};
        Node n;
        n.id = "extra";
        n.role = Role::output;
        g.nodes.push_back(n);
        e.output = g.nodes.size() - 1;
        break;
      }
      default: {
        e.op = OpKind::neg;
        e.inputs = {a};
        e.deferred = true;
        Node n;
        n.id = "extra";
        g.nodes.push_back(n);
        e.output = g.nodes.size() - 1;
      }
    }
    g.edges.push_back(e);
    g.validate();
    auto after = classify_escape(g);
    for (std::size_t i = 0; i < before.size(); ++i) CHECK(before[i] <= after[i]);
  }
}

TEST_CASE("representation metadata") {
  auto f32 = format_metadata(ReprKind::float32);
  CHECK(f32.epsilon_at_1 == std::ldexp(1.0, -23));
  CHECK(f32.width_bits == 32);
  CHECK(format_metadata(ReprKind::float64).epsilon_at_1 == std::ldexp(1.0, -52));
  CHECK(format_metadata(ReprKind::float16).max_magnitude == 65504.0);
  auto p16 = format_metadata(ReprKind::posit16);
  CHECK(p16.max_magnitude == std::ldexp(1.0, 56));
  CHECK(p16.min_positive == std::ldexp(1.0, -56));
  std::vector<std::string> order;
  for (const auto& r : representation_candidates()) order.push_back(r.name());
  CHECK(order == std::vector<std::string>{"posit8", "posit16", "float16", "posit32", "float32", "float64"});
}

TEST_CASE("posit spacing against bitwise decoding") {
  for (int n : {8, 16}) {
    auto meta = format_metadata(n == 8 ? ReprKind::posit8 : ReprKind::posit16);
    std::vector<double> v;
    for (std::uint32_t b = 1; b < (1u << (n - 1)); ++b) v.push_back(decode_posit(b, n));
    REQUIRE(std::is_sorted(v.begin(), v.end()));
    CHECK(v.front() == meta.min_positive);
    CHECK(v.back() == meta.max_magnitude);
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
      double gap = (v[i + 1] - v[i]) / v[i];
      CHECK(meta.relative_spacing(v[i]) >= gap);
      // at a power of two the bound is attained
      int ex;
      if (std::frexp(v[i], &ex) == 0.5) CHECK(meta.relative_spacing(v[i]) == gap);
    }
  }
}

TEST_CASE("select_representation") {
  CHECK(select_representation({0.5, 2.0}, std::ldexp(1.0, -20)).kind == ReprKind::posit32);
  CHECK(select_representation({0.0, 0.0}, 1e-6).kind == ReprKind::posit8);
  CHECK(select_representation({1e300, 1e305}, 1e-2).kind == ReprKind::float64);
  CHECK(select_representation({0.5, 2.0}, 0.2).kind == ReprKind::posit8);
  CHECK(select_representation({-1.0, 1.0}, 1e-3).kind == ReprKind::posit16);
  CHECK(select_representation({1e-30, 1.0}, 1e-6).kind == ReprKind::float32);
  CHECK_THROWS_AS(select_representation({0.0, HUGE_VAL}, 1e-6), RepresentationError);
  CHECK_THROWS_AS(select_representation({1.0, 2.0}, 1e-20), RepresentationError);
}

TEST_CASE("plan_allocation") {
  CHECK(plan_allocation(EscapeClass::StackScoped, 1024, 65536) == Allocation::stack);
  CHECK(plan_allocation(EscapeClass::StackScoped, 1 << 20, 65536) == Allocation::region);
  CHECK(plan_allocation(EscapeClass::ClosureCaptured, 1, 65536) == Allocation::region);
  CHECK(plan_allocation(EscapeClass::ReturnEscaping, 0, 65536) == Allocation::caller_region);
  CHECK(plan_allocation(EscapeClass::ByRefEscaping, 1 << 30, 65536) == Allocation::caller_region);
}

TEST_CASE("elaborate: golden specs") {
  SUBCASE("F=ma accepted") {
    Graph g = load_spec(slurp("fma.json"));
    auto r = elaborate(g);
    CHECK(r.accepted());
    CHECK(*node(r, "loss").dim == "kg*m*s^-2");
    REQUIRE(r.mdl);
    CHECK(r.mdl->free_vars == 0);
    CHECK(r.mdl->score == "1");
    CHECK(node(r, "loss").allocation == Allocation::caller_region);
    CHECK(node(r, "ma").allocation == Allocation::stack);
  }
  SUBCASE("F=mv rejected") {
    Graph g = load_spec(slurp("fmv.json"));
    auto r = elaborate(g);
    CHECK(!r.accepted());
    REQUIRE(r.errors.size() == 1);
    CHECK(r.errors[0].kind == "inconsistent");
    CHECK(r.errors[0].residual == "s^-1");
  }
  SUBCASE("N/m + J/s rejected") {
    Graph g = load_spec(slurp("grad_accum.json"));
    auto r = elaborate(g);
    CHECK(!r.accepted());
    REQUIRE(r.errors.size() == 1);
    CHECK(r.errors[0].kind == "inconsistent");
  }
  SUBCASE("PGA bivectors") {
    Graph g = load_spec(slurp("pga_bivector.json"));
    auto r = elaborate(g);
    CHECK(r.accepted());
    REQUIRE(r.sparsity.size() == 1);
    auto s = clifford::sparsity_count(g.algebra->table(), GradeSet::single(2), GradeSet::single(2));
    CHECK(r.sparsity[0].nonzero == s.nonzero);
    CHECK(r.sparsity[0].total == 36);
    CHECK(r.mdl->sparsity_nonzero == s.nonzero);
    // 1 scalar + 6 bivectors + 1 pseudoscalar components
    auto& p = node(r, "P");
    CHECK(*p.footprint_bytes == 8 * static_cast<std::uint64_t>(p.representation->width_bits / 8));
  }
  SUBCASE("structural zero rejected") {
    Graph g = load_spec(slurp("pga_project_odd.json"));
    auto r = elaborate(g);
    CHECK(!r.accepted());
  }
  SUBCASE("escape and footprint") {
    Graph g = load_spec(slurp("escape.json"));
    auto r = elaborate(g);
    CHECK(r.accepted());
    CHECK(node(r, "w").allocation == Allocation::region);
    CHECK(*node(r, "w").footprint_bytes == 65536u * node(r, "w").representation->width_bits / 8);
    CHECK(node(r, "later").allocation == Allocation::region);
    CHECK(node(r, "h").allocation == Allocation::caller_region);
    CHECK(node(r, "later").shape.empty());
    CHECK(node(r, "later").range->contains(Interval{-131072.0, 131072.0}));
  }
  SUBCASE("variables") {
    Graph g = load_spec(slurp("variables.json"));
    auto r = elaborate(g);
    CHECK(r.accepted());
    CHECK(r.substitution.at("'b") == "'a*m");
    CHECK(r.mdl->free_vars == 1);
    CHECK(r.mdl->score == "1/2");
  }
  SUBCASE("errors are collected") {
    Graph g = load_spec(R"({"nodes":[{"id":"a","role":"input","dim":"m","range":[-1,1]},
      {"id":"b","role":"input","dim":"s","range":[1,2]},{"id":"c","role":"intermediate"},
      {"id":"d","role":"intermediate"},{"id":"e","role":"output"}],
      "edges":[{"op":"add","inputs":["a","b"],"output":"c"},{"op":"div","inputs":["b","a"],"output":"d"},
      {"op":"sub","inputs":["b","a"],"output":"e"}]})");
    auto r = elaborate(g);
    std::vector<std::string> kinds;
    for (const auto& e : r.errors) kinds.push_back(e.kind);
    CHECK(kinds == std::vector<std::string>{"inconsistent", "inconsistent", "range-undetermined"});
  }
  SUBCASE("missing input range") {
    Graph g = load_spec(R"({"nodes":[{"id":"a","role":"input","dim":"m"},{"id":"b","role":"output"}],
      "edges":[{"op":"neg","inputs":["a"],"output":"b"}]})");
    CHECK(!elaborate(g).accepted());
    Config c;
    c.select_representation = false;
    Graph g2 = load_spec(R"({"nodes":[{"id":"a","role":"input","dim":"m"},{"id":"b","role":"output"}],
      "edges":[{"op":"neg","inputs":["a"],"output":"b"}]})");
    CHECK(elaborate(g2, c).accepted());
  }
}

TEST_CASE("report JSON: deterministic and round-trips") {
  for (const char* name : {"fma.json", "fmv.json", "pga_bivector.json", "escape.json", "variables.json"}) {
    Graph g1 = load_spec(slurp(name)), g2 = load_spec(slurp(name));
    std::string j1 = report_to_json(elaborate(g1)), j2 = report_to_json(elaborate(g2));
    CHECK(j1 == j2);
    CHECK(j1.back() == '\n');
    CHECK(report_to_json(report_from_json(j1)) == j1);
  }
  CHECK_THROWS_AS(report_from_json("{}"), SpecError);
}

TEST_CASE("accepted graphs re-verify under their substitution") {
  std::mt19937_64 rng(5);
  int accepted = 0;
  for (int trial = 0; trial < 300; ++trial) {
    Graph g = testgen::random_scalar_graph(rng);
    auto t = generate_constraints(g);
    auto sol = unify::solve_system_collect(t.equations, g.context());
    REQUIRE(sol.errors.empty());
    for (const auto& eq : t.equations)
      CHECK(unify::apply_substitution(sol.substitution, eq.lhs) == unify::apply_substitution(sol.substitution, eq.rhs));
    accepted += elaborate(g).accepted();
  }
  CHECK(accepted == 300);
}

namespace {

double eval_op(const Edge& e, const std::vector<double>& v) {
  double a = v[e.inputs[0]], b = e.inputs.size() > 1 ? v[e.inputs[1]] : 0.0;
  switch (e.op) {
    case OpKind::add: return a + b;
    case OpKind::sub: return a - b;
    case OpKind::mul:
    case OpKind::dot: return a * b;
    case OpKind::div: return a / b;
    case OpKind::neg: return -a;
    case OpKind::pow: {
      double r = 1.0;
      for (int i = 0; i < std::abs(e.k); ++i) r *= a;
      return e.k < 0 ? 1.0 / r : r;
    }
    default: return a;
  }
}

}  // namespace

TEST_CASE("interval soundness over input corners") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 500; ++trial) {
    Graph g = testgen::random_scalar_graph(rng);
    auto r = elaborate(g);
    REQUIRE(r.accepted());
    std::vector<std::size_t> inputs;
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
      if (g.nodes[i].role == Role::input) inputs.push_back(i);
    auto order = g.edge_order();
    for (std::uint32_t mask = 0; mask < (1u << inputs.size()); ++mask) {
      std::vector<double> v(g.nodes.size());
      for (std::size_t j = 0; j < inputs.size(); ++j) {
        const auto& rg = *g.nodes[inputs[j]].range;
        v[inputs[j]] = (mask >> j) & 1 ? rg.hi : rg.lo;
      }
      for (std::size_t ei : order) v[*g.edges[ei].output] = eval_op(g.edges[ei], v);
      for (std::size_t i = 0; i < g.nodes.size(); ++i) CHECK(r.nodes[i].range->contains(v[i]));
    }
  }
}

TEST_CASE("sparsity stats match sparsity_count on random Clifford graphs") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    clifford::Signature sig{static_cast<int>(rng() % 3) + 1, static_cast<int>(rng() % 2), static_cast<int>(rng() % 2)};
    Graph g = testgen::random_clifford_graph(rng, sig);
    auto r = elaborate(g);
    CHECK(r.accepted());
    auto t = g.algebra->table();
    std::size_t geometric = 0;
    for (const auto& e : g.edges) geometric += e.op == OpKind::geometric;
    CHECK(r.sparsity.size() == geometric);
    for (const auto& s : r.sparsity) {
      const Edge& e = g.edges[s.edge];
      CHECK(s.a == *r.nodes[e.inputs[0]].grades);
      CHECK(s.b == *r.nodes[e.inputs[1]].grades);
      auto c = clifford::sparsity_count(t, s.a, s.b);
      CHECK(s.nonzero == c.nonzero);
      CHECK(s.total == c.total);
    }
  }
}

TEST_CASE("human report carries the chain") {
  Graph g = load_spec(slurp("fma.json"));
  std::string text = report_to_text(elaborate(g));
  CHECK(text.find("accepted") == 0);
  CHECK(text.find("loss (output): kg*m*s^-2 range [-200, 200] -> posit32 -> 4 B -> caller-region") != std::string::npos);
  CHECK(text.find("caller-region") != std::string::npos);
}
