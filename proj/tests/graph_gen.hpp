#pragma once

// Random graph generators shared by the graph, diff and acceptance tests.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "abelia/graph.hpp"

namespace testgen {

using abelia::Interval;
using abelia::dims::Dimension;
using namespace abelia::graph;

struct GenOptions {
  int max_inputs = 4;
  int max_edges = 8;
  bool clifford = false;
  bool allow_sign_change = true;  // sub and neg
  double max_magnitude = 1e6;
};

inline Node input_node(std::string id, Dimension d, Interval r) {
  Node n;
  n.id = std::move(id);
  n.role = Role::input;
  n.shape = std::vector<std::int64_t>{};
  n.dim = d;
  n.range = r;
  return n;
}

inline std::size_t add_edge(Graph& g, OpKind op, std::vector<std::size_t> ins, int k = 0) {
  Node n;
  n.id = "n" + std::to_string(g.nodes.size());
  g.nodes.push_back(n);
  Edge e;
  e.op = op;
  e.k = k;
  e.inputs = std::move(ins);
  e.output = g.nodes.size() - 1;
  g.edges.push_back(e);
  return g.nodes.size() - 1;
}

/// Dimension-consistent scalar graph. Divisors and negative powers only see
/// ranges that exclude zero, so every generated graph elaborates. The last
/// node produced becomes the output.
inline Graph random_scalar_graph(std::mt19937_64& rng, const GenOptions& opt = {}) {
  Graph g;
  auto& ctx = g.context();
  std::uniform_int_distribution<int> nin(1, opt.max_inputs), nedges(1, opt.max_edges), base(0, 2), ex(-2, 2);
  std::uniform_real_distribution<double> u(0.25, 3.0);
  std::vector<Dimension> dims;
  std::vector<Interval> ranges;
  int inputs = nin(rng);
  for (int i = 0; i < inputs; ++i) {
    Dimension d = Dimension::base(static_cast<std::size_t>(base(rng)), ex(rng));
    if (rng() % 3 == 0) d = d * Dimension::var(ctx.variable("v" + std::to_string(rng() % 2)));
    double lo = u(rng), hi = lo + u(rng);
    if (opt.allow_sign_change && rng() % 4 == 0) lo = -lo;
    g.nodes.push_back(input_node("x" + std::to_string(i), d, {lo, hi}));
    dims.push_back(d);
    ranges.push_back({lo, hi});
  }
  int edges = nedges(rng);
  for (int attempt = 0; static_cast<int>(g.edges.size()) < edges && attempt < 200; ++attempt) {
    std::size_t n = g.nodes.size();
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::size_t a = pick(rng), b = pick(rng);
    int which = static_cast<int>(rng() % 8);
    OpKind op;
    int k = 0;
    Interval r;
    Dimension d;
    switch (which) {
      case 0:
      case 1: {
        // add/sub need matching dimensions: pick a partner with dims[a]
        std::vector<std::size_t> same;
        for (std::size_t i = 0; i < n; ++i)
          if (dims[i] == dims[a]) same.push_back(i);
        b = same[rng() % same.size()];
        op = which == 0 || !opt.allow_sign_change ? OpKind::add : OpKind::sub;
        r = op == OpKind::add ? ranges[a] + ranges[b] : ranges[a] - ranges[b];
        d = dims[a];
        break;
      }
      case 2:
      case 3:
        op = OpKind::mul;
        r = ranges[a] * ranges[b];
        d = dims[a] * dims[b];
        break;
      case 4:
        if (ranges[b].contains_zero() || std::min(std::fabs(ranges[b].lo), std::fabs(ranges[b].hi)) < 0.1) continue;
        op = OpKind::div;
        r = ranges[a] / ranges[b];
        d = dims[a] / dims[b];
        break;
      case 5:
        k = static_cast<int>(rng() % 5) - 1;  // -1..3
        if (k < 0 && (ranges[a].contains_zero() || std::min(std::fabs(ranges[a].lo), std::fabs(ranges[a].hi)) < 0.1))
          continue;
        op = OpKind::pow;
        r = pow(ranges[a], k);
        d = dims[a].pow(k);
        break;
      case 6:
        if (!opt.allow_sign_change) continue;
        op = OpKind::neg;
        r = -ranges[a];
        d = dims[a];
        break;
      default:
        op = OpKind::dot;
        r = ranges[a] * ranges[b];
        d = dims[a] * dims[b];
        break;
    }
    if (!(r.magnitude() <= opt.max_magnitude)) continue;
    std::vector<std::size_t> ins = abelia::graph::arity(op) == 2 ? std::vector<std::size_t>{a, b} : std::vector<std::size_t>{a};
    add_edge(g, op, ins, k);
    dims.push_back(d);
    ranges.push_back(r);
  }
  g.nodes.back().role = g.edges.empty() ? Role::input : Role::output;
  if (g.edges.empty()) g.outputs.push_back(g.nodes.size() - 1);
  return g;
}

/// Clifford graph over `sig`: multivector inputs with declared grades,
/// combined by geometric/wedge/dot/add/neg/grade_project and scalar mul.
/// Structurally-zero steps are skipped, so the result elaborates.
inline Graph random_clifford_graph(std::mt19937_64& rng, abelia::clifford::Signature sig, int max_edges = 6) {
  using abelia::clifford::GradeSet;
  Graph g;
  g.algebra = Algebra{sig, std::nullopt};
  auto table = g.algebra->table();
  const int n = sig.n();
  std::uniform_int_distribution<int> grade(0, n), nin(2, 3), b01(0, 1);
  std::vector<GradeSet> grades;
  std::vector<Dimension> dims;
  std::vector<Interval> ranges;
  int inputs = nin(rng);
  for (int i = 0; i < inputs; ++i) {
    GradeSet gs = GradeSet::single(grade(rng));
    if (b01(rng)) gs.insert(grade(rng));
    if (i == 0) gs = GradeSet::single(0);  // a scalar to scale with
    Dimension d = Dimension::base(static_cast<std::size_t>(rng() % 3), 1);
    Node nd = input_node("x" + std::to_string(i), d, {-1.0, 1.0});
    nd.grades = gs;
    g.nodes.push_back(nd);
    grades.push_back(gs);
    dims.push_back(d);
    ranges.push_back({-1.0, 1.0});
  }
  int edges = 1 + static_cast<int>(rng() % max_edges);
  for (int attempt = 0; static_cast<int>(g.edges.size()) < edges && attempt < 200; ++attempt) {
    std::size_t cnt = g.nodes.size();
    std::size_t a = rng() % cnt, b = rng() % cnt;
    int which = static_cast<int>(rng() % 6);
    OpKind op;
    int k = 0;
    GradeSet gs;
    Dimension d;
    switch (which) {
      case 0:
        op = OpKind::geometric;
        gs = abelia::clifford::grade_product_set(table, grades[a], grades[b]);
        d = dims[a] * dims[b];
        break;
      case 1: {
        op = OpKind::wedge;
        for (int j : grades[a].members())
          for (int kk : grades[b].members()) gs = gs | abelia::clifford::grade_outer(j, kk, n);
        d = dims[a] * dims[b];
        break;
      }
      case 2: {
        std::vector<std::size_t> same;
        for (std::size_t i = 0; i < cnt; ++i)
          if (dims[i] == dims[a]) same.push_back(i);
        b = same[rng() % same.size()];
        op = OpKind::add;
        gs = grades[a] | grades[b];
        d = dims[a];
        break;
      }
      case 3:
        op = OpKind::neg;
        gs = grades[a];
        d = dims[a];
        break;
      case 4: {
        auto m = grades[a].members();
        k = m[rng() % m.size()];
        op = OpKind::grade_project;
        gs = GradeSet::single(k);
        d = dims[a];
        break;
      }
      default:
        op = OpKind::mul;
        b = 0;  // the scalar input
        gs = grades[a];
        d = dims[a] * dims[b];
        break;
    }
    if (gs.empty()) continue;
    std::vector<std::size_t> ins = abelia::graph::arity(op) == 2 ? std::vector<std::size_t>{a, b} : std::vector<std::size_t>{a};
    add_edge(g, op, ins, k);
    grades.push_back(gs);
    dims.push_back(d);
    ranges.push_back({});
  }
  g.nodes.back().role = g.edges.empty() ? Role::input : Role::output;
  return g;
}

/// x -> op -> op -> ... of the given depth over dimensionless scalars.
inline Graph chain_graph(int depth) {
  Graph g;
  g.nodes.push_back(input_node("x", Dimension{}, {0.5, 1.5}));
  Node c;
  c.id = "c";
  c.role = Role::parameter;
  c.dim = Dimension{};
  c.value = 0.5;
  c.range = Interval::point(0.5);
  g.nodes.push_back(c);
  std::size_t prev = 0;
  for (int i = 0; i < depth; ++i) {
    switch (i % 3) {
      case 0: prev = add_edge(g, OpKind::mul, {prev, 1}); break;
      case 1: prev = add_edge(g, OpKind::add, {prev, 1}); break;
      default: prev = add_edge(g, OpKind::pow, {prev}, 1); break;
    }
  }
  g.nodes.back().role = Role::output;
  return g;
}

}  // namespace testgen
