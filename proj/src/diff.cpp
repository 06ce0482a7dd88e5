#include "abelia/diff.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>

namespace abelia::diff {

using dims::Dimension;
using graph::Edge;
using graph::Graph;
using graph::Node;
using graph::OpKind;
using graph::Role;

namespace {

class Builder {
 public:
  explicit Builder(Graph& g) : g_(g) {
    for (const auto& n : g_.nodes) ids_.insert(n.id);
  }

  std::string unique(std::string id) {
    while (ids_.contains(id)) id += "_";
    ids_.insert(id);
    return id;
  }

  std::size_t node(Node n) {
    n.id = unique(n.id);
    g_.nodes.push_back(std::move(n));
    return g_.nodes.size() - 1;
  }

  std::size_t temp(const std::string& base) {
    Node n;
    n.id = base;
    return node(std::move(n));
  }

  std::size_t constant(const std::string& base, double value, Dimension d) {
    Node n;
    n.id = base;
    n.role = Role::parameter;
    n.shape = std::vector<std::int64_t>{};
    n.dim = std::move(d);
    n.value = value;
    n.range = Interval::point(value);
    if (g_.algebra) n.grades = clifford::GradeSet::single(0);
    return node(std::move(n));
  }

  void edge(OpKind op, std::vector<std::size_t> in, std::optional<std::size_t> out, bool deferred, int k = 0) {
    Edge e;
    e.op = op;
    e.k = k;
    e.inputs = std::move(in);
    e.output = out;
    e.deferred = deferred;
    g_.edges.push_back(std::move(e));
  }

  std::size_t apply(OpKind op, std::vector<std::size_t> in, const std::string& name, bool deferred, int k = 0) {
    std::size_t t = temp(name);
    edge(op, std::move(in), t, deferred, k);
    return t;
  }

 private:
  Graph& g_;
  std::set<std::string> ids_;
};

}  // namespace

TangentGraph derive_tangent_graph(const Graph& g, std::string_view seed) {
  auto s = g.find(seed);
  if (!s) throw DiffError("seed '" + std::string(seed) + "' is not a node");
  if (g.nodes[*s].role != Role::input && g.nodes[*s].role != Role::parameter)
    throw DiffError("seed '" + std::string(seed) + "' must be an input or parameter");

  TangentGraph tg{g, g, std::string(seed), {}};
  Graph& t = tg.graph;
  // solved dimensions, for constants whose dimension depends on the operand
  auto solved = graph::solve_dimensions(t);
  if (!solved.errors.empty()) throw DiffError("graph is not dimensionally consistent");
  const Dimension seed_dim = *g.nodes[*s].dim;
  const std::size_t base_nodes = g.nodes.size();

  Builder b(t);
  std::vector<std::size_t> d(base_nodes);
  for (std::size_t i = 0; i < base_nodes; ++i) {
    const Node& x = g.nodes[i];
    if (x.role != Role::input && x.role != Role::parameter) continue;
    Node n;
    n.id = "d_" + x.id;
    n.role = Role::input;
    n.shape = x.shape;
    n.dim = *x.dim / seed_dim;
    n.grades = x.grades;
    n.range = Interval::point(i == *s ? 1.0 : 0.0);
    d[i] = b.node(std::move(n));
  }

  for (std::size_t ei : g.edge_order()) {
    const Edge& e = g.edges[ei];
    const bool def = e.deferred;
    const std::size_t u = e.inputs[0];
    if (!e.output) {
      b.edge(e.op, {d[u]}, std::nullopt, def);
      continue;
    }
    const std::size_t y = *e.output;
    Node dy;
    dy.id = "d_" + g.nodes[y].id;
    dy.role = g.nodes[y].role == Role::output ? Role::output : Role::intermediate;
    d[y] = b.node(std::move(dy));
    const std::string tmp = t.nodes[d[y]].id + "_";
    switch (e.op) {
      case OpKind::add:
      case OpKind::sub: b.edge(e.op, {d[u], d[e.inputs[1]]}, d[y], def); break;
      case OpKind::mul:
      case OpKind::geometric:
      case OpKind::wedge:
      case OpKind::dot: {
        std::size_t v = e.inputs[1];
        std::size_t t1 = b.apply(e.op, {d[u], v}, tmp + "l", def);
        std::size_t t2 = b.apply(e.op, {u, d[v]}, tmp + "r", def);
        b.edge(OpKind::add, {t1, t2}, d[y], def);
        break;
      }
      case OpKind::div: {
        std::size_t v = e.inputs[1];
        std::size_t t1 = b.apply(OpKind::mul, {d[u], v}, tmp + "l", def);
        std::size_t t2 = b.apply(OpKind::mul, {u, d[v]}, tmp + "r", def);
        std::size_t num = b.apply(OpKind::sub, {t1, t2}, tmp + "num", def);
        std::size_t den = b.apply(OpKind::pow, {v}, tmp + "den", def, 2);
        b.edge(OpKind::div, {num, den}, d[y], def);
        break;
      }
      case OpKind::pow: {
        if (e.k == 0) {
          std::size_t zero = b.constant(tmp + "zero", 0.0, solved.node_dims[u].inverse());
          b.edge(OpKind::mul, {zero, d[u]}, d[y], def);
        } else {
          std::size_t k = b.constant(tmp + "k", e.k, Dimension{});
          std::size_t p = b.apply(OpKind::pow, {u}, tmp + "pow", def, e.k - 1);
          std::size_t kp = b.apply(OpKind::mul, {k, p}, tmp + "scale", def);
          b.edge(OpKind::mul, {kp, d[u]}, d[y], def);
        }
        break;
      }
      case OpKind::neg:
      case OpKind::sum_reduce: b.edge(e.op, {d[u]}, d[y], def); break;
      case OpKind::grade_project: b.edge(e.op, {d[u]}, d[y], def, e.k); break;
      case OpKind::consume_external: break;
    }
  }
  for (std::size_t o : g.outputs) t.outputs.push_back(d[o]);
  for (std::size_t i = 0; i < base_nodes; ++i) tg.tangent_of[g.nodes[i].id] = t.nodes[d[i]].id;
  t.validate();
  return tg;
}

graph::ElaborationReport check_closure(const TangentGraph& tg, const graph::Config& config) {
  Graph g = tg.graph;
  auto r = graph::elaborate(g, config);
  for (auto& e : r.errors) {
    e.message = e.kind + ": " + e.message;
    e.kind = "closure-violation";
  }
  return r;
}

std::vector<std::string> tangent_dimension_mismatches(const TangentGraph& tg) {
  Graph g = tg.graph;
  auto sol = graph::solve_dimensions(g);
  std::vector<std::string> bad;
  const std::size_t seed = g.index_of(tg.seed);
  for (const auto& [y, dy] : tg.tangent_of) {
    std::size_t iy = g.index_of(y), idy = g.index_of(dy);
    if (sol.node_dims[idy] != dims::gradient_dimension(sol.node_dims[iy], sol.node_dims[seed])) bad.push_back(y);
  }
  if (!sol.errors.empty()) bad.push_back("<unsolved>");
  return bad;
}

// ----------------------------------------------------------------- evaluation

namespace {

using Buf = std::vector<double>;
using Shape = std::vector<std::int64_t>;

struct Dual {
  Buf v, t;
  Shape shape;
};

std::size_t count(const Shape& s) {
  std::size_t c = 1;
  for (auto d : s) c *= static_cast<std::size_t>(d);
  return c;
}

// Elementwise combination with scalar broadcasting.
template <class F>
Buf zip(const Buf& a, const Buf& b, F f) {
  std::size_t n = std::max(a.size(), b.size());
  Buf r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = f(a.size() == 1 ? a[0] : a[i], b.size() == 1 ? b[0] : b[i]);
  return r;
}

template <class F>
Buf map(const Buf& a, F f) {
  Buf r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = f(a[i]);
  return r;
}

Buf contract(const Buf& a, const Shape& sa, const Buf& b, const Shape& sb) {
  if (sa.empty()) return {a[0] * b[0]};
  std::size_t n = static_cast<std::size_t>(sa.back());
  std::size_t rows = a.size() / n, cols = b.size() / n;
  Buf r(rows * cols, 0.0);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < cols; ++j) r[i * cols + j] += a[i * n + k] * b[k * cols + j];
  (void)sb;
  return r;
}

double ipow(double x, int k) {
  if (k < 0) {
    if (x == 0.0) throw std::domain_error("negative power of zero");
    return 1.0 / ipow(x, -k);
  }
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

Shape out_shape(const Edge& e, const std::vector<Dual*>& in) {
  const Shape& a = in[0]->shape;
  switch (e.op) {
    case OpKind::sum_reduce: return {};
    case OpKind::dot: {
      const Shape& b = in[1]->shape;
      if (a.empty()) return {};
      Shape s(a.begin(), a.end() - 1);
      s.insert(s.end(), b.begin() + 1, b.end());
      return s;
    }
    default:
      if (in.size() > 1 && a.empty()) return in[1]->shape;
      return a;
  }
}

Dual step(const Edge& e, const std::vector<Dual*>& in) {
  const Dual& u = *in[0];
  Dual r;
  r.shape = out_shape(e, in);
  auto mul = [](double x, double y) { return x * y; };
  auto add = [](double x, double y) { return x + y; };
  auto sub = [](double x, double y) { return x - y; };
  switch (e.op) {
    case OpKind::add:
      r.v = zip(u.v, in[1]->v, add);
      r.t = zip(u.t, in[1]->t, add);
      break;
    case OpKind::sub:
      r.v = zip(u.v, in[1]->v, sub);
      r.t = zip(u.t, in[1]->t, sub);
      break;
    case OpKind::mul: {
      const Dual& w = *in[1];
      r.v = zip(u.v, w.v, mul);
      r.t = zip(zip(u.t, w.v, mul), zip(u.v, w.t, mul), add);
      break;
    }
    case OpKind::div: {
      const Dual& w = *in[1];
      for (double x : w.v)
        if (x == 0.0) throw std::domain_error("division by zero");
      r.v = zip(u.v, w.v, [](double x, double y) { return x / y; });
      Buf num = zip(zip(u.t, w.v, mul), zip(u.v, w.t, mul), sub);
      r.t = zip(num, map(w.v, [](double x) { return x * x; }), [](double x, double y) { return x / y; });
      break;
    }
    case OpKind::pow: {
      int k = e.k;
      r.v = map(u.v, [k](double x) { return ipow(x, k); });
      Buf slope = map(u.v, [k](double x) { return k == 0 ? 0.0 : k * ipow(x, k - 1); });
      r.t = zip(slope, u.t, mul);
      break;
    }
    case OpKind::neg:
      r.v = map(u.v, [](double x) { return -x; });
      r.t = map(u.t, [](double x) { return -x; });
      break;
    case OpKind::sum_reduce: {
      double sv = 0.0, st = 0.0;
      for (double x : u.v) sv += x;
      for (double x : u.t) st += x;
      r.v = {sv};
      r.t = {st};
      break;
    }
    case OpKind::dot: {
      const Dual& w = *in[1];
      r.v = contract(u.v, u.shape, w.v, w.shape);
      r.t = zip(contract(u.t, u.shape, w.v, w.shape), contract(u.v, u.shape, w.t, w.shape), add);
      break;
    }
    default: throw std::invalid_argument(std::string("cannot evaluate ") + graph::to_string(e.op));
  }
  return r;
}

struct Evaluator {
  const Graph& g;
  std::size_t seed;

  EvalResult run(const Values& inputs) const {
    if (g.algebra) throw std::invalid_argument("evaluation covers graphs without a Clifford signature");
    std::vector<std::optional<Dual>> live(g.nodes.size());
    std::vector<std::size_t> uses(g.nodes.size(), 0);
    for (const auto& e : g.edges)
      for (std::size_t in : std::set<std::size_t>(e.inputs.begin(), e.inputs.end())) ++uses[in];
    EvalResult res;
    std::size_t n_live = 0;
    auto hold = [&](std::size_t i, Dual d) {
      live[i] = std::move(d);
      ++n_live;
      res.trace.peak_live_tangent_buffers = std::max(res.trace.peak_live_tangent_buffers, n_live);
    };
    auto release = [&](std::size_t i) {
      if (live[i] && !g.is_output(i)) {
        live[i].reset();
        --n_live;
      }
    };
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      const Node& n = g.nodes[i];
      if (n.role != Role::input && n.role != Role::parameter) continue;
      Dual d;
      d.shape = n.shape.value_or(Shape{});
      auto it = inputs.find(n.id);
      if (it != inputs.end()) {
        d.v = it->second;
      } else if (n.value) {
        d.v.assign(count(d.shape), *n.value);
      } else {
        throw std::invalid_argument("input '" + n.id + "' is not bound");
      }
      if (d.v.size() != count(d.shape)) throw std::invalid_argument("input '" + n.id + "' has the wrong length");
      d.t.assign(d.v.size(), i == seed ? 1.0 : 0.0);
      hold(i, std::move(d));
      ++res.trace.total_nodes_evaluated;
      if (uses[i] == 0) release(i);
    }
    for (std::size_t ei : g.edge_order()) {
      const Edge& e = g.edges[ei];
      if (e.output) {
        std::vector<Dual*> in;
        for (std::size_t x : e.inputs) in.push_back(&*live[x]);
        hold(*e.output, step(e, in));
        ++res.trace.total_nodes_evaluated;
      }
      for (std::size_t x : std::set<std::size_t>(e.inputs.begin(), e.inputs.end()))
        if (--uses[x] == 0) release(x);
      if (e.output && uses[*e.output] == 0) release(*e.output);
    }
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
      if (g.is_output(i) && live[i]) {
        res.primal[g.nodes[i].id] = live[i]->v;
        res.tangent[g.nodes[i].id] = live[i]->t;
      }
    return res;
  }
};

}  // namespace

EvalResult evaluate_forward(const TangentGraph& tg, const Values& inputs) {
  return Evaluator{tg.base, tg.base.index_of(tg.seed)}.run(inputs);
}

double finite_difference_check(const Graph& g, const Values& inputs, std::string_view seed, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("step must be positive");
  TangentGraph tg = derive_tangent_graph(g, seed);
  EvalResult at = evaluate_forward(tg, inputs);
  const Node& s = g.nodes[g.index_of(seed)];
  Values plus = inputs, minus = inputs;
  Buf x = inputs.contains(s.id) ? inputs.at(s.id) : Buf(count(s.shape.value_or(Shape{})), s.value.value_or(0.0));
  Buf xp = x, xm = x;
  for (auto& v : xp) v += h;
  for (auto& v : xm) v -= h;
  plus[s.id] = xp;
  minus[s.id] = xm;
  EvalResult fp = evaluate_forward(tg, plus), fm = evaluate_forward(tg, minus);
  double worst = 0.0;
  for (const auto& [id, t] : at.tangent) {
    const Buf &p = fp.primal.at(id), &m = fm.primal.at(id);
    for (std::size_t i = 0; i < t.size(); ++i) {
      double step = xp[0] - xm[0];  // the spacing actually used, not 2h
      double fd = (p[i] - m[i]) / step;
      worst = std::max(worst, std::fabs(fd - t[i]) / std::max(1.0, std::fabs(t[i])));
    }
  }
  return worst;
}

}  // namespace abelia::diff
