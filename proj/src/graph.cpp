#include "abelia/graph.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstdio>
#include <functional>
#include <json.hpp>
#include <queue>
#include <sstream>

#include "abelia/mdl.hpp"

namespace abelia::graph {

using dims::Dimension;
using nlohmann::json;
using nlohmann::ordered_json;

const char* to_string(Role r) {
  switch (r) {
    case Role::input: return "input";
    case Role::intermediate: return "intermediate";
    case Role::output: return "output";
    case Role::parameter: return "parameter";
  }
  return "?";
}

const char* to_string(OpKind op) {
  switch (op) {
    case OpKind::add: return "add";
    case OpKind::sub: return "sub";
    case OpKind::mul: return "mul";
    case OpKind::div: return "div";
    case OpKind::pow: return "pow";
    case OpKind::neg: return "neg";
    case OpKind::sum_reduce: return "sum_reduce";
    case OpKind::geometric: return "geometric";
    case OpKind::wedge: return "wedge";
    case OpKind::grade_project: return "grade_project";
    case OpKind::dot: return "dot";
    case OpKind::consume_external: return "consume_external";
  }
  return "?";
}

std::size_t arity(OpKind op) {
  switch (op) {
    case OpKind::add:
    case OpKind::sub:
    case OpKind::mul:
    case OpKind::div:
    case OpKind::dot:
    case OpKind::geometric:
    case OpKind::wedge: return 2;
    default: return 1;
  }
}

const char* to_string(SpecErrorKind k) {
  switch (k) {
    case SpecErrorKind::parse: return "parse";
    case SpecErrorKind::unknown_node: return "unknown-node";
    case SpecErrorKind::arity: return "arity";
    case SpecErrorKind::cycle: return "cycle";
    case SpecErrorKind::duplicate_id: return "duplicate-id";
    case SpecErrorKind::invalid: return "invalid";
  }
  return "?";
}

namespace {

template <class E>
std::optional<E> parse_enum(std::string_view s, std::initializer_list<E> all) {
  for (E e : all)
    if (s == to_string(e)) return e;
  return std::nullopt;
}

std::optional<Role> parse_role(std::string_view s) {
  return parse_enum(s, {Role::input, Role::intermediate, Role::output, Role::parameter});
}

std::optional<OpKind> parse_op(std::string_view s) {
  return parse_enum(s, {OpKind::add, OpKind::sub, OpKind::mul, OpKind::div, OpKind::pow, OpKind::neg, OpKind::sum_reduce,
                        OpKind::geometric, OpKind::wedge, OpKind::grade_project, OpKind::dot,
                        OpKind::consume_external});
}

[[noreturn]] void fail(SpecErrorKind k, const std::string& msg) { throw SpecError(k, msg); }

}  // namespace

clifford::CayleyTable Algebra::table() const {
  return metric ? clifford::CayleyTable(*metric) : clifford::CayleyTable(signature);
}

std::optional<std::size_t> Graph::find(std::string_view id) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].id == id) return i;
  return std::nullopt;
}

std::size_t Graph::index_of(std::string_view id) const {
  if (auto i = find(id)) return *i;
  throw std::out_of_range("no node '" + std::string(id) + "'");
}

std::optional<std::size_t> Graph::producer(std::size_t node) const {
  for (std::size_t e = 0; e < edges.size(); ++e)
    if (edges[e].output == node) return e;
  return std::nullopt;
}

bool Graph::is_output(std::size_t node) const {
  return nodes[node].role == Role::output || std::find(outputs.begin(), outputs.end(), node) != outputs.end();
}

std::vector<std::size_t> Graph::edge_order() const {
  // Kahn's algorithm over edges, smallest ready index first.
  std::vector<std::optional<std::size_t>> prod(nodes.size());
  for (std::size_t e = 0; e < edges.size(); ++e)
    if (edges[e].output && *edges[e].output < nodes.size()) prod[*edges[e].output] = e;
  std::vector<std::size_t> pending(edges.size(), 0);
  std::vector<std::vector<std::size_t>> consumers(edges.size());
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    for (std::size_t in : edges[e].inputs)
      if (in < nodes.size() && prod[in]) {
        ++pending[e];
        consumers[*prod[in]].push_back(e);
      }
    if (pending[e] == 0) ready.push(e);
  }
  std::vector<std::size_t> order;
  while (!ready.empty()) {
    std::size_t e = ready.top();
    ready.pop();
    order.push_back(e);
    for (std::size_t c : consumers[e])
      if (--pending[c] == 0) ready.push(c);
  }
  if (order.size() != edges.size()) fail(SpecErrorKind::cycle, "cycle detected among edges");
  return order;
}

void Graph::validate() const {
  std::set<std::string_view> ids;
  for (const auto& n : nodes) {
    if (n.id.empty()) fail(SpecErrorKind::invalid, "node with empty id");
    if (!ids.insert(n.id).second) fail(SpecErrorKind::duplicate_id, "duplicate node id '" + n.id + "'");
  }
  int gens = algebra ? algebra->signature.n() : 0;
  if (algebra && gens > clifford::kMaxGenerators) fail(SpecErrorKind::invalid, "signature exceeds 12 generators");
  for (const auto& n : nodes) {
    bool source = n.role == Role::input || n.role == Role::parameter;
    if (source && !n.dim) fail(SpecErrorKind::invalid, "node '" + n.id + "' must declare dim");
    if (source && algebra && !n.grades) fail(SpecErrorKind::invalid, "node '" + n.id + "' must declare grades");
    if (n.grades && algebra && !n.grades->subset_of(clifford::GradeSet::all(gens)))
      fail(SpecErrorKind::invalid, "node '" + n.id + "' declares grades beyond " + std::to_string(gens));
    if (n.grades && n.grades->empty()) fail(SpecErrorKind::invalid, "node '" + n.id + "' declares an empty grade set");
    if (n.shape)
      for (auto d : *n.shape)
        if (d <= 0) fail(SpecErrorKind::invalid, "node '" + n.id + "' has a non-positive extent");
    if (n.range && !(n.range->lo <= n.range->hi)) fail(SpecErrorKind::invalid, "node '" + n.id + "' has lo > hi");
    if (n.value && n.role != Role::parameter) fail(SpecErrorKind::invalid, "only parameters carry a value ('" + n.id + "')");
    if (n.value && n.range && !n.range->contains(*n.value))
      fail(SpecErrorKind::invalid, "value of '" + n.id + "' lies outside its range");
  }
  std::vector<int> produced(nodes.size(), 0);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const Edge& ed = edges[e];
    std::string where = "edge " + std::to_string(e) + " (" + to_string(ed.op) + ")";
    if (ed.inputs.size() != arity(ed.op))
      fail(SpecErrorKind::arity, where + " takes " + std::to_string(arity(ed.op)) + " inputs, got " +
                                     std::to_string(ed.inputs.size()));
    for (std::size_t in : ed.inputs)
      if (in >= nodes.size()) fail(SpecErrorKind::unknown_node, where + " references an unknown node");
    if (ed.op == OpKind::consume_external) {
      if (ed.output) fail(SpecErrorKind::arity, where + " is a sink and has no output");
    } else {
      if (!ed.output) fail(SpecErrorKind::arity, where + " needs an output");
      if (*ed.output >= nodes.size()) fail(SpecErrorKind::unknown_node, where + " references an unknown node");
      const Node& out = nodes[*ed.output];
      if (out.role == Role::input || out.role == Role::parameter)
        fail(SpecErrorKind::invalid, where + " writes to " + to_string(out.role) + " '" + out.id + "'");
      if (++produced[*ed.output] > 1) fail(SpecErrorKind::invalid, "node '" + out.id + "' has more than one producer");
    }
    if (ed.op == OpKind::grade_project && (ed.k < 0 || (algebra && ed.k > gens)))
      fail(SpecErrorKind::invalid, where + " projects onto grade " + std::to_string(ed.k));
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    Role r = nodes[i].role;
    if ((r == Role::intermediate || r == Role::output) && produced[i] == 0)
      fail(SpecErrorKind::invalid, "node '" + nodes[i].id + "' has no producing edge");
  }
  for (std::size_t o : outputs)
    if (o >= nodes.size()) fail(SpecErrorKind::unknown_node, "unknown output");
  edge_order();
}

namespace {

std::size_t lookup(const Graph& g, const json& v, const std::string& where) {
  if (!v.is_string()) fail(SpecErrorKind::parse, where + ": node reference must be a string");
  auto i = g.find(v.get<std::string>());
  if (!i) fail(SpecErrorKind::unknown_node, where + " references unknown node '" + v.get<std::string>() + "'");
  return *i;
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) fail(SpecErrorKind::parse, where + " must be a number");
  double x = v.get<double>();
  if (!std::isfinite(x)) fail(SpecErrorKind::invalid, where + " must be finite");
  return x;
}

int integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) fail(SpecErrorKind::parse, where + " must be an integer");
  auto x = v.get<std::int64_t>();
  if (x < INT32_MIN || x > INT32_MAX) fail(SpecErrorKind::invalid, where + " is out of range");
  return static_cast<int>(x);
}

Node parse_node(const json& j, Graph& g, std::size_t index) {
  std::string where = "node " + std::to_string(index);
  if (!j.is_object()) fail(SpecErrorKind::parse, where + " must be an object");
  if (!j.contains("id") || !j["id"].is_string()) fail(SpecErrorKind::parse, where + " needs a string id");
  Node n;
  n.id = j["id"].get<std::string>();
  where = "node '" + n.id + "'";
  if (!j.contains("role") || !j["role"].is_string()) fail(SpecErrorKind::parse, where + " needs a role");
  auto role = parse_role(j["role"].get<std::string>());
  if (!role) fail(SpecErrorKind::parse, where + " has unknown role '" + j["role"].get<std::string>() + "'");
  n.role = *role;
  if (j.contains("shape")) {
    if (!j["shape"].is_array()) fail(SpecErrorKind::parse, where + ": shape must be an array");
    std::vector<std::int64_t> s;
    for (const auto& d : j["shape"]) {
      if (!d.is_number_integer()) fail(SpecErrorKind::parse, where + ": shape extents must be integers");
      s.push_back(d.get<std::int64_t>());
    }
    n.shape = std::move(s);
  }
  if (j.contains("dim") && !j["dim"].is_null()) {
    if (!j["dim"].is_string()) fail(SpecErrorKind::parse, where + ": dim must be a string");
    try {
      n.dim = dims::parse_dimension(j["dim"].get<std::string>(), g.context());
    } catch (const std::exception& e) {
      fail(SpecErrorKind::parse, where + ": " + e.what());
    }
  }
  if (j.contains("grades") && !j["grades"].is_null()) {
    const auto& gr = j["grades"];
    clifford::GradeSet s;
    if (gr.is_array()) {
      for (const auto& k : gr) {
        int v = integer(k, where + " grade");
        if (v < 0 || v > clifford::kMaxGenerators) fail(SpecErrorKind::invalid, where + " grade out of range");
        s.insert(v);
      }
    } else if (gr.is_string()) {
      try {
        s = clifford::parse_grade_set(gr.get<std::string>());
      } catch (const std::exception& e) {
        fail(SpecErrorKind::parse, where + ": " + e.what());
      }
    } else if (gr.is_number_integer()) {
      s = clifford::GradeSet::single(integer(gr, where + " grade"));
    } else {
      fail(SpecErrorKind::parse, where + ": grades must be a list");
    }
    n.grades = s;
  }
  if (j.contains("range") && !j["range"].is_null()) {
    const auto& r = j["range"];
    if (!r.is_array() || r.size() != 2) fail(SpecErrorKind::parse, where + ": range must be [lo, hi]");
    n.range = Interval{number(r[0], where + " range"), number(r[1], where + " range")};
  }
  if (j.contains("value") && !j["value"].is_null()) {
    n.value = number(j["value"], where + " value");
    if (!n.range) n.range = Interval::point(*n.value);
  }
  return n;
}

Edge parse_edge(const json& j, const Graph& g, std::size_t index) {
  std::string where = "edge " + std::to_string(index);
  if (!j.is_object()) fail(SpecErrorKind::parse, where + " must be an object");
  if (!j.contains("op") || !j["op"].is_string()) fail(SpecErrorKind::parse, where + " needs an op");
  auto op = parse_op(j["op"].get<std::string>());
  if (!op) fail(SpecErrorKind::parse, where + " has unknown op '" + j["op"].get<std::string>() + "'");
  Edge e;
  e.op = *op;
  if (e.op == OpKind::pow || e.op == OpKind::grade_project) {
    if (!j.contains("k")) fail(SpecErrorKind::parse, where + " (" + to_string(e.op) + ") needs k");
    e.k = integer(j["k"], where + " k");
  }
  if (!j.contains("inputs") || !j["inputs"].is_array()) fail(SpecErrorKind::parse, where + " needs an inputs list");
  for (const auto& in : j["inputs"]) e.inputs.push_back(lookup(g, in, where));
  if (j.contains("output") && !j["output"].is_null()) e.output = lookup(g, j["output"], where);
  if (j.contains("deferred")) {
    if (!j["deferred"].is_boolean()) fail(SpecErrorKind::parse, where + ": deferred must be a boolean");
    e.deferred = j["deferred"].get<bool>();
  }
  return e;
}

std::optional<Algebra> parse_signature(const json& j) {
  if (j.is_null()) return std::nullopt;
  if (!j.is_object()) fail(SpecErrorKind::parse, "signature must be an object");
  Algebra a;
  const std::pair<const char*, int*> fields[] = {{"p", &a.signature.p}, {"q", &a.signature.q}, {"r", &a.signature.r}};
  for (auto [key, field] : fields) {
    *field = j.contains(key) ? integer(j[key], std::string("signature ") + key) : 0;
    if (*field < 0) fail(SpecErrorKind::invalid, std::string("signature ") + key + " is negative");
  }
  if (a.signature.n() > clifford::kMaxGenerators) fail(SpecErrorKind::invalid, "signature exceeds 12 generators");
  if (j.contains("metric")) {
    if (!j["metric"].is_array()) fail(SpecErrorKind::parse, "signature metric must be a list");
    std::vector<int> m;
    int counts[3] = {0, 0, 0};  // p, q, r
    for (const auto& x : j["metric"]) {
      int v = integer(x, "metric entry");
      if (v == 1) ++counts[0];
      else if (v == -1) ++counts[1];
      else if (v == 0) ++counts[2];
      else fail(SpecErrorKind::invalid, "metric entries must be 1, -1 or 0");
      m.push_back(v);
    }
    if (counts[0] != a.signature.p || counts[1] != a.signature.q || counts[2] != a.signature.r)
      fail(SpecErrorKind::invalid, "metric disagrees with p, q, r");
    a.metric = std::move(m);
  }
  return a;
}

}  // namespace

Graph load_spec(std::string_view text, const dims::Basis& default_basis) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(SpecErrorKind::parse, e.what());
  }
  if (!j.is_object()) fail(SpecErrorKind::parse, "spec must be a JSON object");
  dims::Basis basis = default_basis;
  if (j.contains("base_dims")) {
    if (!j["base_dims"].is_array()) fail(SpecErrorKind::parse, "base_dims must be a list");
    std::vector<std::string> syms;
    for (const auto& s : j["base_dims"]) {
      if (!s.is_string()) fail(SpecErrorKind::parse, "base_dims entries must be strings");
      syms.push_back(s.get<std::string>());
    }
    try {
      basis = dims::Basis(std::move(syms));
    } catch (const std::exception& e) {
      fail(SpecErrorKind::invalid, e.what());
    }
  }
  Graph g(std::move(basis));
  if (j.contains("signature")) g.algebra = parse_signature(j["signature"]);
  if (!j.contains("nodes") || !j["nodes"].is_array()) fail(SpecErrorKind::parse, "spec needs a nodes list");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < j["nodes"].size(); ++i) {
    Node n = parse_node(j["nodes"][i], g, i);
    if (!ids.insert(n.id).second) fail(SpecErrorKind::duplicate_id, "duplicate node id '" + n.id + "'");
    g.nodes.push_back(std::move(n));
  }
  if (j.contains("edges")) {
    if (!j["edges"].is_array()) fail(SpecErrorKind::parse, "edges must be a list");
    for (std::size_t i = 0; i < j["edges"].size(); ++i) g.edges.push_back(parse_edge(j["edges"][i], g, i));
  }
  if (j.contains("outputs")) {
    if (!j["outputs"].is_array()) fail(SpecErrorKind::parse, "outputs must be a list");
    for (const auto& o : j["outputs"]) g.outputs.push_back(lookup(g, o, "outputs"));
  }
  g.validate();
  return g;
}

// ---------------------------------------------------------------- dimensions

namespace {

std::string describe(const Graph& g, const Edge& e) {
  std::string s = std::string(to_string(e.op));
  if (e.op == OpKind::pow || e.op == OpKind::grade_project) s += "[" + std::to_string(e.k) + "]";
  s += "(";
  for (std::size_t i = 0; i < e.inputs.size(); ++i) s += (i ? ", " : "") + g.nodes[e.inputs[i]].id;
  s += ")";
  if (e.output) s += " -> " + g.nodes[*e.output].id;
  return s;
}

}  // namespace

DimensionTerms generate_constraints(Graph& g) {
  DimensionTerms t;
  for (const auto& n : g.nodes)
    t.node.push_back(n.dim ? *n.dim : Dimension::var(g.context().fresh(n.id)));
  for (std::size_t ei : g.edge_order()) {
    const Edge& e = g.edges[ei];
    if (!e.output) continue;
    std::string prov = describe(g, e);
    const Dimension& out = t.node[*e.output];
    const Dimension& a = t.node[e.inputs[0]];
    switch (e.op) {
      case OpKind::add:
      case OpKind::sub:
        t.equations.push_back({a, t.node[e.inputs[1]], prov});
        t.equations.push_back({out, a, prov});
        break;
      case OpKind::mul:
      case OpKind::geometric:
      case OpKind::wedge:
      case OpKind::dot: t.equations.push_back({out, a * t.node[e.inputs[1]], prov}); break;
      case OpKind::div: t.equations.push_back({out, a / t.node[e.inputs[1]], prov}); break;
      case OpKind::pow: t.equations.push_back({out, a.pow(e.k), prov}); break;
      case OpKind::neg:
      case OpKind::sum_reduce:
      case OpKind::grade_project: t.equations.push_back({out, a, prov}); break;
      case OpKind::consume_external: break;
    }
  }
  return t;
}

DimSolution solve_dimensions(Graph& g) {
  DimensionTerms t = generate_constraints(g);
  DimSolution s;
  s.system_vars = unify::system_variables(t.equations);
  auto sol = unify::solve_system_collect(t.equations, g.context());
  s.substitution = std::move(sol.substitution);
  s.errors = std::move(sol.errors);
  for (const auto& d : t.node) s.node_dims.push_back(unify::apply_substitution(s.substitution, d));
  return s;
}

// -------------------------------------------------------------------- grades

GradeResult propagate_grades(const Graph& g, const clifford::CayleyTable& t) {
  using clifford::GradeSet;
  GradeResult r;
  r.grades.resize(g.nodes.size());
  const int n = t.generators();
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    if (!g.producer(i)) r.grades[i] = g.nodes[i].grades;
  const GradeSet scalar = GradeSet::single(0);
  for (std::size_t ei : g.edge_order()) {
    const Edge& e = g.edges[ei];
    if (!e.output) continue;
    std::size_t out = *e.output;
    auto a = r.grades[e.inputs[0]];
    std::optional<GradeSet> b = e.inputs.size() > 1 ? r.grades[e.inputs[1]] : std::optional<GradeSet>{};
    if (!a || (e.inputs.size() > 1 && !b)) continue;
    auto err = [&](const char* kind, std::string msg) { r.errors.push_back({kind, out, std::move(msg)}); };
    std::string where = describe(g, e);
    std::optional<GradeSet> res;
    switch (e.op) {
      case OpKind::add:
      case OpKind::sub: res = *a | *b; break;
      case OpKind::mul:
        if (*a == scalar) res = *b;
        else if (*b == scalar) res = *a;
        else err("grade-operand", where + ": mul needs a scalar operand; use geometric, wedge or dot");
        break;
      case OpKind::div:
        if (*b == scalar) res = *a;
        else err("grade-operand", where + ": divisor must be scalar, has grades " + b->to_string());
        break;
      case OpKind::pow:
        if (e.k == 0) res = scalar;
        else if (e.k == 1) res = *a;
        else if (*a == scalar) res = scalar;
        else err("grade-operand", where + ": pow needs a scalar operand, has grades " + a->to_string());
        break;
      case OpKind::neg:
      case OpKind::sum_reduce: res = *a; break;
      case OpKind::grade_project:
        res = *a & GradeSet::single(e.k);
        if (res->empty()) {
          err("grade-structural-zero", where + ": grade " + std::to_string(e.k) + " of " + a->to_string() +
                                           " is structurally zero");
          res.reset();
        }
        break;
      case OpKind::geometric:
        res = clifford::grade_product_set(t, *a, *b);
        if (res->empty()) {
          err("grade-structural-zero", where + ": product of " + a->to_string() + " and " + b->to_string() +
                                           " is structurally zero");
          res.reset();
        }
        break;
      case OpKind::wedge: {
        GradeSet u;
        for (int j : a->members())
          for (int k : b->members()) u = u | clifford::grade_outer(j, k, n);
        if (u.empty()) {
          err("grade-structural-zero", where + ": wedge of " + a->to_string() + " and " + b->to_string() +
                                           " exceeds the top grade");
        } else {
          res = u;
        }
        break;
      }
      case OpKind::dot: res = scalar; break;
      case OpKind::consume_external: break;
    }
    if (!res) continue;
    const auto& declared = g.nodes[out].grades;
    if (declared && !res->subset_of(*declared))
      err("grade-mismatch", "node '" + g.nodes[out].id + "' declares grades " + declared->to_string() +
                                " but computes " + res->to_string());
    r.grades[out] = res;
  }
  return r;
}

// -------------------------------------------------------------------- escape

const char* to_string(EscapeClass e) {
  switch (e) {
    case EscapeClass::StackScoped: return "StackScoped";
    case EscapeClass::ClosureCaptured: return "ClosureCaptured";
    case EscapeClass::ReturnEscaping: return "ReturnEscaping";
    case EscapeClass::ByRefEscaping: return "ByRefEscaping";
  }
  return "?";
}

EscapeClass join(EscapeClass a, EscapeClass b) { return std::max(a, b); }

std::vector<EscapeClass> classify_escape(const Graph& g) {
  std::vector<EscapeClass> c(g.nodes.size(), EscapeClass::StackScoped);
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    if (g.is_output(i)) c[i] = EscapeClass::ReturnEscaping;
  for (const Edge& e : g.edges) {
    if (e.op == OpKind::consume_external)
      for (std::size_t in : e.inputs) c[in] = join(c[in], EscapeClass::ByRefEscaping);
    if (e.deferred) {
      for (std::size_t in : e.inputs) c[in] = join(c[in], EscapeClass::ClosureCaptured);
      if (e.output) c[*e.output] = join(c[*e.output], EscapeClass::ClosureCaptured);
    }
  }
  // neg yields a view of its input, so whatever the result escapes to, so does the input
  auto order = g.edge_order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const Edge& e = g.edges[*it];
    if (e.op == OpKind::neg) c[e.inputs[0]] = join(c[e.inputs[0]], c[*e.output]);
  }
  return c;
}

// ------------------------------------------------------------ representation

const char* to_string(ReprKind k) {
  switch (k) {
    case ReprKind::posit8: return "posit8";
    case ReprKind::posit16: return "posit16";
    case ReprKind::posit32: return "posit32";
    case ReprKind::float16: return "float16";
    case ReprKind::float32: return "float32";
    case ReprKind::float64: return "float64";
    case ReprKind::fixed: return "fixed";
  }
  return "?";
}

std::string Representation::name() const {
  if (kind == ReprKind::fixed)
    return "fixed(" + std::to_string(fixed_integer_bits) + "," + std::to_string(fixed_fraction_bits) + ")";
  return to_string(kind);
}

namespace {

bool is_posit(ReprKind k) { return k == ReprKind::posit8 || k == ReprKind::posit16 || k == ReprKind::posit32; }

double posit_spacing(int nbits, double x) {
  // es = 2: value = 16^k * 2^e * (1 + f); the regime k costs |k|+2 bits (k >= 0) or |k|+1 (k < 0)
  int scale = std::ilogb(x);
  int k = scale >= 0 ? scale / 4 : -((-scale + 3) / 4);
  int rl = k >= 0 ? k + 2 : -k + 1;
  rl = std::min(rl, nbits - 1);
  int m = nbits - 1 - rl;
  if (m >= 2) return std::ldexp(1.0, -(m - 2));
  return m == 1 ? 3.0 : 15.0;  // truncated exponent: neighbours differ by 4x or 16x
}

}  // namespace

double Representation::relative_spacing(double x) const {
  x = std::fabs(x);
  if (is_posit(kind)) return posit_spacing(width_bits, x);
  if (kind == ReprKind::fixed) return min_positive / x;
  int p = kind == ReprKind::float16 ? 11 : kind == ReprKind::float32 ? 24 : 53;
  double min_normal = std::ldexp(min_positive, p - 1);
  return x >= min_normal ? epsilon_at_1 : min_positive / x;
}

Representation format_metadata(ReprKind k) {
  Representation r;
  r.kind = k;
  switch (k) {
    case ReprKind::posit8:
    case ReprKind::posit16:
    case ReprKind::posit32: {
      int n = k == ReprKind::posit8 ? 8 : k == ReprKind::posit16 ? 16 : 32;
      r.width_bits = n;
      r.max_magnitude = std::ldexp(1.0, 4 * (n - 2));
      r.min_positive = std::ldexp(1.0, -4 * (n - 2));
      r.epsilon_at_1 = std::ldexp(1.0, -(n - 5));
      break;
    }
    case ReprKind::float16:
      r.width_bits = 16;
      r.max_magnitude = 65504.0;
      r.min_positive = std::ldexp(1.0, -24);
      r.epsilon_at_1 = std::ldexp(1.0, -10);
      break;
    case ReprKind::float32:
      r.width_bits = 32;
      r.max_magnitude = FLT_MAX;
      r.min_positive = std::ldexp(1.0, -149);
      r.epsilon_at_1 = std::ldexp(1.0, -23);
      break;
    case ReprKind::float64:
      r.width_bits = 64;
      r.max_magnitude = DBL_MAX;
      r.min_positive = std::ldexp(1.0, -1074);
      r.epsilon_at_1 = std::ldexp(1.0, -52);
      break;
    case ReprKind::fixed:
      throw std::invalid_argument("fixed-point metadata needs integer and fraction bits");
  }
  return r;
}

const std::vector<Representation>& representation_candidates() {
  static const std::vector<Representation> c = {
      format_metadata(ReprKind::posit8),  format_metadata(ReprKind::posit16), format_metadata(ReprKind::float16),
      format_metadata(ReprKind::posit32), format_metadata(ReprKind::float32), format_metadata(ReprKind::float64)};
  return c;
}

Representation select_representation(const Interval& range, double eps_budget) {
  if (!(eps_budget > 0.0)) throw std::invalid_argument("eps_budget must be positive");
  double mag = range.magnitude();
  auto smallest = range.smallest_nonzero_endpoint();
  for (const auto& r : representation_candidates()) {
    if (!(r.max_magnitude >= mag)) continue;
    if (!smallest) return r;
    if (r.min_positive > *smallest) continue;
    bool ok = true;
    for (double e : {range.lo, range.hi})
      if (e != 0.0 && r.relative_spacing(e) > eps_budget) ok = false;
    if (ok) return r;
  }
  std::ostringstream os;
  os << "no candidate format covers " << range.to_string() << " within relative spacing " << eps_budget;
  throw RepresentationError(os.str());
}

// ---------------------------------------------------------------- allocation

const char* to_string(Allocation a) {
  switch (a) {
    case Allocation::stack: return "stack";
    case Allocation::region: return "region";
    case Allocation::caller_region: return "caller-region";
  }
  return "?";
}

Allocation plan_allocation(EscapeClass escape, std::uint64_t footprint_bytes, std::uint64_t stack_limit) {
  switch (escape) {
    case EscapeClass::StackScoped: return footprint_bytes <= stack_limit ? Allocation::stack : Allocation::region;
    case EscapeClass::ClosureCaptured: return Allocation::region;
    default: return Allocation::caller_region;
  }
}

// ---------------------------------------------------------------- elaborate

namespace {

using Shape = std::vector<std::int64_t>;

std::string shape_text(const Shape& s) {
  std::string t = "[";
  for (std::size_t i = 0; i < s.size(); ++i) t += (i ? "," : "") + std::to_string(s[i]);
  return t + "]";
}

std::optional<std::uint64_t> checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r;
  if (__builtin_mul_overflow(a, b, &r)) return std::nullopt;
  return r;
}

std::optional<std::uint64_t> element_count(const Shape& s) {
  std::uint64_t c = 1;
  for (auto d : s) {
    auto m = checked_mul(c, static_cast<std::uint64_t>(d));
    if (!m) return std::nullopt;
    c = *m;
  }
  return c;
}

struct Elab {
  Graph& g;
  const Config& cfg;
  ElaborationReport rep;
  std::vector<std::optional<Shape>> shapes;
  std::vector<std::optional<clifford::GradeSet>> grades;
  std::vector<std::optional<Interval>> ranges;
  std::optional<clifford::CayleyTable> table;

  void error(std::string kind, std::string message, std::optional<std::size_t> node = {},
             std::vector<std::string> provenance = {}) {
    ReportError e;
    e.kind = std::move(kind);
    e.message = std::move(message);
    e.provenance = std::move(provenance);
    if (node) e.node = g.nodes[*node].id;
    rep.errors.push_back(std::move(e));
  }

  void infer_shapes() {
    shapes.assign(g.nodes.size(), std::nullopt);
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
      if (!g.producer(i)) shapes[i] = g.nodes[i].shape.value_or(Shape{});
    for (std::size_t ei : g.edge_order()) {
      const Edge& e = g.edges[ei];
      if (!e.output) continue;
      const auto& a = shapes[e.inputs[0]];
      std::optional<Shape> b = e.inputs.size() > 1 ? shapes[e.inputs[1]] : std::optional<Shape>{};
      if (!a || (e.inputs.size() > 1 && !b)) continue;
      std::optional<Shape> res;
      switch (e.op) {
        case OpKind::add:
        case OpKind::sub:
        case OpKind::mul:
        case OpKind::div:
        case OpKind::geometric:
        case OpKind::wedge:
          if (*a == *b || b->empty()) res = *a;
          else if (a->empty()) res = *b;
          break;
        case OpKind::dot:
          if (a->empty() && b->empty()) {
            res = Shape{};
          } else if (!a->empty() && !b->empty() && a->back() == b->front()) {
            Shape s(a->begin(), a->end() - 1);
            s.insert(s.end(), b->begin() + 1, b->end());
            res = s;
          }
          break;
        case OpKind::sum_reduce: res = Shape{}; break;
        default: res = *a;
      }
      if (!res) {
        error("shape-mismatch", describe(g, e) + ": incompatible shapes " + shape_text(*a) + " and " + shape_text(*b),
              e.output);
        continue;
      }
      const auto& declared = g.nodes[*e.output].shape;
      if (declared && *declared != *res) {
        error("shape-mismatch", "node '" + g.nodes[*e.output].id + "' declares shape " + shape_text(*declared) +
                                    " but computes " + shape_text(*res),
              e.output);
      }
      shapes[*e.output] = res;
    }
  }

  // Largest number of product terms landing on one output blade, and whether
  // every such term carries sign +1 (so the plain interval product is exact).
  std::pair<std::size_t, bool> term_count(clifford::GradeSet a, clifford::GradeSet b, OpKind op) const {
    std::map<clifford::Blade, std::size_t> per;
    bool positive = true;
    auto ba = table->blades_of(a), bb = table->blades_of(b);
    for (auto x : ba)
      for (auto y : bb) {
        int s = table->sign(x, y);
        if (s == 0) continue;
        if (op == OpKind::wedge && (x & y)) continue;
        if (op == OpKind::dot && (x ^ y)) continue;
        ++per[x ^ y];
        if (s < 0) positive = false;
      }
    std::size_t m = 0;
    for (auto& [_, c] : per) m = std::max(m, c);
    return {m, positive};
  }

  void propagate_ranges() {
    ranges.assign(g.nodes.size(), std::nullopt);
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      if (g.producer(i)) continue;
      ranges[i] = g.nodes[i].range;
      if (!ranges[i] && cfg.select_representation)
        error("range-undetermined", "node '" + g.nodes[i].id + "' needs a range for representation selection", i);
    }
    for (std::size_t ei : g.edge_order()) {
      const Edge& e = g.edges[ei];
      if (!e.output) continue;
      std::size_t out = *e.output;
      const auto& a = ranges[e.inputs[0]];
      std::optional<Interval> b = e.inputs.size() > 1 ? ranges[e.inputs[1]] : std::optional<Interval>{};
      if (!a || (e.inputs.size() > 1 && !b)) continue;
      bool clifford_pair = table && (e.op == OpKind::geometric || e.op == OpKind::wedge || e.op == OpKind::dot);
      std::optional<Interval> res;
      try {
        switch (e.op) {
          case OpKind::add: res = *a + *b; break;
          case OpKind::sub: res = *a - *b; break;
          case OpKind::mul: res = *a * *b; break;
          case OpKind::div: res = *a / *b; break;
          case OpKind::pow: res = pow(*a, e.k); break;
          case OpKind::neg: res = -*a; break;
          case OpKind::grade_project: res = *a; break;
          case OpKind::sum_reduce: {
            auto cnt = shapes[e.inputs[0]] ? element_count(*shapes[e.inputs[0]]) : std::nullopt;
            if (cnt) res = *a * Interval::point(static_cast<double>(*cnt));
            break;
          }
          case OpKind::geometric:
          case OpKind::wedge:
          case OpKind::dot: {
            Interval p = *a * *b;
            double factor = 1.0;
            if (e.op == OpKind::dot && shapes[e.inputs[0]] && !shapes[e.inputs[0]]->empty())
              factor = static_cast<double>(shapes[e.inputs[0]]->back());
            if (clifford_pair) {
              if (!grades[e.inputs[0]] || !grades[e.inputs[1]]) break;
              auto [count, positive] = term_count(*grades[e.inputs[0]], *grades[e.inputs[1]], e.op);
              if (count == 0) {
                p = Interval::point(0.0);
              } else if (count > 1 || !positive) {
                p = Interval::point(static_cast<double>(count)) * hull(p, -p);
              }
            }
            res = factor == 1.0 ? p : Interval::point(factor) * p;
            break;
          }
          case OpKind::consume_external: break;
        }
      } catch (const std::domain_error&) {
        error("range-undetermined", describe(g, e) + ": divisor range " + b->to_string() + " contains zero", out);
        continue;
      }
      if (!res) continue;
      const auto& declared = g.nodes[out].range;
      if (declared && !declared->contains(*res))
        error("range-mismatch", "node '" + g.nodes[out].id + "' declares range " + declared->to_string() +
                                    " but computes " + res->to_string(),
              out);
      ranges[out] = res;
    }
  }
};

}  // namespace

ElaborationReport elaborate(Graph& g, const Config& cfg) {
  Elab el{g, cfg, {}, {}, {}, {}, {}};
  ElaborationReport& rep = el.rep;
  const std::size_t N = g.nodes.size();
  if (g.algebra) {
    rep.signature = g.algebra->signature;
    el.table = g.algebra->table();
  }

  DimSolution dims = solve_dimensions(g);
  for (const auto& e : dims.errors) {
    ReportError re;
    re.kind = unify::to_string(e.kind);
    re.message = e.message(g.context());
    re.residual = dims::format_dimension(e.residual, g.context());
    re.provenance = e.provenance;
    rep.errors.push_back(std::move(re));
  }
  for (auto v : dims.system_vars) {
    const auto& var = g.context().var(v);
    if (var.fresh) continue;
    rep.substitution["'" + var.name] =
        dims::format_dimension(unify::apply_substitution(dims.substitution, Dimension::var(v)), g.context());
  }

  el.infer_shapes();

  std::vector<std::optional<clifford::GradeSet>> grades(N);
  if (el.table) {
    auto gr = propagate_grades(g, *el.table);
    for (const auto& e : gr.errors) el.error(e.kind, e.message, e.node);
    grades = gr.grades;
  }
  el.grades = grades;

  el.propagate_ranges();

  auto escape = classify_escape(g);
  for (std::size_t i = 0; i < N; ++i) {
    NodeReport nr;
    nr.id = g.nodes[i].id;
    nr.role = g.nodes[i].role;
    if (el.shapes[i]) nr.shape = *el.shapes[i];
    nr.dim = dims::format_dimension(dims.node_dims[i], g.context());
    if (el.table) nr.grades = grades[i];
    nr.range = el.ranges[i];
    nr.escape = escape[i];
    if (cfg.select_representation && el.ranges[i]) {
      try {
        nr.representation = select_representation(*el.ranges[i], cfg.eps_budget);
      } catch (const RepresentationError& ex) {
        el.error("representation-inadequate", "node '" + nr.id + "': " + ex.what(), i);
      }
    }
    if (nr.representation && el.shapes[i] && (!el.table || grades[i])) {
      std::optional<std::uint64_t> fp = element_count(*el.shapes[i]);
      if (fp) fp = checked_mul(*fp, static_cast<std::uint64_t>(nr.representation->width_bits / 8));
      if (fp && el.table) fp = checked_mul(*fp, el.table->blades_of(*grades[i]).size());
      if (fp) {
        nr.footprint_bytes = fp;
        nr.allocation = plan_allocation(escape[i], *fp, cfg.stack_limit);
      } else {
        el.error("footprint-overflow", "node '" + nr.id + "': footprint exceeds 2^64 bytes", i);
      }
    }
    rep.nodes.push_back(std::move(nr));
  }

  std::size_t sparsity_nonzero = 0;
  if (el.table) {
    for (std::size_t ei = 0; ei < g.edges.size(); ++ei) {
      const Edge& e = g.edges[ei];
      if (e.op != OpKind::geometric) continue;
      auto a = grades[e.inputs[0]], b = grades[e.inputs[1]];
      if (!a || !b) continue;
      auto s = clifford::sparsity_count(*el.table, *a, *b);
      rep.sparsity.push_back({ei, g.nodes[*e.output].id, *a, *b, s.nonzero, s.total});
      sparsity_nonzero += s.nonzero;
    }
  }

  if (dims.errors.empty()) {
    auto score = mdl::description_length(dims.substitution, dims.system_vars);
    rep.mdl = MdlSummary{score.free_vars, score.score_text(), sparsity_nonzero};
  }
  return rep;
}

// -------------------------------------------------------------------- report

namespace {

ordered_json real(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  return x;
}

double real_from(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    auto s = j.get<std::string>();
    if (s == "inf") return HUGE_VAL;
    if (s == "-inf") return -HUGE_VAL;
    if (s == "nan") return NAN;
  }
  throw SpecError(SpecErrorKind::parse, "expected a number");
}

ordered_json grades_json(clifford::GradeSet g) {
  ordered_json a = ordered_json::array();
  for (int k : g.members()) a.push_back(k);
  return a;
}

clifford::GradeSet grades_from(const json& j) {
  clifford::GradeSet g;
  for (const auto& k : j) g.insert(k.get<int>());
  return g;
}

template <class T>
ordered_json opt(const std::optional<T>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

Representation repr_from_name(const std::string& name) {
  for (const auto& r : representation_candidates())
    if (r.name() == name) return r;
  int i = 0, f = 0;
  if (std::sscanf(name.c_str(), "fixed(%d,%d)", &i, &f) == 2) {
    Representation r;
    r.kind = ReprKind::fixed;
    r.width_bits = i + f;
    r.fixed_integer_bits = i;
    r.fixed_fraction_bits = f;
    r.min_positive = std::ldexp(1.0, -f);
    r.max_magnitude = std::ldexp(1.0, i) - r.min_positive;
    r.epsilon_at_1 = r.min_positive;
    return r;
  }
  throw SpecError(SpecErrorKind::parse, "unknown representation '" + name + "'");
}

}  // namespace

std::string report_to_json(const ElaborationReport& r) {
  ordered_json j;
  j["accepted"] = r.accepted();
  if (r.signature)
    j["signature"] = {{"p", r.signature->p}, {"q", r.signature->q}, {"r", r.signature->r}};
  else
    j["signature"] = nullptr;
  j["substitution"] = ordered_json::object();
  for (const auto& [k, v] : r.substitution) j["substitution"][k] = v;
  j["nodes"] = ordered_json::array();
  for (const auto& n : r.nodes) {
    ordered_json o;
    o["id"] = n.id;
    o["role"] = to_string(n.role);
    o["shape"] = n.shape;
    o["dim"] = opt(n.dim);
    o["grades"] = n.grades ? grades_json(*n.grades) : ordered_json(nullptr);
    o["range"] = n.range ? ordered_json::array({real(n.range->lo), real(n.range->hi)}) : ordered_json(nullptr);
    o["escape"] = n.escape ? ordered_json(to_string(*n.escape)) : ordered_json(nullptr);
    if (n.representation) {
      const auto& p = *n.representation;
      o["representation"] = {{"kind", p.name()},
                             {"width_bits", p.width_bits},
                             {"max_magnitude", real(p.max_magnitude)},
                             {"min_positive", real(p.min_positive)},
                             {"epsilon_at_1", real(p.epsilon_at_1)}};
    } else {
      o["representation"] = nullptr;
    }
    o["footprint_bytes"] = opt(n.footprint_bytes);
    o["allocation"] = n.allocation ? ordered_json(to_string(*n.allocation)) : ordered_json(nullptr);
    j["nodes"].push_back(std::move(o));
  }
  j["sparsity"] = ordered_json::array();
  for (const auto& s : r.sparsity) {
    ordered_json o;
    o["edge"] = s.edge;
    o["output"] = s.output;
    o["a"] = grades_json(s.a);
    o["b"] = grades_json(s.b);
    o["nonzero"] = s.nonzero;
    o["total"] = s.total;
    o["ratio"] = s.total ? static_cast<double>(s.nonzero) / static_cast<double>(s.total) : 0.0;
    j["sparsity"].push_back(std::move(o));
  }
  if (r.mdl)
    j["mdl"] = {{"free_vars", r.mdl->free_vars}, {"score", r.mdl->score}, {"sparsity_nonzero", r.mdl->sparsity_nonzero}};
  else
    j["mdl"] = nullptr;
  j["errors"] = ordered_json::array();
  for (const auto& e : r.errors) {
    ordered_json o;
    o["kind"] = e.kind;
    o["message"] = e.message;
    o["residual"] = opt(e.residual);
    o["provenance"] = e.provenance;
    o["node"] = opt(e.node);
    j["errors"].push_back(std::move(o));
  }
  return j.dump(2) + "\n";
}

ElaborationReport report_from_json(std::string_view text) {
  ElaborationReport r;
  try {
    json j = json::parse(text);
    auto opt_string = [](const json& v) -> std::optional<std::string> {
      if (v.is_null()) return std::nullopt;
      return v.get<std::string>();
    };
    if (!j.at("signature").is_null()) {
      const auto& s = j["signature"];
      r.signature = clifford::Signature{s.at("p").get<int>(), s.at("q").get<int>(), s.at("r").get<int>()};
    }
    for (const auto& [k, v] : j.at("substitution").items()) r.substitution[k] = v.get<std::string>();
    for (const auto& o : j.at("nodes")) {
      NodeReport n;
      n.id = o.at("id").get<std::string>();
      auto role = parse_role(o.at("role").get<std::string>());
      if (!role) throw SpecError(SpecErrorKind::parse, "unknown role");
      n.role = *role;
      n.shape = o.at("shape").get<std::vector<std::int64_t>>();
      n.dim = opt_string(o.at("dim"));
      if (!o.at("grades").is_null()) n.grades = grades_from(o["grades"]);
      if (!o.at("range").is_null()) n.range = Interval{real_from(o["range"].at(0)), real_from(o["range"].at(1))};
      if (!o.at("escape").is_null()) {
        auto e = parse_enum(o["escape"].get<std::string>(), {EscapeClass::StackScoped, EscapeClass::ClosureCaptured,
                                                             EscapeClass::ReturnEscaping, EscapeClass::ByRefEscaping});
        if (!e) throw SpecError(SpecErrorKind::parse, "unknown escape class");
        n.escape = e;
      }
      if (!o.at("representation").is_null()) {
        const auto& p = o["representation"];
        Representation rep = repr_from_name(p.at("kind").get<std::string>());
        if (rep.width_bits != p.at("width_bits").get<int>() || rep.max_magnitude != real_from(p.at("max_magnitude")) ||
            rep.min_positive != real_from(p.at("min_positive")) || rep.epsilon_at_1 != real_from(p.at("epsilon_at_1")))
          throw SpecError(SpecErrorKind::parse, "representation metadata disagrees with its kind");
        n.representation = rep;
      }
      if (!o.at("footprint_bytes").is_null()) n.footprint_bytes = o["footprint_bytes"].get<std::uint64_t>();
      if (!o.at("allocation").is_null()) {
        auto a = parse_enum(o["allocation"].get<std::string>(),
                            {Allocation::stack, Allocation::region, Allocation::caller_region});
        if (!a) throw SpecError(SpecErrorKind::parse, "unknown allocation");
        n.allocation = a;
      }
      r.nodes.push_back(std::move(n));
    }
    for (const auto& o : j.at("sparsity"))
      r.sparsity.push_back({o.at("edge").get<std::size_t>(), o.at("output").get<std::string>(), grades_from(o.at("a")),
                            grades_from(o.at("b")), o.at("nonzero").get<std::size_t>(), o.at("total").get<std::size_t>()});
    if (!j.at("mdl").is_null())
      r.mdl = MdlSummary{j["mdl"].at("free_vars").get<std::size_t>(), j["mdl"].at("score").get<std::string>(),
                         j["mdl"].at("sparsity_nonzero").get<std::size_t>()};
    for (const auto& o : j.at("errors")) {
      ReportError e;
      e.kind = o.at("kind").get<std::string>();
      e.message = o.at("message").get<std::string>();
      e.residual = opt_string(o.at("residual"));
      e.provenance = o.at("provenance").get<std::vector<std::string>>();
      e.node = opt_string(o.at("node"));
      r.errors.push_back(std::move(e));
    }
    if (j.at("accepted").get<bool>() != r.accepted())
      throw SpecError(SpecErrorKind::parse, "'accepted' disagrees with the error list");
  } catch (const json::exception& e) {
    throw SpecError(SpecErrorKind::parse, std::string("report schema: ") + e.what());
  }
  return r;
}

std::string report_to_text(const ElaborationReport& r) {
  std::ostringstream os;
  os << (r.accepted() ? "accepted" : "rejected");
  if (r.signature) os << "  " << r.signature->to_string();
  os << "\n";
  for (const auto& [k, v] : r.substitution) os << "  " << k << " := " << v << "\n";
  for (const auto& n : r.nodes) {
    os << "  " << n.id << " (" << to_string(n.role) << "): " << (n.dim ? *n.dim : std::string("?"));
    if (n.grades) os << " grades " << n.grades->to_string();
    if (!n.shape.empty()) os << " shape " << shape_text(n.shape);
    if (n.range) os << " range " << n.range->to_string();
    os << " -> " << (n.representation ? n.representation->name() : std::string("?"));
    os << " -> " << (n.footprint_bytes ? std::to_string(*n.footprint_bytes) + " B" : std::string("?"));
    os << " -> " << (n.allocation ? to_string(*n.allocation) : "?");
    if (n.escape) os << " [" << to_string(*n.escape) << "]";
    os << "\n";
  }
  for (const auto& s : r.sparsity) {
    char pct[32];
    std::snprintf(pct, sizeof pct, "%.1f%%", s.total ? 100.0 * s.nonzero / s.total : 0.0);
    os << "  sparsity " << s.output << ": " << s.a.to_string() << " x " << s.b.to_string() << " -> " << s.nonzero << "/"
       << s.total << " nonzero (" << pct << ")\n";
  }
  if (r.mdl)
    os << "  mdl: free_vars " << r.mdl->free_vars << ", score " << r.mdl->score << ", sparsity nonzero "
       << r.mdl->sparsity_nonzero << "\n";
  for (const auto& e : r.errors) {
    os << "  error[" << e.kind << "]";
    if (e.node) os << " at " << *e.node;
    os << ": " << e.message;
    for (const auto& p : e.provenance) os << "\n      from " << p;
    os << "\n";
  }
  return os.str();
}

}  // namespace abelia::graph
