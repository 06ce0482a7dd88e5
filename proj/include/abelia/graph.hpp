#pragma once

// Typed computation graphs and their elaboration: dimension constraints,
// grade propagation, value ranges, number formats, escape classes and
// allocation, collected into one report.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "abelia/clifford.hpp"
#include "abelia/dims.hpp"
#include "abelia/interval.hpp"
#include "abelia/unify.hpp"

namespace abelia::graph {

enum class Role { input, intermediate, output, parameter };
enum class OpKind { add, sub, mul, div, pow, neg, sum_reduce, geometric, wedge, grade_project, dot, consume_external };

const char* to_string(Role r);
const char* to_string(OpKind op);
std::size_t arity(OpKind op);

struct Node {
  std::string id;
  Role role = Role::intermediate;
  /// Tensor extents; empty means scalar. Absent on a derived node means "infer".
  std::optional<std::vector<std::int64_t>> shape;
  std::optional<dims::Dimension> dim;
  std::optional<clifford::GradeSet> grades;
  std::optional<Interval> range;
  /// Fixed value of a constant parameter.
  std::optional<double> value;
};

struct Edge {
  OpKind op = OpKind::add;
  int k = 0;  // exponent of pow, grade of grade_project
  std::vector<std::size_t> inputs;
  std::optional<std::size_t> output;  // none only for consume_external
  bool deferred = false;
};

/// Signature of a Clifford graph; an explicit metric overrides p, q, r order.
struct Algebra {
  clifford::Signature signature;
  std::optional<std::vector<int>> metric;

  clifford::CayleyTable table() const;
};

class Graph {
 public:
  explicit Graph(dims::Basis basis = dims::Basis::si()) : ctx_(std::move(basis)) {}

  dims::Context& context() { return ctx_; }
  const dims::Context& context() const { return ctx_; }

  std::vector<Node> nodes;
  std::vector<Edge> edges;
  std::vector<std::size_t> outputs;
  std::optional<Algebra> algebra;

  std::optional<std::size_t> find(std::string_view id) const;
  std::size_t index_of(std::string_view id) const;  // throws std::out_of_range
  /// Edge producing node i, if any.
  std::optional<std::size_t> producer(std::size_t node) const;
  /// Edge indices such that every edge follows the producers of its inputs.
  std::vector<std::size_t> edge_order() const;
  bool is_output(std::size_t node) const;

  /// Checks ids, references, arities, producers and acyclicity.
  void validate() const;

 private:
  dims::Context ctx_;
};

enum class SpecErrorKind { parse, unknown_node, arity, cycle, duplicate_id, invalid };
const char* to_string(SpecErrorKind k);

class SpecError : public std::runtime_error {
 public:
  SpecError(SpecErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  SpecErrorKind kind() const { return kind_; }

 private:
  SpecErrorKind kind_;
};

/// Parses and validates a JSON spec. `default_basis` applies when the spec
/// has no "base_dims". Throws SpecError.
Graph load_spec(std::string_view text, const dims::Basis& default_basis = dims::Basis::si());

/// The dimension term of every node: its declaration, or a fresh variable.
struct DimensionTerms {
  std::vector<dims::Dimension> node;
  std::vector<unify::DimEquation> equations;
};

DimensionTerms generate_constraints(Graph& g);

struct DimSolution {
  unify::Substitution substitution;
  std::vector<dims::Dimension> node_dims;  // substitution applied
  std::vector<unify::UnifyError> errors;
  std::set<dims::VarId> system_vars;
};

/// Generates and solves the constraints, collecting every failing equation.
DimSolution solve_dimensions(Graph& g);

struct GradeError {
  std::string kind;  // grade-structural-zero, grade-mismatch, grade-operand
  std::size_t node;
  std::string message;
};

struct GradeResult {
  std::vector<std::optional<clifford::GradeSet>> grades;
  std::vector<GradeError> errors;
};

GradeResult propagate_grades(const Graph& g, const clifford::CayleyTable& t);

enum class EscapeClass { StackScoped, ClosureCaptured, ReturnEscaping, ByRefEscaping };
const char* to_string(EscapeClass e);
EscapeClass join(EscapeClass a, EscapeClass b);

/// Least fixed point of the escape rules; neg edges alias their input.
std::vector<EscapeClass> classify_escape(const Graph& g);

enum class ReprKind { posit8, posit16, posit32, float16, float32, float64, fixed };
const char* to_string(ReprKind k);

struct Representation {
  ReprKind kind = ReprKind::float64;
  int width_bits = 64;
  double max_magnitude = 0.0;
  double min_positive = 0.0;
  double epsilon_at_1 = 0.0;
  int fixed_integer_bits = 0;
  int fixed_fraction_bits = 0;

  /// "posit16", "float32", "fixed(8,8)".
  std::string name() const;
  /// Worst relative spacing of the format at magnitude x > 0.
  double relative_spacing(double x) const;
  friend bool operator==(const Representation&, const Representation&) = default;
};

Representation format_metadata(ReprKind k);
/// Candidates in selection order.
const std::vector<Representation>& representation_candidates();

class RepresentationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Narrowest candidate covering the range whose spacing at the nonzero
/// endpoints stays within eps_budget. Throws RepresentationError.
Representation select_representation(const Interval& range, double eps_budget);

enum class Allocation { stack, region, caller_region };
const char* to_string(Allocation a);

Allocation plan_allocation(EscapeClass escape, std::uint64_t footprint_bytes, std::uint64_t stack_limit);

struct Config {
  double eps_budget = 1e-6;
  std::uint64_t stack_limit = 65536;
  std::optional<dims::Basis> basis;
  bool json = false;
  bool select_representation = true;
};

struct NodeReport {
  std::string id;
  Role role = Role::intermediate;
  std::vector<std::int64_t> shape;
  std::optional<std::string> dim;
  std::optional<clifford::GradeSet> grades;
  std::optional<Interval> range;
  std::optional<EscapeClass> escape;
  std::optional<Representation> representation;
  std::optional<std::uint64_t> footprint_bytes;
  std::optional<Allocation> allocation;
};

struct EdgeSparsity {
  std::size_t edge = 0;
  std::string output;
  clifford::GradeSet a, b;
  std::size_t nonzero = 0;
  std::size_t total = 0;
};

struct MdlSummary {
  std::size_t free_vars = 0;
  std::string score;  // exact, "1/2"
  std::size_t sparsity_nonzero = 0;
};

struct ReportError {
  std::string kind;
  std::string message;
  std::optional<std::string> residual;
  std::vector<std::string> provenance;
  std::optional<std::string> node;
};

struct ElaborationReport {
  std::optional<clifford::Signature> signature;
  std::map<std::string, std::string> substitution;  // variable name -> dimension
  std::vector<NodeReport> nodes;
  std::vector<EdgeSparsity> sparsity;
  std::optional<MdlSummary> mdl;
  std::vector<ReportError> errors;

  bool accepted() const { return errors.empty(); }
};

ElaborationReport elaborate(Graph& g, const Config& config = {});

/// Newline-terminated JSON; the field order is fixed.
std::string report_to_json(const ElaborationReport& r);
/// Inverse of report_to_json. Throws SpecError(parse) on schema violations.
ElaborationReport report_from_json(std::string_view text);
/// Per-node chain dim -> representation -> footprint -> allocation.
std::string report_to_text(const ElaborationReport& r);

}  // namespace abelia::graph
