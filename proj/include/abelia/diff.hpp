#pragma once

// Forward-mode derivatives over graphs. The tangent graph extends a graph
// with one tangent node per value; it is an ordinary Graph, so it goes
// through the same elaboration as the original.

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "abelia/graph.hpp"

namespace abelia::diff {

class DiffError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TangentGraph {
  graph::Graph base;
  /// base nodes and edges first, then the tangent nodes and the edges computing them
  graph::Graph graph;
  std::string seed;
  std::map<std::string, std::string> tangent_of;
};

/// Seed tangent is 1, every other input and parameter tangent is 0.
/// Throws DiffError unless seed names an input or parameter.
TangentGraph derive_tangent_graph(const graph::Graph& g, std::string_view seed);

/// Elaborates the tangent graph; every error is re-tagged "closure-violation".
graph::ElaborationReport check_closure(const TangentGraph& tg, const graph::Config& config = {});

/// Ids of base nodes whose solved tangent dimension differs from
/// gradient_dimension(dim(y), dim(seed)). Empty when the rule holds.
std::vector<std::string> tangent_dimension_mismatches(const TangentGraph& tg);

/// Row-major values; a scalar is a one-element vector.
using Values = std::map<std::string, std::vector<double>>;

struct EvalTrace {
  std::size_t peak_live_tangent_buffers = 0;
  std::size_t total_nodes_evaluated = 0;
};

struct EvalResult {
  Values primal;   // graph outputs
  Values tangent;  // keyed by output id
  EvalTrace trace;
};

/// One topological pass over dual values. A node's buffers are released
/// after its last consumer runs; outputs stay live. Parameters with a value
/// need no binding. Throws std::invalid_argument for a missing or misshaped
/// input or a Clifford graph, std::domain_error for division by zero.
EvalResult evaluate_forward(const TangentGraph& tg, const Values& inputs);

/// Max over output elements of |fd - t| / max(1, |t|), with fd the central
/// difference along the seed using the step actually representable.
double finite_difference_check(const graph::Graph& g, const Values& inputs, std::string_view seed, double h);

}  // namespace abelia::diff
