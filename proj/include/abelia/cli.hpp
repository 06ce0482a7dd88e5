#pragma once

// The abelia command line: check, cayley, sparsity, grad, mdl-verify,
// drift and gate. Exit codes: 0 accepted, 1 rejected, 2 usage or parse error.

#include <iosfwd>
#include <string>
#include <vector>

#include "abelia/graph.hpp"

namespace abelia::cli {

/// Reads a Config JSON file: {"eps_budget", "stack_limit", "base_dims",
/// "format": "human" | "json", "select_representation"}. Throws
/// std::runtime_error.
graph::Config load_config(const std::string& path);

/// `args` excludes the program name. ABELIA_CONFIG, when set, names a
/// Config file; command-line flags override it.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace abelia::cli
