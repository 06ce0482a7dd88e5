#include "abelia/cli.hpp"

#include <CLI11.hpp>
#include <array>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <ostream>
#include <random>
#include <sstream>

#include "abelia/clifford.hpp"
#include "abelia/coherence.hpp"
#include "abelia/diff.hpp"
#include "abelia/mdl.hpp"
#include "abelia/numeric.hpp"

namespace abelia::cli {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr int kAccepted = 0;
constexpr int kRejected = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string blade_list(const clifford::CayleyTable& t) {
  std::string s;
  for (clifford::Blade b = 0; b < t.blades(); ++b) s += (b ? " " : "") + t.blade_name(b);
  return s;
}

ordered_json grades_json(clifford::GradeSet g) {
  ordered_json a = ordered_json::array();
  for (int k : g.members()) a.push_back(k);
  return a;
}

clifford::Signature signature_of(const std::vector<int>& pqr) {
  clifford::Signature s{pqr.at(0), pqr.at(1), pqr.at(2)};
  if (s.p < 0 || s.q < 0 || s.r < 0) throw UsageError("p, q, r must be nonnegative");
  if (s.n() > clifford::kMaxGenerators) throw UsageError("p + q + r must not exceed 12");
  return s;
}

// Random small system for mdl-verify: most are solvable by construction.
std::vector<unify::DimEquation> random_system(std::mt19937_64& rng, const std::vector<dims::VarId>& vars) {
  std::uniform_int_distribution<int> neq(0, static_cast<int>(vars.size())), coef(-3, 3), ground(-2, 2), pct(0, 99);
  bool solvable = pct(rng) < 80;
  std::vector<std::array<int, 2>> planted(vars.size());
  for (auto& p : planted) p = {ground(rng), ground(rng)};
  std::vector<unify::DimEquation> eqs;
  int n = neq(rng);
  for (int e = 0; e < n; ++e) {
    dims::Dimension lhs, rhs;
    std::array<long, 2> r{0, 0};
    for (std::size_t v = 0; v < vars.size(); ++v) {
      int c = coef(rng);
      lhs.add_var(vars[v], c);
      for (int k = 0; k < 2; ++k) r[k] += static_cast<long>(c) * planted[v][k];
    }
    for (int k = 0; k < 2; ++k) rhs.add_base(static_cast<std::size_t>(k), solvable ? r[k] : coef(rng));
    eqs.push_back({lhs, rhs, "eq" + std::to_string(e)});
  }
  return eqs;
}

int do_check(const std::string& path, const graph::Config& cfg, std::ostream& out) {
  graph::Graph g = [&] {
    try {
      return graph::load_spec(read_file(path), cfg.basis.value_or(dims::Basis::si()));
    } catch (const graph::SpecError& e) {
      throw UsageError(std::string("spec error [") + graph::to_string(e.kind()) + "]: " + e.what());
    }
  }();
  auto t0 = std::chrono::steady_clock::now();
  auto report = graph::elaborate(g, cfg);
  double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  if (cfg.json) {
    out << graph::report_to_json(report);
  } else {
    out << graph::report_to_text(report);
    char buf[64];
    std::snprintf(buf, sizeof buf, "  elaborated in %.3f ms\n", ms);
    out << buf;
  }
  return report.accepted() ? kAccepted : kRejected;
}

int do_cayley(const std::vector<int>& pqr, bool as_json, std::ostream& out) {
  clifford::CayleyTable t(signature_of(pqr));
  if (as_json) {
    ordered_json j;
    j["signature"] = {{"p", pqr[0]}, {"q", pqr[1]}, {"r", pqr[2]}};
    j["blades"] = ordered_json::array();
    for (clifford::Blade b = 0; b < t.blades(); ++b) j["blades"].push_back(t.blade_name(b));
    j["rows"] = ordered_json::array();
    for (clifford::Blade a = 0; a < t.blades(); ++a)
      for (clifford::Blade b = 0; b < t.blades(); ++b)
        j["rows"].push_back(
            {{"a", t.blade_name(a)}, {"b", t.blade_name(b)}, {"sign", t.sign(a, b)}, {"result", t.blade_name(a ^ b)}});
    out << j.dump(2) << "\n";
    return kAccepted;
  }
  out << "# " << t.signature().to_string() << ": " << t.blades() << " blades, " << t.blades() * t.blades()
      << " entries\n# blades: " << blade_list(t) << "\n";
  for (clifford::Blade a = 0; a < t.blades(); ++a)
    for (clifford::Blade b = 0; b < t.blades(); ++b) {
      int s = t.sign(a, b);
      out << t.blade_name(a) << " * " << t.blade_name(b) << " = "
          << (s == 0 ? std::string("0") : (s < 0 ? "-" : "+") + t.blade_name(a ^ b)) << "\n";
    }
  return kAccepted;
}

int do_sparsity(const std::vector<int>& pqr, const std::vector<std::string>& grades, bool as_json, std::ostream& out) {
  clifford::CayleyTable t(signature_of(pqr));
  clifford::GradeSet a, b;
  try {
    a = clifford::parse_grade_set(grades.at(0));
    b = clifford::parse_grade_set(grades.at(1));
  } catch (const std::exception& e) {
    throw UsageError(std::string("bad grade set: ") + e.what());
  }
  auto all = clifford::GradeSet::all(t.generators());
  if (!a.subset_of(all) || !b.subset_of(all)) throw UsageError("grades exceed the algebra");
  auto s = clifford::sparsity_count(t, a, b);
  auto prod = clifford::grade_product_set(t, a, b);
  double ratio = s.total ? static_cast<double>(s.nonzero) / static_cast<double>(s.total) : 0.0;
  if (as_json) {
    ordered_json j;
    j["signature"] = {{"p", pqr[0]}, {"q", pqr[1]}, {"r", pqr[2]}};
    j["a"] = grades_json(a);
    j["b"] = grades_json(b);
    j["nonzero"] = s.nonzero;
    j["total"] = s.total;
    j["ratio"] = ratio;
    j["product_grades"] = grades_json(prod);
    out << j.dump(2) << "\n";
    return kAccepted;
  }
  char pct[32];
  std::snprintf(pct, sizeof pct, "%.2f%%", 100.0 * ratio);
  out << t.signature().to_string() << " " << a.to_string() << " x " << b.to_string() << ": nonzero " << s.nonzero
      << " of " << s.total << " (" << pct << ")\n"
      << "product grades " << prod.to_string() << "\n";
  return kAccepted;
}

diff::Values parse_inputs(const std::string& text) {
  std::string src = std::filesystem::exists(text) ? read_file(text) : text;
  json j;
  try {
    j = json::parse(src);
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("inputs: ") + e.what());
  }
  if (!j.is_object()) throw UsageError("inputs must be a JSON object of id -> number or list");
  diff::Values v;
  for (const auto& [k, x] : j.items()) {
    if (x.is_number()) {
      v[k] = {x.get<double>()};
    } else if (x.is_array()) {
      for (const auto& e : x) {
        if (!e.is_number()) throw UsageError("inputs: '" + k + "' has a non-numeric entry");
        v[k].push_back(e.get<double>());
      }
    } else {
      throw UsageError("inputs: '" + k + "' must be a number or a list");
    }
  }
  return v;
}

ordered_json numbers(const std::vector<double>& v) {
  if (v.size() == 1) return v[0];
  return v;
}

int do_grad(const std::string& path, const std::string& seed, const std::string& inputs, const graph::Config& cfg,
            std::ostream& out, std::ostream& err) {
  graph::Graph g = [&] {
    try {
      return graph::load_spec(read_file(path), cfg.basis.value_or(dims::Basis::si()));
    } catch (const graph::SpecError& e) {
      throw UsageError(std::string("spec error [") + graph::to_string(e.kind()) + "]: " + e.what());
    }
  }();
  graph::Graph base = g;
  auto report = graph::elaborate(base, cfg);
  if (!report.accepted()) {
    err << graph::report_to_text(report);
    return kRejected;
  }
  diff::Values values = parse_inputs(inputs);
  diff::TangentGraph tg;
  try {
    tg = diff::derive_tangent_graph(g, seed);
  } catch (const diff::DiffError& e) {
    throw UsageError(e.what());
  }
  auto closure = diff::check_closure(tg, cfg);
  diff::EvalResult r;
  try {
    r = diff::evaluate_forward(tg, values);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("evaluation: ") + e.what());
  } catch (const std::domain_error& e) {
    err << "evaluation: " << e.what() << "\n";
    return kRejected;
  }
  std::map<std::string, std::string> dim_of;
  for (const auto& n : closure.nodes)
    if (n.dim) dim_of[n.id] = *n.dim;
  if (cfg.json) {
    ordered_json j;
    j["seed"] = seed;
    j["closure_accepted"] = closure.accepted();
    j["outputs"] = ordered_json::array();
    for (const auto& [id, v] : r.primal) {
      const std::string& tid = tg.tangent_of.at(id);
      j["outputs"].push_back({{"id", id},
                              {"primal", numbers(v)},
                              {"tangent", numbers(r.tangent.at(id))},
                              {"dim", dim_of[id]},
                              {"tangent_dim", dim_of[tid]}});
    }
    j["trace"] = {{"peak_live_tangent_buffers", r.trace.peak_live_tangent_buffers},
                  {"total_nodes_evaluated", r.trace.total_nodes_evaluated}};
    j["errors"] = ordered_json::array();
    for (const auto& e : closure.errors) j["errors"].push_back({{"kind", e.kind}, {"message", e.message}});
    out << j.dump(2) << "\n";
  } else {
    out << "seed " << seed << "\n";
    for (const auto& [id, v] : r.primal) {
      const std::string& tid = tg.tangent_of.at(id);
      out << "  " << id << " = " << numbers(v).dump() << " [" << dim_of[id] << "]  d" << id << "/d" << seed << " = "
          << numbers(r.tangent.at(id)).dump() << " [" << dim_of[tid] << "]\n";
    }
    out << "  peak live tangent buffers " << r.trace.peak_live_tangent_buffers << ", nodes evaluated "
        << r.trace.total_nodes_evaluated << "\n";
    out << "  tangent graph " << (closure.accepted() ? "accepted" : "rejected") << "\n";
    for (const auto& e : closure.errors) out << "  error[" << e.kind << "]: " << e.message << "\n";
  }
  return closure.accepted() ? kAccepted : kRejected;
}

int do_mdl_verify(int trials, int nvars, int bound, std::uint64_t seed, bool as_json, std::ostream& out) {
  if (trials < 0) throw UsageError("--trials must be nonnegative");
  if (nvars < 1 || nvars > 4) throw UsageError("--vars must be between 1 and 4");
  if (bound < 0 || bound > 6) throw UsageError("--bound must be between 0 and 6");
  std::mt19937_64 rng(seed);
  std::size_t agree = 0, disagree = 0, no_solution = 0, deficit = 0;
  for (int t = 0; t < trials; ++t) {
    dims::Context ctx;
    std::vector<dims::VarId> vars;
    for (int v = 0; v < nvars; ++v) vars.push_back(ctx.variable(std::string(1, static_cast<char>('a' + v))));
    auto eqs = random_system(rng, vars);
    auto a = mdl::map_agreement(eqs, vars, bound, ctx);
    switch (a.outcome) {
      case mdl::Agreement::Outcome::agree: ++agree; break;
      case mdl::Agreement::Outcome::disagree: ++disagree; break;
      case mdl::Agreement::Outcome::skipped:
        (a.skip == mdl::Agreement::Skip::box_deficit ? deficit : no_solution)++;
        break;
    }
  }
  if (as_json) {
    ordered_json j{{"trials", trials},           {"vars", nvars},    {"bound", bound},
                   {"agree", agree},             {"disagree", disagree},
                   {"skipped_no_solution_in_box", no_solution}, {"skipped_box_deficit", deficit}};
    out << j.dump(2) << "\n";
  } else {
    out << "trials " << trials << " (vars " << nvars << ", bound " << bound << "): agree " << agree << ", disagree "
        << disagree << ", skipped " << no_solution + deficit << " (no solution in box " << no_solution
        << ", box deficit " << deficit << ")\n";
  }
  return disagree == 0 ? kAccepted : kRejected;
}

int do_drift(int steps, const std::string& format, const std::vector<int>& pqr, std::uint64_t seed, bool integer,
             bool as_json, std::ostream& out) {
  if (steps < 0) throw UsageError("--steps must be nonnegative");
  numeric::DriftOptions opt;
  try {
    opt.format = numeric::parse_format(format);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  opt.seed = seed;
  opt.integer_coefficients = integer;
  clifford::CayleyTable t(signature_of(pqr));
  numeric::DriftResult r;
  try {
    r = numeric::drift_probe(t, steps, opt);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (as_json) {
    ordered_json j{{"signature", t.signature().to_string()}, {"format", numeric::to_string(opt.format)},
                   {"steps", r.steps},
                   {"structural_zero", grades_json(r.structural_zero)},
                   {"exact_max", r.exact_max},
                   {"naive_max", r.naive_max}};
    out << j.dump(2) << "\n";
  } else {
    out << t.signature().to_string() << " w*reverse(w), " << r.steps << " steps, " << numeric::to_string(opt.format)
        << "\n  structural-zero grades " << r.structural_zero.to_string() << "\n  exact max " << r.exact_max
        << "\n  naive max " << r.naive_max << "\n";
  }
  return kAccepted;
}

int do_gate(const std::string& before, const std::string& after, const std::string& domain, bool as_json,
            std::ostream& out) {
  auto load = [](const std::string& p) {
    try {
      return coherence::parse_distribution(read_file(p));
    } catch (const std::invalid_argument& e) {
      throw UsageError(p + ": " + e.what());
    }
  };
  coherence::Distribution b = load(before), a = load(after), d = load(domain);
  coherence::GateResult r = [&] {
    try {
      return coherence::accept_consultation(b, a, d);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }();
  if (as_json) {
    ordered_json j{{"change", r.change.to_string()},
                   {"disagreement", r.disagreement.to_string()},
                   {"decision", coherence::to_string(r.decision)}};
    out << j.dump(2) << "\n";
  } else {
    out << "KL(after || before) = " << r.change.to_string() << "\nKL(before || domain) = " << r.disagreement.to_string()
        << "\n" << coherence::to_string(r.decision) << "\n";
  }
  return r.decision == coherence::Decision::accept ? kAccepted : kRejected;
}

}  // namespace

graph::Config load_config(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw std::runtime_error("config '" + path + "': " + e.what());
  } catch (const UsageError& e) {
    throw std::runtime_error(e.what());
  }
  if (!j.is_object()) throw std::runtime_error("config '" + path + "' must be a JSON object");
  graph::Config c;
  try {
    if (j.contains("eps_budget")) c.eps_budget = j["eps_budget"].get<double>();
    if (j.contains("stack_limit")) c.stack_limit = j["stack_limit"].get<std::uint64_t>();
    if (j.contains("base_dims")) c.basis = dims::Basis(j["base_dims"].get<std::vector<std::string>>());
    if (j.contains("format")) {
      auto f = j["format"].get<std::string>();
      if (f != "human" && f != "json") throw std::runtime_error("format must be human or json");
      c.json = f == "json";
    }
    if (j.contains("select_representation")) c.select_representation = j["select_representation"].get<bool>();
  } catch (const json::exception& e) {
    throw std::runtime_error("config '" + path + "': " + e.what());
  } catch (const dims::ParseError& e) {
    throw std::runtime_error("config '" + path + "': " + e.what());
  }
  if (!(c.eps_budget > 0.0)) throw std::runtime_error("config: eps_budget must be positive");
  if (c.stack_limit == 0) throw std::runtime_error("config: stack_limit must be positive");
  return c;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Design-time checker for dimensions, grades and number formats", "abelia"};
  app.require_subcommand(1);

  bool as_json = false;
  double eps = 0.0;
  std::uint64_t stack_limit = 0;
  std::string config_path;
  auto common = [&](CLI::App* sub) {
    sub->add_flag("--json", as_json, "JSON output");
  };

  std::string spec;
  auto* check = app.add_subcommand("check", "Elaborate a graph spec and print its report");
  check->add_option("spec", spec, "Spec file (JSON)")->required();
  auto* eps_opt = check->add_option("--eps", eps, "Relative spacing budget for format selection");
  auto* stack_opt = check->add_option("--stack-limit", stack_limit, "Stack limit in bytes");
  check->add_option("--config", config_path, "Config file; overrides ABELIA_CONFIG");
  common(check);

  std::vector<int> pqr;
  auto* cayley = app.add_subcommand("cayley", "Print the Cayley table of Cl(p,q,r)");
  cayley->add_option("signature", pqr, "Signature")->required()->expected(3);
  common(cayley);

  std::vector<int> pqr2;
  std::vector<std::string> grades;
  auto* sparsity = app.add_subcommand("sparsity", "Count nonzero products between two grade sets");
  sparsity->add_option("signature", pqr2, "Signature")->required()->expected(3);
  sparsity->add_option("--grades", grades, "Grade sets A and B, e.g. 2 0,2")->required()->expected(2);
  common(sparsity);

  std::string grad_spec, seed_id, inputs;
  auto* grad = app.add_subcommand("grad", "Forward-mode derivative of a spec along one input");
  grad->add_option("spec", grad_spec, "Spec file (JSON)")->required();
  grad->add_option("--seed", seed_id, "Input or parameter to differentiate by")->required();
  grad->add_option("--inputs", inputs, "Input values as JSON text or a JSON file")->required();
  grad->add_option("--config", config_path, "Config file; overrides ABELIA_CONFIG");
  common(grad);

  int trials = 50, nvars = 3, bound = 3;
  std::uint64_t rng_seed = 1;
  auto* mdlv = app.add_subcommand("mdl-verify", "Compare unifier free-variable counts with brute force");
  mdlv->add_option("--trials", trials, "Number of random systems");
  mdlv->add_option("--vars", nvars, "Variables per system (1..4)");
  mdlv->add_option("--bound", bound, "Exponent box bound (0..6)");
  mdlv->add_option("--seed", rng_seed, "Random seed");
  common(mdlv);

  int steps = 10000;
  std::string format = "f32";
  std::vector<int> drift_sig{3, 0, 1};
  bool integer = false;
  auto* drift = app.add_subcommand("drift", "Structural-zero drift, exact versus per-step rounding");
  drift->add_option("--steps", steps, "Iterations");
  drift->add_option("--format", format, "f32 or f64");
  drift->add_option("--signature", drift_sig, "p q r")->expected(3);
  drift->add_option("--seed", rng_seed, "Random seed");
  drift->add_flag("--integer", integer, "Small integer coefficients");
  common(drift);

  std::string before, after, domain;
  auto* gate = app.add_subcommand("gate", "Decide whether a consultation may be integrated");
  gate->add_option("--before", before, "Distribution before")->required();
  gate->add_option("--after", after, "Distribution after")->required();
  gate->add_option("--domain", domain, "Domain response distribution")->required();
  common(gate);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kAccepted;
  } catch (const CLI::ParseError& e) {
    err << "abelia: " << e.what() << "\n";
    const CLI::App* sub = nullptr;
    for (const auto* s : app.get_subcommands()) sub = s;
    err << (sub ? sub->help() : app.help());
    return kUsage;
  }

  try {
    graph::Config cfg;
    if (config_path.empty())
      if (const char* env = std::getenv("ABELIA_CONFIG"); env && *env) config_path = env;
    if (!config_path.empty()) {
      try {
        cfg = load_config(config_path);
      } catch (const std::runtime_error& e) {
        throw UsageError(e.what());
      }
    }
    if (*eps_opt) {
      if (!(eps > 0.0)) throw UsageError("--eps must be positive");
      cfg.eps_budget = eps;
    }
    if (*stack_opt) {
      if (stack_limit == 0) throw UsageError("--stack-limit must be positive");
      cfg.stack_limit = stack_limit;
    }
    if (as_json) cfg.json = true;

    if (*check) return do_check(spec, cfg, out);
    if (*cayley) return do_cayley(pqr, cfg.json, out);
    if (*sparsity) return do_sparsity(pqr2, grades, cfg.json, out);
    if (*grad) return do_grad(grad_spec, seed_id, inputs, cfg, out, err);
    if (*mdlv) return do_mdl_verify(trials, nvars, bound, rng_seed, cfg.json, out);
    if (*drift) return do_drift(steps, format, drift_sig, rng_seed, integer, cfg.json, out);
    if (*gate) return do_gate(before, after, domain, cfg.json, out);
  } catch (const UsageError& e) {
    err << "abelia: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace abelia::cli
