#include "abelia/coherence.hpp"

#include <cmath>
#include <json.hpp>
#include <stdexcept>

#include "abelia/unify.hpp"

namespace abelia::coherence {
namespace {

void check_categorical(const Categorical& c) {
  double sum = 0.0;
  for (double x : c.p) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw std::invalid_argument("categorical probabilities must be finite and nonnegative");
    sum += x;
  }
  if (std::fabs(sum - 1.0) > 1e-12) throw std::invalid_argument("categorical probabilities must sum to 1");
}

std::vector<double> numbers(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array()) throw std::invalid_argument(std::string("missing array '") + key + "'");
  std::vector<double> v;
  for (const auto& x : j[key]) {
    if (!x.is_number()) throw std::invalid_argument(std::string("non-numeric entry in '") + key + "'");
    v.push_back(x.get<double>());
  }
  return v;
}

}  // namespace

double Divergence::value() const {
  if (infinite_) throw std::logic_error("infinite divergence has no finite value");
  return value_;
}

std::string Divergence::to_string() const {
  if (infinite_) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", value_);
  return buf;
}

bool operator<(const Divergence& a, const Divergence& b) {
  if (a.infinite_) return false;
  if (b.infinite_) return true;
  return a.value_ < b.value_;
}

double kl_gaussian_diag(const DiagGaussian& p, const DiagGaussian& q) {
  if (p.mean.size() != p.variance.size() || q.mean.size() != q.variance.size() || p.mean.size() != q.mean.size())
    throw std::invalid_argument("Gaussian dimensionality mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.mean.size(); ++i) {
    double pv = p.variance[i], qv = q.variance[i];
    if (!(pv > 0.0) || !(qv > 0.0)) throw std::invalid_argument("variances must be positive");
    double d = p.mean[i] - q.mean[i];
    sum += 0.5 * (std::log(qv / pv) + (pv + d * d) / qv - 1.0);
  }
  // each term is nonnegative; rounding can leave a trace below zero
  return std::max(sum, 0.0);
}

Divergence kl_categorical(const Categorical& p, const Categorical& q) {
  if (p.p.size() != q.p.size()) throw std::invalid_argument("categorical length mismatch");
  check_categorical(p);
  check_categorical(q);
  double sum = 0.0;
  for (std::size_t i = 0; i < p.p.size(); ++i) {
    if (p.p[i] == 0.0) continue;
    if (q.p[i] == 0.0) return Divergence::infinite();
    sum += p.p[i] * std::log(p.p[i] / q.p[i]);
  }
  return Divergence::finite(std::max(sum, 0.0));
}

Divergence kl(const Distribution& p, const Distribution& q) {
  if (p.index() != q.index()) throw std::invalid_argument("distributions belong to different families");
  if (auto* g = std::get_if<DiagGaussian>(&p)) return Divergence::finite(kl_gaussian_diag(*g, std::get<DiagGaussian>(q)));
  return kl_categorical(std::get<Categorical>(p), std::get<Categorical>(q));
}

const char* to_string(Decision d) { return d == Decision::accept ? "accept" : "reject"; }

GateResult accept_consultation(const Distribution& before, const Distribution& after, const Distribution& domain) {
  Divergence change = kl(after, before);
  Divergence disagreement = kl(before, domain);
  return {change, disagreement, change < disagreement ? Decision::accept : Decision::reject};
}

Distribution parse_distribution(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("distribution JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("family") || !j["family"].is_string() || !j.contains("params"))
    throw std::invalid_argument("distribution needs 'family' and 'params'");
  const std::string family = j["family"];
  const auto& params = j["params"];
  if (family == "gaussian" || family == "diag_gaussian") {
    DiagGaussian g{numbers(params, "mean"), numbers(params, "variance")};
    if (g.mean.size() != g.variance.size()) throw std::invalid_argument("mean and variance differ in length");
    for (double v : g.variance)
      if (!(v > 0.0)) throw std::invalid_argument("variances must be positive");
    return g;
  }
  if (family == "categorical") {
    Categorical c{numbers(params, "p")};
    check_categorical(c);
    return c;
  }
  throw std::invalid_argument("unknown distribution family '" + family + "'");
}

const char* to_string(ResponseErrorKind k) {
  switch (k) {
    case ResponseErrorKind::containment: return "containment";
    case ResponseErrorKind::dimension: return "dimension";
    case ResponseErrorKind::certificate: return "certificate";
  }
  return "?";
}

std::vector<ResponseError> validate_typed_response(const TypedResponse& r, const dims::Dimension& query_dim,
                                                   dims::Context& ctx) {
  std::vector<ResponseError> errors;
  if (!(r.confidence.lo <= r.value && r.value <= r.confidence.hi))
    errors.push_back({ResponseErrorKind::containment,
                      "value " + std::to_string(r.value) + " lies outside its confidence interval " + r.confidence.to_string()});
  auto u = unify::unify(r.dim, query_dim, ctx);
  if (auto* e = std::get_if<unify::UnifyError>(&u))
    errors.push_back({ResponseErrorKind::dimension, "response dimension " + dims::format_dimension(r.dim, ctx) +
                                                        " does not unify with query dimension " +
                                                        dims::format_dimension(query_dim, ctx) + ": " + e->message(ctx)});
  if (r.certificate.empty()) errors.push_back({ResponseErrorKind::certificate, "response carries no certificate"});
  return errors;
}

}  // namespace abelia::coherence
