#pragma once

// The consultation gate: a domain response is integrated only when the
// state change it causes is smaller than the disagreement that prompted
// the consultation.

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "abelia/dims.hpp"
#include "abelia/interval.hpp"

namespace abelia::coherence {

struct DiagGaussian {
  std::vector<double> mean;
  std::vector<double> variance;
};

struct Categorical {
  std::vector<double> p;
};

using Distribution = std::variant<DiagGaussian, Categorical>;

/// A KL value; +infinity (support violation) is its own state.
class Divergence {
 public:
  static Divergence finite(double v) { return Divergence(v, false); }
  static Divergence infinite() { return Divergence(0.0, true); }

  bool is_infinite() const { return infinite_; }
  /// Throws std::logic_error for an infinite divergence.
  double value() const;
  std::string to_string() const;

  friend bool operator<(const Divergence& a, const Divergence& b);

 private:
  Divergence(double v, bool inf) : value_(v), infinite_(inf) {}
  double value_;
  bool infinite_;
};

/// Throws std::invalid_argument on length mismatch or variance <= 0.
double kl_gaussian_diag(const DiagGaussian& p, const DiagGaussian& q);
/// Throws std::invalid_argument on length mismatch or an invalid distribution.
Divergence kl_categorical(const Categorical& p, const Categorical& q);
/// Dispatches on the family; mixing families throws std::invalid_argument.
Divergence kl(const Distribution& p, const Distribution& q);

enum class Decision { accept, reject };
const char* to_string(Decision d);

struct GateResult {
  Divergence change;        // KL(after || before)
  Divergence disagreement;  // KL(before || domain)
  Decision decision;
};

/// accept iff KL(after || before) < KL(before || domain), strictly.
GateResult accept_consultation(const Distribution& before, const Distribution& after, const Distribution& domain);

/// {"family": "gaussian", "params": {"mean": [...], "variance": [...]}} or
/// {"family": "categorical", "params": {"p": [...]}}.
Distribution parse_distribution(std::string_view json_text);

struct TypedResponse {
  double value = 0.0;
  dims::Dimension dim;
  Interval confidence;
  std::string certificate;
};

enum class ResponseErrorKind { containment, dimension, certificate };
const char* to_string(ResponseErrorKind k);

struct ResponseError {
  ResponseErrorKind kind;
  std::string message;
};

/// Empty result means the response passed every check.
std::vector<ResponseError> validate_typed_response(const TypedResponse& r, const dims::Dimension& query_dim,
                                                   dims::Context& ctx);

}  // namespace abelia::coherence
