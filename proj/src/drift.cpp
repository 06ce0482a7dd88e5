#include <cmath>
#include <random>
#include <stdexcept>

#include "abelia/numeric.hpp"

namespace abelia::numeric {

using clifford::Blade;
using clifford::GradeSet;

namespace {

struct Mode {
  std::vector<double> x;
  double max_zero = 0.0;
};

}  // namespace

DriftResult drift_probe(const clifford::CayleyTable& table, int steps, const DriftOptions& options) {
  const Format f = options.format;
  std::vector<Blade> inputs = table.blades_of(options.input);
  if (inputs.empty()) throw std::invalid_argument("no blades of the requested input grades");

  GradeSet reachable = clifford::grade_product_set(table, options.input, options.input);
  GradeSet zero;
  for (int g : reachable.members())
    if (g % 4 == 2 || g % 4 == 3) zero.insert(g);
  if (zero.empty())
    throw std::invalid_argument("no structurally zero grade in " + table.signature().to_string() + " for inputs " +
                                options.input.to_string());

  std::vector<int> rev_sign(inputs.size());
  std::vector<int> index(table.blades(), -1);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    int g = clifford::grade(inputs[i]);
    rev_sign[i] = (g * (g - 1) / 2) % 2 ? -1 : 1;
    index[inputs[i]] = static_cast<int>(i);
  }

  struct Term {
    std::size_t a, b;
    int sign;
  };
  std::vector<Blade> outputs;
  std::vector<std::vector<Term>> terms;
  for (Blade c = 0; c < table.blades(); ++c) {
    std::vector<Term> list;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      int j = index[inputs[i] ^ c];
      if (j < 0) continue;
      int s = table.sign(inputs[i], inputs[j]);
      if (s != 0) list.push_back({i, static_cast<std::size_t>(j), s * rev_sign[j]});
    }
    if (list.empty()) continue;
    outputs.push_back(c);
    terms.push_back(std::move(list));
  }

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> real(-1.0, 1.0);
  std::uniform_int_distribution<int> small(-3, 3);

  Mode modes[2];
  for (auto& m : modes) m.x.assign(inputs.size(), 0.0);
  std::vector<double> u(inputs.size()), w(inputs.size()), y(outputs.size());

  DriftResult result;
  result.structural_zero = zero;
  for (int step = 0; step < steps; ++step) {
    for (auto& v : u) v = options.integer_coefficients ? small(rng) : round_to(f, real(rng));
    for (int mode = 0; mode < 2; ++mode) {
      Mode& m = modes[mode];
      for (std::size_t i = 0; i < w.size(); ++i) w[i] = round_to(f, m.x[i] + u[i]);
      for (std::size_t k = 0; k < outputs.size(); ++k) {
        if (mode == 0) {
          ExactAccumulator acc;
          for (const Term& t : terms[k]) acc.add_product(t.sign * w[t.a], w[t.b]);
          y[k] = acc.round(f);
        } else {
          NaiveAccumulator acc(f);
          for (const Term& t : terms[k]) acc.add_product(t.sign * w[t.a], w[t.b]);
          y[k] = acc.value();
        }
        if (zero.contains(clifford::grade(outputs[k]))) m.max_zero = std::max(m.max_zero, std::fabs(y[k]));
      }
      double scale = outputs.front() == 0 ? std::sqrt(std::fabs(y[0])) : 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) m.x[i] = scale > 0.0 ? round_to(f, w[i] / scale) : w[i];
    }
    ++result.steps;
  }
  result.exact_max = modes[0].max_zero;
  result.naive_max = modes[1].max_zero;
  return result;
}

}  // namespace abelia::numeric
