#include "wmcgrad/encodings.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace wmcgrad {

WeightMap CategoricalEncoding::weight_map() const {
  WeightMap w(fragment.num_vars);
  for (auto [var, p] : theta_weights) w.set(var, p);
  return w;
}

CategoricalEncoding encode_categorical(std::span<const double> probabilities, int first_var) {
  const int k = static_cast<int>(probabilities.size());
  if (k < 2) throw std::invalid_argument("categorical variable needs at least 2 outcomes");
  for (double p : probabilities)
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("outcome probability outside [0,1]");
  const double total = std::accumulate(probabilities.begin(), probabilities.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("probabilities do not sum to 1");
  if (first_var < 1) throw std::invalid_argument("first_var must be positive");

  CategoricalEncoding enc;
  int next = first_var;
  for (int i = 0; i < k; ++i) enc.indicator_vars.push_back(next++);
  for (int i = 0; i + 1 < k; ++i) enc.theta_vars.push_back(next++);
  enc.fragment.num_vars = next - 1;
  enc.normalization_exponent = k;

  double remaining = 1.0;
  for (int i = 0; i + 1 < k; ++i) {
    double theta = remaining > 1e-12 ? probabilities[i] / remaining : 0.0;
    theta = std::clamp(theta, 0.0, 1.0);
    enc.theta_weights.emplace_back(enc.theta_vars[i], theta);
    remaining -= probabilities[i];
  }

  auto& clauses = enc.fragment.clauses;
  for (int i = 0; i < k; ++i) {
    const Literal a(enc.indicator_vars[i], true);
    for (int j = 0; j < i; ++j) clauses.push_back({~a, Literal(enc.indicator_vars[j], false)});
    Clause back;
    for (int j = 0; j < i; ++j) back.emplace_back(enc.indicator_vars[j], true);
    if (i + 1 < k) {
      const Literal theta(enc.theta_vars[i], true);
      clauses.push_back({~a, theta});
      back.push_back(~theta);
    }
    back.push_back(a);
    clauses.push_back(std::move(back));
  }
  return enc;
}

}  // namespace wmcgrad
