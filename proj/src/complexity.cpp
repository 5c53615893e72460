#include "wmcgrad/complexity.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "wmcgrad/mpe.hpp"

namespace wmcgrad {
namespace {

void check_spec(const SamplerSpec& spec) {
  if (!(spec.epsilon > 0)) throw std::invalid_argument("epsilon must be positive");
  if (!(spec.delta > 0 && spec.delta < 1)) throw std::invalid_argument("delta must lie in (0, 1)");
}

// Ceiling that treats values within a few ulps of an integer as that integer,
// so that exact cases such as ln(e^2)/2 = 1 do not round up to 2.
uint64_t ceil_count(double x) {
  if (!(x > 1.0)) return 1;
  if (x >= 9.2e18) return uint64_t{1} << 63;
  const double r = std::round(x);
  if (std::abs(x - r) <= 8 * std::numeric_limits<double>::epsilon() * x) return static_cast<uint64_t>(r);
  return static_cast<uint64_t>(std::ceil(x));
}

}  // namespace

double sample_constant(const SamplerSpec& spec) {
  check_spec(spec);
  return std::log(2.0 / spec.delta) / (spec.epsilon * spec.epsilon);
}

uint64_t required_samples_interpretation(const SamplerSpec& spec, double wmc_lower) {
  if (!(wmc_lower > 0)) throw std::invalid_argument("wmc lower bound must be positive");
  return ceil_count(sample_constant(spec) / wmc_lower);
}

uint64_t required_samples_weightme(const SamplerSpec& spec, double lambda) {
  check_spec(spec);
  if (!(lambda > 0)) throw std::invalid_argument("lambda must be positive");
  return ceil_count(std::log(2.0 / spec.delta) / (2.0 * spec.epsilon * spec.epsilon * lambda * lambda));
}

double tractability_threshold(const SamplerSpec& spec) {
  check_spec(spec);
  if (spec.max_samples == 0) throw std::invalid_argument("max_samples must be positive");
  return std::sqrt(2.0 * std::log(2.0 / spec.delta) / static_cast<double>(spec.max_samples)) / spec.epsilon;
}

TractabilityCheck tractability_check(const CnfFormula& phi, const WeightMap& w, const Implicant& pi, int x,
                                     const SamplerSpec& spec, const CompileOptions& compile_options) {
  if (!pi.contains(x)) throw std::invalid_argument("variable is not in the implicant");
  if (!is_implicant(phi, pi)) throw std::invalid_argument("not an implicant of the formula");
  Literal lx;
  TractabilityCheck r;
  r.wmc_implicant = 1.0;
  for (Literal l : pi.literals()) {
    r.wmc_implicant *= w(l);
    if (l.var() == x) lx = l;
  }
  r.wmc_negated = wmc_eval(compile(condition(phi, ~lx), compile_options), w).value;
  r.margin = r.wmc_implicant - r.wmc_negated;
  r.threshold = tractability_threshold(spec);
  r.holds = r.margin >= r.threshold;
  return r;
}

bool check_tractability_condition(const CnfFormula& phi, const WeightMap& w, const Implicant& pi, int x,
                                  const SamplerSpec& spec) {
  return tractability_check(phi, w, pi, x, spec).holds;
}

int tau_supervision(const CnfFormula& phi, const WeightMap& w) {
  const auto m = mpe(phi, w.clamped()).model;
  int tau = 0;
  for (int v = 1; v <= phi.num_vars; ++v)
    if (w(Literal(v, m.value(v))) > 0.5) ++tau;
  return tau;
}

}  // namespace wmcgrad
