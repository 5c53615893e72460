#pragma once

#include <cstdint>

#include "wmcgrad/circuit.hpp"
#include "wmcgrad/logic.hpp"
#include "wmcgrad/samplers.hpp"

namespace wmcgrad {

// c(eps, delta) = eps^-2 ln(2/delta). The constant factor is a convention.
double sample_constant(const SamplerSpec& spec);

// Interpretation samples for an (eps, delta)-approximation of a count no
// smaller than wmc_lower: ceil(c(eps, delta) / wmc_lower), at least 1.
// Throws std::invalid_argument unless wmc_lower > 0; saturates at 2^63.
uint64_t required_samples_interpretation(const SamplerSpec& spec, double wmc_lower);

// Weighted model samples for WeightME when |d log WMC / dw(x)| >= lambda:
// ceil(ln(2/delta) / (2 eps^2 lambda^2)), at least 1. Independent of phi.
uint64_t required_samples_weightme(const SamplerSpec& spec, double lambda);

struct TractabilityCheck {
  double wmc_implicant = 0.0;  // prod of w(l) over the implicant
  double wmc_negated = 0.0;    // WMC(phi | ~x)
  double margin = 0.0;         // wmc_implicant - wmc_negated
  double threshold = 0.0;
  bool holds = false;
};

// Smallest partial derivative that spec.max_samples interpretation samples
// estimate to relative error eps with confidence 1 - delta. The per-sample
// estimate lies in [-1, 1], so Hoeffding gives
//   threshold = sqrt(2 ln(2/delta) / max_samples) / eps.
double tractability_threshold(const SamplerSpec& spec);

// Whether WMC(pi) - WMC(phi|~x) >= tractability_threshold(spec), for an
// implicant pi of phi that contains x (positively or negatively; the
// derivative direction follows the literal in pi). Throws
// std::invalid_argument when x is not in pi or pi is not an implicant.
TractabilityCheck tractability_check(const CnfFormula& phi, const WeightMap& w, const Implicant& pi, int x,
                                     const SamplerSpec& spec, const CompileOptions& compile_options = {});
bool check_tractability_condition(const CnfFormula& phi, const WeightMap& w, const Implicant& pi, int x,
                                  const SamplerSpec& spec);

// Number of literals of the most probable model whose weight is strictly
// above 1/2. Throws UnsatError.
int tau_supervision(const CnfFormula& phi, const WeightMap& w);

}  // namespace wmcgrad
