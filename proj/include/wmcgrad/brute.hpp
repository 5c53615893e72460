#pragma once

#include <vector>

#include "wmcgrad/circuit.hpp"
#include "wmcgrad/logic.hpp"

namespace wmcgrad {

inline constexpr int kDefaultBruteForceLimit = 24;

// Direct enumeration of all 2^n interpretations. Throws LimitExceeded when
// num_vars exceeds max_vars.
WmcResult wmc_brute(const CnfFormula& phi, const WeightMap& w,
                    int max_vars = kDefaultBruteForceLimit);

// Every model of phi in increasing Interpretation::index() order.
std::vector<Interpretation> brute_force_models(const CnfFormula& phi,
                                               int max_vars = kDefaultBruteForceLimit);

}  // namespace wmcgrad
