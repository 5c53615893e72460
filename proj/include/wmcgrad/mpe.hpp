#pragma once

#include <cstdint>
#include <vector>

#include "wmcgrad/budget.hpp"
#include "wmcgrad/logic.hpp"

namespace wmcgrad {

struct MpeResult {
  Interpretation model;
  double log_prob = 0.0;  // natural log of P(model; w)
};

struct MpeOptions {
  uint64_t node_budget = 50'000'000;
  Deadline deadline;
};

// Most probable model by depth-first branch and bound with unit propagation.
// The bound adds max(log w(x), log w(~x)) for every unassigned variable.
// Ties (within 1e-10 in log space) go to the lexicographically smallest model,
// comparing variable 1 first with false < true. Throws UnsatError.
MpeResult mpe(const CnfFormula& phi, const WeightMap& w, const MpeOptions& options = {});

// The k most probable models in non-increasing probability, found by repeated
// mpe calls with blocking clauses. Returns fewer when phi has fewer models.
// Throws UnsatError when phi has no model at all.
std::vector<MpeResult> top_k_models(const CnfFormula& phi, const WeightMap& w, int k,
                                    const MpeOptions& options = {});

// Greedy k-optimal DNF over full models: each step adds the model with the
// largest probability mass not yet covered. Full models never overlap, so the
// uncovered mass of a model is its own probability and the greedy choice
// coincides with top_k_models.
std::vector<Interpretation> k_optimal_dnf(const CnfFormula& phi, const WeightMap& w, int k,
                                          const MpeOptions& options = {});

}  // namespace wmcgrad
